import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.logic import Forall, evaluate, free_variables, models_isomorphic
from modeq.samples import ring_sentences
from modeq.ultra import (
    Filter, FilterError, Ultrafilter, check_ultrapower_equivalence, enumerate_filters,
    enumerate_filters_bruteforce, filter_product, principal_filter, trivial_filter, ultrapower,
)

import strategies as S
from conftest import ring


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumeration_matches_bruteforce(n):
    e = enumerate_filters(n)
    assert {d.members for d in e.filters} == set(enumerate_filters_bruteforce(n))
    assert len(e.ultrafilters) == n
    assert all(bin(u.generator).count("1") == 1 for u in e.ultrafilters)


def test_filter_axioms_enforced():
    with pytest.raises(FilterError):
        Filter(2, frozenset({0b01, 0b10, 0b11}))
    with pytest.raises(FilterError):
        Ultrafilter(2, trivial_filter(2).members)


def test_principal_product_picks_the_factor():
    ms = [ring(n).model() for n in ("Z2", "Z3", "Z4")]
    for i, m in enumerate(ms):
        prod = filter_product(ms, principal_filter(3, [i]))
        assert models_isomorphic(prod.model, m) is not None


def test_trivial_filter_gives_full_product():
    m = ring("Z2").model()
    prod = ultrapower(m, trivial_filter(2))
    assert prod.model.carriers["R"] == 4
    assert models_isomorphic(prod.model, ring("Z2xZ2").model()) is not None
    assert models_isomorphic(prod.model, m) is None


def test_ultrapower_report():
    rep = check_ultrapower_equivalence(ring("F4").model(), principal_filter(3, [2]), ring_sentences())
    assert rep.ok and rep.product_size == {"R": 4}


@settings(max_examples=60, deadline=None)
@given(st.lists(S.models, min_size=2, max_size=3), st.data(), S.formulas)
def test_los_on_random_sentences(models, data, phi):
    i = data.draw(st.integers(0, len(models) - 1))
    for v in sorted(free_variables(phi), key=lambda v: v.name):
        phi = Forall(v, phi)
    prod = filter_product(models, principal_filter(len(models), [i]))
    assert evaluate(prod.model, phi) == evaluate(models[i], phi)
