import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.algebra import units
from modeq.groups import (
    GroupAxiomError, check_transvection_identities, conjugate_system, gl_model, matrix_ring,
    relativize_group_sentence, standard_matrix_units, unit_group, verify_group_axioms,
    verify_matrix_units,
)
from modeq.logic import evaluate, models_isomorphic
from modeq.samples import group_sentences

from conftest import ring


@pytest.mark.parametrize("name,n,order", [("Z2", 1, 1), ("Z2", 2, 6), ("Z4", 1, 2), ("Z3", 2, 48)])
def test_gl_orders(name, n, order):
    assert gl_model(ring(name), n).order == order


def test_gl2_f2_is_s3():
    g = gl_model(ring("Z2"), 2).model
    assert evaluate(g, group_sentences()[18])  # left division is solvable
    # non-abelian of order 6
    assert not evaluate(g, group_sentences()[2])


def test_corrupted_group_rejected():
    g = unit_group(ring("Z6"))
    mul = np.asarray(g.model.functions["mul"].table).copy()
    inv = np.asarray(g.model.functions["inv"].table)
    verify_group_axioms(mul, inv, g.model.constants["one"])
    mul[1, 1] = 1 - mul[1, 1]
    with pytest.raises(GroupAxiomError):
        verify_group_axioms(mul, inv, g.model.constants["one"])


def test_matrix_units():
    sys = standard_matrix_units(ring("Z3"), 2)
    assert verify_matrix_units(sys)
    for c in sorted(units(sys.ring))[:10]:
        assert verify_matrix_units(conjugate_system(sys, c))


def test_zeroed_unit_fails_at_the_product():
    sys = standard_matrix_units(ring("Z2"), 2)
    sys.units[(0, 1)] = sys.ring.zero
    v = verify_matrix_units(sys)
    assert not v and v.counterexample == ((1, 2), (2, 1))


def test_identities_z3_n3():
    rep = check_transvection_identities(ring("Z3"), 3)
    assert rep["transvection"].ok and rep["second_corrected"].ok and rep["involution"].ok
    assert (rep["second_literal"].failures, rep["second_literal"].instances) == (24, 54)


def test_literal_form_holds_in_characteristic_two():
    rep = check_transvection_identities(ring("Z2"), 3)
    assert rep["second_literal"].failures == 0
    assert rep["involution"].skipped


@pytest.mark.parametrize("name,n", [("Z2", 2), ("Z4", 1)])
def test_relativization_sample(name, n):
    r = ring(name)
    g = gl_model(r, n).model
    mr = matrix_ring(r, n).model()
    for phi in group_sentences():
        assert evaluate(mr, relativize_group_sentence(phi)) == evaluate(g, phi)


def test_unit_group_isomorphism():
    assert models_isomorphic(unit_group(ring("Z6")).model, unit_group(ring("Z4")).model) is not None


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["Z2", "Z3", "Z4", "Z6", "F4", "F2x2", "M2F2"]))
def test_unit_group_axioms_and_order(name):
    r = ring(name)
    g = unit_group(r)
    assert g.order == len(units(r))
    assert set(g.elements) == set(units(r))
