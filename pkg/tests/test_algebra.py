import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.algebra import (
    DEFAULT_CATALOG, LinearCombination, RingAxiomError, RingSpecError, beautiful_characterization, build_ring,
    catalog_rings, enumerate_beautiful, is_beautiful, is_beautiful_exhaustive, matrix, opposite,
    ring_features, ring_from_tables, ring_isomorphic, sentence_phi_R, zmod,
)
from modeq.logic import evaluate

from conftest import ring


def test_catalog_sizes():
    assert [r.size for r in catalog_rings()] == [2, 3, 4, 6, 4, 4, 16, 4]


def test_features():
    f = ring_features(ring("Z6"))
    assert sorted(f.central_idempotents) == [0, 1, 3, 4]
    assert sorted(f.units) == [1, 5]
    m = ring_features(ring("M2F2"))
    assert len(m.units) == 6 and m.center.size == 2


def test_isomorphism_examples():
    assert ring_isomorphic(ring("Z4"), ring("F2x2")) is None
    assert ring_isomorphic(ring("F4"), ring("Z2xZ2")) is None
    iso = ring_isomorphic(ring("M2F2"), build_ring(opposite(matrix(zmod(2), 2))))
    assert iso is not None


def test_phi_r_matrix_diagonal():
    rs = catalog_rings()[:6]
    for a in rs:
        phi = sentence_phi_R(a)
        for b in rs:
            assert evaluate(b.model(), phi) == (ring_isomorphic(a, b) is not None)


def test_beautiful_z6():
    got = {c.coefficients for c in enumerate_beautiful(ring("Z6"), 2)}
    assert got == {c.coefficients for c in beautiful_characterization(ring("Z6"), 2)}
    assert len(got) == 4


def test_beautiful_agrees_with_exhaustive_check():
    r = ring("Z2xZ2")
    for c in itertools.product(range(4), repeat=2):
        t = LinearCombination(c)
        assert is_beautiful(t, r) == is_beautiful_exhaustive(t, r, sigma_bound=1)


def test_bad_specs():
    with pytest.raises(RingSpecError):
        build_ring({"kind": "nope"})
    with pytest.raises(RingSpecError):
        build_ring({"kind": "poly_quotient", "p": 4, "modulus": [1, 1]})


def test_opposite_involution_on_catalog():
    for spec in DEFAULT_CATALOG:
        a = build_ring(spec)
        b = build_ring(opposite(opposite(spec)))
        assert np.array_equal(a.mul, b.mul) and np.array_equal(a.add, b.add)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["Z3", "Z4", "Z6", "F4", "F2x2"]), st.data())
def test_corrupted_table_rejected(name, data):
    r = ring(name)
    n = r.size
    i, j = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    which = data.draw(st.sampled_from(["add", "mul"]))
    add, mul = r.add.astype(np.int64).copy(), r.mul.astype(np.int64).copy()
    t = add if which == "add" else mul
    t[i, j] = (t[i, j] + data.draw(st.integers(1, n - 1))) % n
    with pytest.raises(RingAxiomError):
        ring_from_tables(add, mul, r.zero, r.one)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["Z4", "Z6", "M2F2", "F4"]), st.permutations(range(4)))
def test_isomorphism_invariant_under_relabelling(name, perm4):
    r = ring(name)
    n = r.size
    rng = np.random.default_rng(sum(i * p for i, p in enumerate(perm4)))
    p = rng.permutation(n)
    inv = np.argsort(p)
    add = p[r.add[inv[:, None], inv[None, :]]]
    mul = p[r.mul[inv[:, None], inv[None, :]]]
    s = ring_from_tables(add, mul, int(p[r.zero]), int(p[r.one]))
    iso = ring_isomorphic(r, s)
    assert iso is not None
    iso = np.asarray(iso)
    assert np.array_equal(iso[r.mul], s.mul[iso[:, None], iso[None, :]])
