import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.algebra import ring_isomorphic
from modeq.caps import CapExceeded
from modeq.lattice import (
    LatticeCalculus, lattice_definable_ops, projective_space, recover_end_ring, sampled_products,
    standard_copies, submodule_matrix_encoding,
)
from modeq.modules import is_submodule, submodule_sum

from conftest import ring


def test_projective_space_order_is_inclusion():
    ps = projective_space(ring("Z4"), 2)
    assert len(ps) == 15
    want = np.array([[a <= b for b in ps.subs] for a in ps.subs])
    assert np.array_equal(ps.leq, want)


def test_meet_join_tables():
    ps = projective_space(ring("Z2"), 3)
    assert len(ps) == 16
    for a, b in itertools.product(ps.subs, repeat=2):
        assert ps.meet(a, b) == a & b
        assert ps.join(a, b) == submodule_sum(ps.module, a, b)
        assert is_submodule(ps.module, ps.join(a, b))


def test_definable_ops_f2():
    rep = lattice_definable_ops(projective_space(ring("Z2"), 2))
    assert rep.ok, rep.mismatches


def test_literal_iso_d_rejects_only_zero_pair():
    for name in ("Z2", "Z4"):
        ps = projective_space(ring(name), 2)
        rep = lattice_definable_ops(ps)
        z = ps.index[ps.zero]
        assert rep.mismatches["iso_d_literal"] == [(z, z)]
        assert rep.mismatches["iso_d"] == []


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "F2x2"])
def test_recover_end_ring(name):
    copies = standard_copies(projective_space(ring(name), 3))
    rec = recover_end_ring(copies)
    assert rec.ok
    assert ring_isomorphic(rec.ring, ring(name)) is not None


def test_w32_condition_holds_for_construction():
    calc = LatticeCalculus(standard_copies(projective_space(ring("Z4"), 3)))
    for q in ([0, 1, 2, 3], [0, 3, 2, 1], [0, 2, 0, 2]):
        g = calc.graph(q)
        assert calc.w32_condition(calc.w32(g), g.v3)


def test_lazy_matrix_ring_products():
    ps = projective_space(ring("M2F2"), 3, enumerate=False)
    assert all(ok for _, _, ok in sampled_products(standard_copies(ps), samples=3, seed=1))


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        projective_space(ring("M2F2"), 3)


@pytest.mark.parametrize("name,n", [("Z2", 3), ("Z4", 2)])
def test_matrix_encoding(name, n):
    ps = projective_space(ring(name), n)
    enc, rep = submodule_matrix_encoding(ps)
    assert rep.ok
    for i, j in itertools.product(range(len(ps)), repeat=2):
        assert enc.submodule_leq(enc.encode(ps.subs[i]), enc.encode(ps.subs[j])) == (ps.subs[i] <= ps.subs[j])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_lattice_add_mul_match_end_ring(data):
    calc = _calc("Z4")
    qs = [(0, 1, 2, 3), (0, 3, 2, 1), (0, 2, 0, 2), (0, 0, 0, 0)]
    a, b = data.draw(st.sampled_from(qs)), data.draw(st.sampled_from(qs))
    ga, gb = calc.graph(a), calc.graph(b)
    assert calc.add(ga, gb).q == tuple((x + y) % 4 for x, y in zip(a, b))
    assert calc.mul(ga, gb).q == tuple(a[y] for y in b)


_CALCS = {}


def _calc(name):
    if name not in _CALCS:
        _CALCS[name] = LatticeCalculus(standard_copies(projective_space(ring(name), 3)))
    return _CALCS[name]
