import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.algebra import ring_isomorphic
from modeq.modules import (
    ModuleAxiomError, build_skeleton, direct_sum, end_ring, free_module, hom_set,
    is_homomorphism, is_submodule, make_module, module_isomorphic, module_predicates,
    morita_similar, regular_module, span, submodules,
)

from conftest import ring


def brute_submodules(m):
    return {frozenset(s) for k in range(1, m.size + 1)
            for s in itertools.combinations(range(m.size), k) if is_submodule(m, s)}


def brute_homs(a, b):
    return {t for t in itertools.product(range(b.size), repeat=a.size) if is_homomorphism(t, a, b)}


@pytest.mark.parametrize("name,n,count", [("Z2", 2, 5), ("Z4", 2, 15), ("Z2", 3, 16), ("Z3", 2, 6)])
def test_submodule_counts(name, n, count):
    m = free_module(ring(name), n)
    subs = submodules(m)
    assert len(subs) == count
    if m.size <= 16:
        assert set(subs) == brute_submodules(m)


def test_z4_cubed_submodules_match_spans():
    m = free_module(ring("Z4"), 3)
    spans = {span(m, g) for k in range(4) for g in itertools.combinations(range(m.size), k)}
    assert set(submodules(m)) == spans and len(spans) == 129


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "Z6", "F4", "F2x2", "Z2xZ2"])
def test_homs_from_regular(name):
    r = ring(name)
    rr = regular_module(r)
    assert len(hom_set(rr, rr)) == r.size
    e, _ = end_ring(rr)
    assert ring_isomorphic(e, r) is not None


def test_hom_z4_to_z2():
    z4 = regular_module(ring("Z4"))
    skel = build_skeleton(ring("Z4"), 4)
    z2 = next(m for m in skel.modules if m.size == 2)
    hs = hom_set(z4, z2)
    assert len(hs) == 2
    assert {h.table for h in hs} == brute_homs(z4, z2)


def test_hom_set_matches_brute_force_in_skeleton():
    skel = build_skeleton(ring("Z2xZ2"), 4)
    for a in skel.modules:
        for b in skel.modules:
            if b.size ** a.size <= 70000:
                assert {h.table for h in hom_set(a, b)} == brute_homs(a, b)


def test_end_ring_of_f2_squared_is_matrix_ring():
    e, _ = end_ring(free_module(ring("Z2"), 2))
    assert ring_isomorphic(e, ring("M2F2")) is not None


@pytest.mark.parametrize("name,bound,count", [("Z2", 4, 3), ("Z4", 4, 4), ("Z3", 9, 3), ("Z2xZ2", 4, 6)])
def test_skeleton_sizes(name, bound, count):
    # Z2xZ2: S1^a + S2^b with a + b <= 2
    assert len(build_skeleton(ring(name), bound)) == count


def test_skeleton_has_no_isomorphic_pair():
    skel = build_skeleton(ring("F2x2"), 4)
    for a, b in itertools.combinations(skel.modules, 2):
        assert a.size != b.size or module_isomorphic(a, b) is None


def test_predicates_z4():
    skel = build_skeleton(ring("Z4"), 4)
    by_size = {m.size: module_predicates(m, skel) for m in skel.modules if m.size < 4}
    z2 = by_size[2]
    assert z2.simple and not z2.projective and not z2.injective and not z2.generator
    reg = module_predicates(skel.modules[skel.regular], skel)
    assert reg.projective and reg.injective and reg.generator and reg.progenerator


def test_morita_examples():
    from modeq.algebra import build_ring, zmod
    m = morita_similar(ring("M2F2"), ring("Z2"))
    assert m.status == "found" and m.witness.size == 4
    assert morita_similar(ring("Z2"), ring("M2F2")).status == "found"
    assert morita_similar(ring("Z2"), ring("Z3")).status == "absent"
    assert morita_similar(ring("Z4"), ring("F2x2")).status == "absent"
    assert morita_similar(ring("Z6"), build_ring(zmod(6))).status == "found"


def test_bad_module_rejected():
    r = ring("Z4")
    rr = regular_module(r)
    act = rr.act.copy()
    act[1, 2] = 1
    with pytest.raises(ModuleAxiomError):
        make_module(r, rr.add, act)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["Z2", "Z3", "Z4", "F2x2"]), st.integers(1, 2), st.integers(1, 2))
def test_direct_sum_hom_counts_multiply(name, a, b):
    r = ring(name)
    ma, mb = free_module(r, a), free_module(r, b)
    s = direct_sum(ma, mb)
    rr = regular_module(r)
    assert len(hom_set(rr, s)) == len(hom_set(rr, ma)) * len(hom_set(rr, mb)) == s.size


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["Z2", "Z4", "Z2xZ2", "F4"]), st.data())
def test_homs_compose(name, data):
    skel = build_skeleton(ring(name), 4)
    n = len(skel)
    i, j, k = (data.draw(st.integers(0, n - 1)) for _ in range(3))
    for f in skel.homs[(i, j)]:
        for g in skel.homs[(j, k)]:
            assert is_homomorphism(g.compose(f).table, skel.modules[i], skel.modules[k])
