import threading

import pytest

from modeq.algebra import build_ring, ring_isomorphic, sentence_phi_R
from modeq.category import (
    FORMULA_NAMES, PINNED_PAIRS, encode_category, build_named_formula, eval_named_formula, formula_oracle_agreement,
    gr_certificate, load_category_signature, pairings, ring_from_endo_monoid,
    ring_sentence_to_category, xi_sentence, zero_map,
)
from modeq.category.gr import P_VAR
from modeq.logic import CATEGORY_SIGNATURE, check_formula, evaluate
from modeq.modules import build_skeleton, end_ring
from modeq.samples import ring_sentences

from conftest import category, ring


def test_f2_skeleton_shape():
    cat = category("Z2", 4)
    assert (cat.n_objects, cat.n_morphisms) == (3, 31)


def test_signature_document():
    assert load_category_signature() == CATEGORY_SIGNATURE


def test_formulas_well_sorted():
    for name in FORMULA_NAMES:
        check_formula(build_named_formula(name), CATEGORY_SIGNATURE)


def test_formula_examples_z4():
    cat = category("Z4", 4)
    reg = cat.skeleton.regular
    z2 = next(i for i, m in enumerate(cat.skeleton.modules) if m.size == 2)
    assert eval_named_formula(cat, "projective", [reg])
    assert eval_named_formula(cat, "injective", [reg])
    assert not eval_named_formula(cat, "projective", [z2])
    assert eval_named_formula(cat, "simp", [z2])
    assert not eval_named_formula(cat, "simp", [reg])
    assert eval_named_formula(cat, "proobr_bounded", [reg])
    assert eval_named_formula(cat, "local", [reg])
    # the quotient Z4 -> Z2 is epi, not mono, and has no section
    f = next(f for f in cat.morphisms(reg, z2) if not cat.hom(f).is_zero())
    assert eval_named_formula(cat, "epi", [f]) and not eval_named_formula(cat, "mono", [f])
    assert not eval_named_formula(cat, "retraction", [f])


@pytest.mark.parametrize("spec,bound", PINNED_PAIRS[:6])
def test_oracle_agreement_small(spec, bound):
    rep = formula_oracle_agreement(encode_category(build_skeleton(build_ring(spec), bound)))
    assert rep.ok, rep.disagreements[:5]


def test_comm_local_invariants():
    # comm and local hold exactly at progenerators with commutative / local endomorphism rings
    cat = category("Z2xZ2", 4)
    reg = cat.skeleton.regular
    assert eval_named_formula(cat, "comm", [reg])
    assert not eval_named_formula(cat, "local", [reg])
    for x in cat.objects():
        if not eval_named_formula(cat, "proobr_bounded", [x]):
            assert not eval_named_formula(cat, "comm", [x])
            assert not eval_named_formula(cat, "local", [x])


def test_pairing_choice_does_not_matter():
    cat = category("Z2", 4)
    p = cat.skeleton.regular
    tables = {ring_from_endo_monoid(cat, p, pr).add.tobytes() for pr in pairings(cat, p)}
    assert len(list(pairings(cat, p))) > 1 and len(tables) == 1


def test_gr_is_additive_z4():
    cat = category("Z4", 16)
    p = cat.skeleton.regular
    cert = gr_certificate(cat, p)
    gr = cert.gr
    assert gr[zero_map(cat, p, p)] == cat.identity(cert.pairing.q)
    assert len(set(gr.values())) == len(gr)
    one = cat.identity(p)
    two = next(f for f in cat.morphisms(p, p) if cat.hom(f).table == (0, 2, 0, 2))
    assert cat.compose(gr[one], gr[one]) == gr[two]
    assert ring_isomorphic(cert.ring, end_ring(cat.skeleton.modules[p])[0]) is not None


@pytest.mark.parametrize("name,bound", [("Z2", 4), ("Z3", 9)])
def test_ring_sentence_translation_sound(name, bound):
    cat = category(name, bound)
    p = cat.skeleton.regular
    r = ring(name).model()
    for phi in ring_sentences():
        assert evaluate(cat.model, ring_sentence_to_category(phi), {P_VAR: p}) == evaluate(r, phi)


def test_xi_small():
    cat = category("Z2", 4)
    assert evaluate(cat.model, xi_sentence(sentence_phi_R(ring("Z2"))))
    assert not evaluate(cat.model, xi_sentence(sentence_phi_R(ring("Z3"))))


def test_concurrent_evaluation_matches_sequential():
    cat = category("Z4", 4)
    jobs = [(n, [x]) for n in ("simp", "projective", "injective", "generator", "local", "comm")
            for x in cat.objects()]
    jobs += [(n, [f]) for n in ("mono", "epi", "retraction") for f in cat.morphisms()]
    fresh = category.__wrapped__("Z4", 4)
    want = [eval_named_formula(fresh, n, a) for n, a in jobs]
    got = [None] * len(jobs)

    def work(k):
        for i in range(k, len(jobs), 8):
            got[i] = eval_named_formula(cat, *jobs[i])

    threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert got == want
