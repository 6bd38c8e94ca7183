"""The eleven acceptance criteria, each timed against its limit.

Every criterion prints one line: PASS or FAIL, its number, a short summary and
the elapsed time. Run directly (python3 tests/test_acceptance.py) for the lines
alone, or under pytest.
"""

from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modeq.algebra import (  # noqa: E402
    beautiful_characterization, build_ring, catalog_rings, enumerate_beautiful, matrix,
    poly_quotient, ring_isomorphic, sentence_phi_R, zmod,
)
from modeq.category import (  # noqa: E402
    PINNED_PAIRS, encode_category, formula_oracle_agreement, ring_from_endo_monoid, xi_sentence,
)
from modeq.groups import check_transvection_identities, gl_model, matrix_ring, relativize_group_sentence  # noqa: E402
from modeq.lattice import (  # noqa: E402
    lattice_definable_ops, projective_space, recover_end_ring, standard_copies, submodule_matrix_encoding,
)
from modeq.logic import check_deduction, evaluate, match_scheme  # noqa: E402
from modeq.modules import build_skeleton, end_ring, module_isomorphic, morita_similar, regular_module  # noqa: E402
from modeq.samples import group_sentences, ring_sentences  # noqa: E402
from modeq.ultra import check_ultrapower_equivalence, enumerate_filters  # noqa: E402

import strategies  # noqa: E402


def criterion_1():
    f2, f3 = build_ring(zmod(2)), build_ring(zmod(3))
    m2 = build_ring(matrix(zmod(2), 2))
    res = morita_similar(f2, m2)
    ok = res.status == "found" and ring_isomorphic(end_ring(res.witness)[0], f2) is not None
    absent = morita_similar(f2, f3).status == "absent"
    self_ok = []
    for r in catalog_rings():
        m = morita_similar(r, r)
        self_ok.append(m.status == "found" and module_isomorphic(m.witness, regular_module(r)) is not None)
    return ok and absent and all(self_ok), (
        f"F2~M2(F2) {res.status}, F2~F3 {'absent' if absent else 'not absent'}, "
        f"R~R via R_R on {sum(self_ok)}/{len(self_ok)} rings")


def criterion_2():
    # B = |R|^2 is out of reach for Z/6 (36) and M2(F2) (256)
    rings = [r for r in catalog_rings() if r.size ** 2 <= 16]
    good = []
    for r in rings:
        cat = encode_category(build_skeleton(r, r.size ** 2))
        p = cat.skeleton.regular
        rr = ring_from_endo_monoid(cat, p)
        good.append(ring_isomorphic(rr, end_ring(cat.skeleton.modules[p])[0]) is not None)
    return all(good), f"Gr ring = End(R_R) on {sum(good)}/{len(good)} rings with |R|^2 <= 16"


def criterion_3():
    rs = catalog_rings()
    bad = 0
    for a in rs:
        phi = sentence_phi_R(a)
        for b in rs:
            bad += evaluate(b.model(), phi) != (ring_isomorphic(a, b) is not None)
    return bad == 0, f"{len(rs)}x{len(rs)} matrix, {bad} mismatches"


def criterion_4():
    rows = []
    for spec in (zmod(2), zmod(3), zmod(4)):
        r = build_ring(spec)
        cat = encode_category(build_skeleton(r, 16))
        rows.append(evaluate(cat.model, xi_sentence(sentence_phi_R(r))))
    f4 = encode_category(build_skeleton(build_ring(poly_quotient(2, [1, 1, 1])), 16))
    neg = not evaluate(f4.model, xi_sentence(sentence_phi_R(build_ring(zmod(4)))))
    return all(rows) and neg, f"xi_R true on {sum(rows)}/3, xi_Z4 over F4 {'false' if neg else 'TRUE'}"


def criterion_5():
    checks, bad = 0, []
    for spec, bound in PINNED_PAIRS:
        rep = formula_oracle_agreement(encode_category(build_skeleton(build_ring(spec), bound)))
        checks += sum(rep.checks.values())
        bad += [(rep.category, d) for d in rep.disagreements]
    return not bad, f"{len(PINNED_PAIRS)} pinned pairs, {checks} checks, {len(bad)} disagreements"


def criterion_6():
    bad = []
    for r in catalog_rings():
        for n in (1, 2, 3):
            a = {c.coefficients for c in enumerate_beautiful(r, n)}
            b = {c.coefficients for c in beautiful_characterization(r, n)}
            if a != b:
                bad.append((r.name, n))
    z6 = len(enumerate_beautiful(build_ring(zmod(6)), 2))
    return not bad and z6 == 4, f"{len(bad)} mismatching (ring, n), zmod(6) n=2 count {z6}"


def criterion_7():
    sentences = ring_sentences()
    ok_filters, reports = True, 0
    failures = []
    for k in (2, 3, 4):
        e = enumerate_filters(k)
        ok_filters &= len(e.ultrafilters) == k and all(bin(u.generator).count("1") == 1 for u in e.ultrafilters)
        for r in catalog_rings():
            for u in e.ultrafilters:
                rep = check_ultrapower_equivalence(r.model(), u, sentences)
                reports += 1
                if not rep.ok:
                    failures.append((r.name, k, u.generator))
    return ok_filters and not failures, (
        f"ultrafilter counts {'ok' if ok_filters else 'WRONG'}, {reports} ultrapowers, {len(failures)} failures")


def criterion_8():
    rec = []
    for spec in (zmod(2), zmod(4), poly_quotient(2, [0, 0, 1])):
        r = build_ring(spec)
        out = recover_end_ring(standard_copies(projective_space(r, 3)))
        rec.append(out.ok and ring_isomorphic(out.ring, r) is not None)
    ops, literal = [], 0
    for spec in (zmod(2), zmod(4)):
        rep = lattice_definable_ops(projective_space(build_ring(spec), 2))
        ops.append(rep.ok)
        literal += len(rep.mismatches["iso_d_literal"])
    return all(rec) and all(ops), (
        f"recovered {sum(rec)}/3 rings, ops agree on {sum(ops)}/2 lattices "
        f"(literal iso_d rejects {literal} zero pairs)")


def criterion_9():
    bad = 0
    pairs = 0
    for spec, n in ((zmod(2), 3), (zmod(4), 2)):
        ps = projective_space(build_ring(spec), n)
        enc, rep = submodule_matrix_encoding(ps)
        mats = [enc.encode(s) for s in ps.subs]
        for i, j in itertools.product(range(len(ps)), repeat=2):
            pairs += 1
            bad += enc.submodule_leq(mats[i], mats[j]) != (ps.subs[i] <= ps.subs[j])
        bad += not rep.ok
    return bad == 0, f"{pairs} submodule pairs, {bad} mismatches"


def criterion_10():
    ok_ids, literal = True, []
    for spec in (zmod(3), zmod(4)):
        rep = check_transvection_identities(build_ring(spec), 3)
        ok_ids &= rep["transvection"].ok and rep["second_corrected"].ok
        literal.append(f"{rep['second_literal'].failures}/{rep['second_literal'].instances}")
    rel_bad = 0
    for spec, n in ((zmod(2), 2), (zmod(3), 2), (zmod(4), 1)):
        r = build_ring(spec)
        g = gl_model(r, n).model
        mr = matrix_ring(r, n).model()
        rel_bad += sum(evaluate(mr, relativize_group_sentence(phi)) != evaluate(g, phi)
                       for phi in group_sentences())
    return ok_ids and rel_bad == 0, (
        f"identities {'pass' if ok_ids else 'FAIL'} (literal second form fails {', '.join(literal)}), "
        f"relativization mismatches {rel_bad}/75")


def criterion_11():
    skipped, failures = strategies.substitution_sweep(1000, seed=0)
    inst = strategies.las_instances(20, seed=0)
    las_bad = sum(match_scheme(s, f) is not None for s, f in inst)
    fx = strategies.deduction_fixtures()
    fx_bad = sum(bool(check_deduction(steps, hyps)) is not want for _, steps, hyps, want in fx)
    return not failures and not las_bad and not fx_bad, (
        f"substitution lemma {1000 - len(failures)}/1000 ({skipped} inadmissible redrawn), "
        f"LAS {len(inst) - las_bad}/{len(inst)}, fixtures {len(fx) - fx_bad}/{len(fx)}")


CRITERIA = [
    (1, "finite-ring Morita check", criterion_1, 60),
    (2, "Gr-encoding soundness", criterion_2, 120),
    (3, "phi_R isomorphism matrix", criterion_3, 60),
    (4, "xi translation", criterion_4, 300),
    (5, "formula vs oracle agreement", criterion_5, 300),
    (6, "beautiful combinations", criterion_6, 60),
    (7, "ultraproducts", criterion_7, 60),
    (8, "lattice recovery", criterion_8, 300),
    (9, "matrix encoding", criterion_9, 120),
    (10, "unit groups", criterion_10, 120),
    (11, "logic core", criterion_11, 60),
]


def run_criterion(number, title, fn, limit):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = ok and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {number} ({title}): {detail}; {elapsed:.1f}s / {limit}s"
    return passed, line


@pytest.mark.slow
@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit, capsys):
    passed, line = run_criterion(number, title, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    outcomes = []
    for c in CRITERIA:
        passed, line = run_criterion(*c)
        print(line, flush=True)
        outcomes.append(passed)
    sys.exit(0 if all(outcomes) else 1)
