import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modeq.logic import (
    GROUP_SIGNATURE, RING_SIGNATURE, App, Axiom, Const, Eq, Exists, Forall, FormulaSyntaxError,
    Implies, InadmissibleSubstitution, Not, Signature, SortError, Step, Var, check_deduction,
    desugar, evaluate, evaluate_naive, evaluate_term, format_formula, free_variables,
    is_admissible, match_scheme, models_isomorphic, parse_formula, sampled_equivalence, substitute,
)
from modeq.samples import group_sentences, ring_sentences

import strategies as S
from conftest import ring

x, y, z = (Var(n, "R") for n in "xyz")


def test_parse_and_print():
    phi = parse_formula("forall x:R. exists y:R. mul(x, y) = one | x = zero", RING_SIGNATURE)
    assert isinstance(phi, Forall) and isinstance(phi.body, Exists)
    assert parse_formula(format_formula(phi), RING_SIGNATURE) == phi


@pytest.mark.parametrize("text", ["forall x:R. ", "mul(x) = x", "x = = y", "forall x:Q. x = x"])
def test_parse_rejects(text):
    with pytest.raises((FormulaSyntaxError, SortError, ValueError)):
        parse_formula(text, RING_SIGNATURE)


def test_free_variables():
    phi = parse_formula("forall x:R. mul(x, y) = z", RING_SIGNATURE)
    assert {v.name for v in free_variables(phi)} == {"y", "z"}


def test_substitution_capture_raises():
    phi = Forall(x, Eq(x, y))
    with pytest.raises(InadmissibleSubstitution):
        substitute(phi, y, x)
    assert substitute(phi, y, z) == Forall(x, Eq(x, z))
    # bound occurrences are untouched
    assert substitute(phi, x, z) == phi


def test_substitution_sort_checked():
    g = Var("g", "G")
    with pytest.raises(SortError):
        substitute(Eq(x, x), x, g, RING_SIGNATURE)


def test_signature_roundtrip():
    for sig in (RING_SIGNATURE, GROUP_SIGNATURE):
        assert Signature.from_json(sig.to_json()) == sig


def test_idempotent_counts_separate_z4_z6():
    phi = parse_formula("exists x:R. mul(x, x) = x & x != zero & x != one", RING_SIGNATURE)
    assert not evaluate(ring("Z4").model(), phi)
    assert evaluate(ring("Z6").model(), phi)


def test_models_isomorphic():
    assert models_isomorphic(ring("Z4").model(), ring("Z2xZ2").model()) is None
    from modeq.algebra import build_ring, product, zmod
    z2z3 = build_ring(product(zmod(2), zmod(3)))
    assert models_isomorphic(ring("Z6").model(), z2z3.model()) is not None


def test_sampled_equivalence_finds_separator():
    rep = sampled_equivalence(ring("Z4").model(), ring("Z2xZ2").model(), ring_sentences())
    assert not rep.agree and rep.disagreements


def test_samples_parse():
    assert len(ring_sentences()) == 25 and len(group_sentences()) == 25


def test_deduction_fixtures():
    for name, steps, hyps, want in S.deduction_fixtures():
        assert bool(check_deduction(steps, hyps)) is want, name


def test_las_instances_accepted():
    for scheme, f in S.las_instances(10, seed=1):
        assert match_scheme(scheme, f) is None, (scheme, format_formula(f))


def test_las_side_conditions():
    p = Eq(x, Const("zero"))
    # x free in the side formula
    assert match_scheme("LAS13", Implies(Forall(x, Implies(p, p)), Implies(p, Forall(x, p)))) is not None
    # captured specialization
    body = Exists(y, Eq(x, y))
    assert match_scheme("LAS11", Implies(Forall(x, body), Exists(y, Eq(y, y)))) is not None
    assert check_deduction([Step(Eq(x, x), Axiom("LAS1"))], []).ok is False


def test_substitution_lemma_sweep():
    _, failures = S.substitution_sweep(300, seed=3)
    assert failures == []


@settings(max_examples=200, deadline=None)
@given(S.formulas)
def test_print_parse_roundtrip(phi):
    assert parse_formula(format_formula(phi), RING_SIGNATURE) == phi


@settings(max_examples=200, deadline=None)
@given(S.models, S.formulas, S.variables, S.terms, st.data())
def test_substitution_lemma(m, phi, v, t, data):
    s = data.draw(S.assignments(m))
    if not is_admissible(phi, v, t):
        with pytest.raises(InadmissibleSubstitution):
            substitute(phi, v, t)
        return
    assert evaluate(m, substitute(phi, v, t), s) == evaluate(m, phi, {**s, v: evaluate_term(m, t, s)})


@settings(max_examples=200, deadline=None)
@given(S.models, S.formulas, st.data())
def test_abbreviations_sound(m, phi, data):
    s = data.draw(S.assignments(m))
    assert evaluate(m, phi, s) == evaluate(m, desugar(phi), s) == evaluate_naive(m, phi, s)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([f"LAS{k}" for k in range(1, 11)]), S.formulas, S.formulas, S.formulas)
def test_propositional_instances(scheme, a, b, c):
    from modeq.logic.deduction import instantiate
    assert match_scheme(scheme, instantiate(scheme, a, b, c)) is None


@settings(max_examples=100, deadline=None)
@given(S.models, st.sampled_from([f"LAS{k}" for k in range(1, 11)]), S.formulas, S.formulas, S.formulas)
def test_propositional_instances_valid(m, scheme, a, b, c):
    from modeq.logic.deduction import instantiate
    f = instantiate(scheme, a, b, c)
    body = f
    for v in sorted(free_variables(f), key=lambda v: v.name):
        body = Forall(v, body)
    assert evaluate(m, body)


def test_evaluate_term():
    m = ring("Z4").model()
    assert evaluate_term(m, App("add", (x, Const("one"))), {x: 3}) == 0


def test_unused_existential_block():
    one = Const("one")
    m = ring("Z4").model()
    assert evaluate(m, Exists(x, Exists(y, Eq(one, one))))
    assert not evaluate(m, Exists(x, Exists(y, Eq(one, Const("zero")))))
