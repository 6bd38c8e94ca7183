"""Random terms, formulas and models over the ring signature."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from modeq.algebra.rings import build_ring, poly_quotient, product, zmod
from modeq.logic import (
    MP, RING_SIGNATURE, And, App, Axiom, Const, Eq, Exists, Forall, Gen, Hyp, Iff, Implies, Not,
    Or, Step, Var, evaluate, evaluate_term, is_admissible, substitute,
)
from modeq.logic.deduction import instantiate, specialization, witness_introduction

VARS = tuple(Var(n, "R") for n in ("x", "y", "z", "w"))
SMALL_RINGS = tuple(build_ring(s) for s in (
    zmod(2), zmod(3), zmod(4), poly_quotient(2, [1, 1, 1]), product(zmod(2), zmod(2))))
MODELS = tuple(r.model() for r in SMALL_RINGS)

# ---- numpy-seeded generators (for fixed-count sweeps) ----


def random_term(rng: np.random.Generator, depth: int = 2):
    k = rng.integers(0, 4 if depth > 0 else 2)
    if k == 0:
        return VARS[rng.integers(len(VARS))]
    if k == 1:
        return Const(("zero", "one")[rng.integers(2)])
    if k == 2:
        return App(("add", "mul")[rng.integers(2)], (random_term(rng, depth - 1), random_term(rng, depth - 1)))
    return App("neg", (random_term(rng, depth - 1),))


def random_formula(rng: np.random.Generator, depth: int = 3):
    k = rng.integers(0, 8 if depth > 0 else 1)
    if k == 0:
        return Eq(random_term(rng, 1), random_term(rng, 1))
    if k == 1:
        return Not(random_formula(rng, depth - 1))
    if k in (2, 3, 4, 5):
        op = (And, Or, Implies, Iff)[k - 2]
        return op(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    q = (Forall, Exists)[k - 6]
    return q(VARS[rng.integers(len(VARS))], random_formula(rng, depth - 1))


# ---- hypothesis strategies ----

variables = st.sampled_from(VARS)
terms = st.recursive(
    st.one_of(variables, st.sampled_from([Const("zero"), Const("one")])),
    lambda sub: st.one_of(
        st.builds(lambda f, a, b: App(f, (a, b)), st.sampled_from(["add", "mul"]), sub, sub),
        st.builds(lambda a: App("neg", (a,)), sub)),
    max_leaves=4)
atoms = st.builds(Eq, terms, terms)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        st.builds(Not, sub),
        st.builds(And, sub, sub), st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub), st.builds(Iff, sub, sub),
        st.builds(Forall, variables, sub), st.builds(Exists, variables, sub)),
    max_leaves=6)
models = st.sampled_from(MODELS)


def assignments(m):
    n = m.carriers["R"]
    return st.fixed_dictionaries({v: st.integers(0, n - 1) for v in VARS})



# ---- fixed sweeps shared by the unit and acceptance tests ----

def substitution_sweep(draws: int, seed: int = 0) -> tuple[int, list]:
    """Check phi[v:=t] under s against phi under s[v := t^s] on admissible draws.

    Returns the number of inadmissible draws skipped and the failing cases.
    """
    rng = np.random.default_rng(seed)
    failures, skipped, done = [], 0, 0
    while done < draws:
        m = MODELS[rng.integers(len(MODELS))]
        phi = random_formula(rng)
        v = VARS[rng.integers(len(VARS))]
        t = random_term(rng)
        if not is_admissible(phi, v, t):
            skipped += 1
            continue
        n = m.carriers["R"]
        s = {w: int(rng.integers(n)) for w in VARS}
        lhs = evaluate(m, substitute(phi, v, t), s)
        rhs = evaluate(m, phi, {**s, v: evaluate_term(m, t, s)})
        if lhs != rhs:
            failures.append((m.name, phi, v, t, s))
        done += 1
    return skipped, failures


def las_instances(count_per_scheme: int, seed: int = 0) -> list:
    """Random instances of every scheme LAS1-LAS14 as (scheme, formula)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count_per_scheme):
        a, b, c = (random_formula(rng, 2) for _ in range(3))
        for k in range(1, 11):
            out.append((f"LAS{k}", instantiate(f"LAS{k}", a, b, c)))
        v = VARS[rng.integers(len(VARS))]
        while True:
            phi, t = random_formula(rng, 2), random_term(rng, 1)
            if is_admissible(phi, v, t):
                break
        out.append(("LAS11", specialization(v, phi, t)))
        out.append(("LAS12", witness_introduction(v, phi, t)))
        # LAS13/14 need v not free in the side formula
        psi = Forall(v, random_formula(rng, 2))
        out.append(("LAS13", Implies(Forall(v, Implies(psi, phi)), Implies(psi, Forall(v, phi)))))
        out.append(("LAS14", Implies(Forall(v, Implies(phi, psi)), Implies(Exists(v, phi), psi))))
    return out


def deduction_fixtures():
    """(name, steps, hypotheses, expected verdict) for the MP and Gen rules."""
    x = VARS[0]
    p = Eq(App("mul", (x, x)), x)
    q = Eq(x, Const("zero"))
    closed = Forall(x, Eq(App("add", (x, Const("zero"))), x))
    mp = [Step(p, Hyp()), Step(Implies(p, q), Hyp()), Step(q, MP(0, 1))]
    las1_mp = [Step(closed, Hyp()),
               Step(Implies(closed, Implies(p, closed)), Axiom("LAS1")),
               Step(Implies(p, closed), MP(0, 1))]
    gen_ok = [Step(closed, Hyp()),
              Step(Implies(closed, Implies(p, closed)), Axiom("LAS1")),
              Step(Implies(p, closed), MP(0, 1)),
              Step(Forall(x, Implies(p, closed)), Gen(2, x))]
    # generalizing over a variable free in a hypothesis
    gen_bad = [Step(p, Hyp()), Step(Forall(x, p), Gen(0, x))]
    return [
        ("mp", mp, [p, Implies(p, q)], True),
        ("las1_mp", las1_mp, [closed], True),
        ("gen", gen_ok, [closed], True),
        ("gen_structural_violation", gen_bad, [p], False),
    ]
