"""Checking supplied deductions: hypotheses, schemes LAS1-LAS14, MP and Gen.

Steps are compared after rewriting into the primitive basis, so a conjunction
written with And and one written as ~(a -> ~b) are the same formula here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .syntax import (
    And, Atom, Eq, Exists, Forall, Formula, Implies, InadmissibleSubstitution,
    Not, Or, Term, Var, desugar, free_variables, substitute, term_vars,
)


@dataclass(frozen=True)
class Hyp:
    pass


@dataclass(frozen=True)
class Axiom:
    scheme: str


@dataclass(frozen=True)
class MP:
    premise: int
    implication: int


@dataclass(frozen=True)
class Gen:
    step: int
    var: Var


Justification = Union[Hyp, Axiom, MP, Gen]


@dataclass(frozen=True)
class Step:
    formula: Formula
    why: Justification


@dataclass(frozen=True)
class Verdict:
    ok: bool
    index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


# ---- scheme matching -------------------------------------------------------

class _Meta:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


A, B, C = _Meta("phi"), _Meta("psi"), _Meta("chi")


def _and(x, y):
    return Not(Implies(x, Not(y)))


def _or(x, y):
    return Implies(Not(x), y)


PROPOSITIONAL = {
    "LAS1": Implies(A, Implies(B, A)),
    "LAS2": Implies(Implies(A, Implies(B, C)), Implies(Implies(A, B), Implies(A, C))),
    "LAS3": Implies(_and(A, B), A),
    "LAS4": Implies(_and(A, B), B),
    "LAS5": Implies(A, Implies(B, _and(A, B))),
    "LAS6": Implies(A, _or(A, B)),
    "LAS7": Implies(B, _or(A, B)),
    "LAS8": Implies(Implies(A, C), Implies(Implies(B, C), Implies(_or(A, B), C))),
    "LAS9": Implies(Implies(A, B), Implies(Implies(A, Not(B)), Not(A))),
    "LAS10": Implies(Not(Not(A)), A),
}

SCHEMES = tuple(PROPOSITIONAL) + ("LAS11", "LAS12", "LAS13", "LAS14")


def _match(pattern, f, binding: dict) -> bool:
    if isinstance(pattern, _Meta):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = f
            return True
        return bound == f
    if type(pattern) is not type(f):
        return False
    if isinstance(pattern, Not):
        return _match(pattern.body, f.body, binding)
    if isinstance(pattern, Implies):
        return _match(pattern.left, f.left, binding) and _match(pattern.right, f.right, binding)
    raise TypeError("unexpected pattern node")


def _exists(v, body):
    return Not(Forall(v, Not(body)))


def _as_exists(f):
    """Recognize the primitive shape of an existential: ~forall v. ~body."""
    if isinstance(f, Not) and isinstance(f.body, Forall) and isinstance(f.body.body, Not):
        return f.body.var, f.body.body.body
    return None


_UNSET = object()


def _find_instance_term(phi: Formula, v: Var, target: Formula):
    """The term t with phi(v || t) == target, if phi and target differ only there."""
    found = [_UNSET]

    def term_walk(a: Term, b: Term) -> bool:
        if a == v:
            if found[0] is _UNSET:
                found[0] = b
                return True
            return found[0] == b
        if type(a) is not type(b):
            return False
        if isinstance(a, Var) or not hasattr(a, "args"):
            return a == b
        return a.func == b.func and len(a.args) == len(b.args) and all(
            term_walk(x, y) for x, y in zip(a.args, b.args))

    def walk(f, g, shadowed: bool) -> bool:
        if type(f) is not type(g):
            return False
        if shadowed:
            return f == g
        if isinstance(f, Atom):
            return f.pred == g.pred and len(f.args) == len(g.args) and all(
                term_walk(x, y) for x, y in zip(f.args, g.args))
        if isinstance(f, Eq):
            return term_walk(f.left, g.left) and term_walk(f.right, g.right)
        if isinstance(f, Not):
            return walk(f.body, g.body, False)
        if isinstance(f, Implies):
            return walk(f.left, g.left, False) and walk(f.right, g.right, False)
        if isinstance(f, Forall):
            return f.var == g.var and walk(f.body, g.body, f.var == v)
        raise TypeError("expected a primitive formula")

    if not walk(phi, target, False):
        return None
    return v if found[0] is _UNSET else found[0]


def _instance_of_specialization(phi: Formula, v: Var, target: Formula) -> str | None:
    """None when target = phi(v || t) for an admissible t, else the reason."""
    t = _find_instance_term(phi, v, target)
    if t is None:
        return "consequent is not an instance of the quantified body"
    if getattr(t, "sort", v.sort) != v.sort and isinstance(t, Var):
        return "sort mismatch in the instantiated term"
    try:
        if substitute(phi, v, t) != target:
            return "consequent is not an instance of the quantified body"
    except InadmissibleSubstitution as exc:
        return f"inadmissible substitution: {exc}"
    return None


def match_scheme(scheme: str, formula: Formula) -> str | None:
    """None if formula is an instance of the scheme, otherwise why not."""
    f = desugar(formula)
    if scheme in PROPOSITIONAL:
        return None if _match(PROPOSITIONAL[scheme], f, {}) else f"not an instance of {scheme}"
    if not isinstance(f, Implies):
        return f"{scheme} instances are implications"
    left, right = f.left, f.right
    if scheme == "LAS11":
        # (forall v phi) -> phi(v || t)
        if not isinstance(left, Forall):
            return "LAS11 needs a universal antecedent"
        return _instance_of_specialization(left.body, left.var, right)
    if scheme == "LAS12":
        # phi(v || t) -> exists v phi
        ex = _as_exists(right)
        if ex is None:
            return "LAS12 needs an existential consequent"
        v, phi = ex
        return _instance_of_specialization(phi, v, left)
    if scheme == "LAS13":
        # forall v (psi -> phi) -> (psi -> forall v phi), v not free in psi
        if not (isinstance(left, Forall) and isinstance(left.body, Implies)
                and isinstance(right, Implies) and isinstance(right.right, Forall)):
            return "not shaped like LAS13"
        v, psi, phi = left.var, left.body.left, left.body.right
        if right.left != psi or right.right.var != v or right.right.body != phi:
            return "not an instance of LAS13"
        if v in free_variables(psi):
            return f"{v.name} is free in the antecedent"
        return None
    if scheme == "LAS14":
        # forall v (phi -> psi) -> (exists v phi -> psi), v not free in psi
        if not (isinstance(left, Forall) and isinstance(left.body, Implies) and isinstance(right, Implies)):
            return "not shaped like LAS14"
        v, phi, psi = left.var, left.body.left, left.body.right
        ex = _as_exists(right.left)
        if ex is None or ex != (v, phi) or right.right != psi:
            return "not an instance of LAS14"
        if v in free_variables(psi):
            return f"{v.name} is free in the consequent"
        return None
    raise ValueError(f"unknown scheme {scheme!r}")


def check_deduction(steps: Sequence[Step], hypotheses: Iterable[Formula]) -> Verdict:
    if not steps:
        raise ValueError("empty deduction")
    hyps = list(hypotheses)
    hyp_forms = {desugar(h) for h in hyps}
    hyp_free = set()
    for h in hyps:
        hyp_free |= free_variables(h)
    seen: list[Formula] = []
    for i, st in enumerate(steps):
        f = desugar(st.formula)
        why = st.why
        if isinstance(why, Hyp):
            if f not in hyp_forms:
                return Verdict(False, i, "not among the hypotheses")
        elif isinstance(why, Axiom):
            if why.scheme not in SCHEMES:
                return Verdict(False, i, f"unknown scheme {why.scheme}")
            reason = match_scheme(why.scheme, st.formula)
            if reason is not None:
                return Verdict(False, i, reason)
        elif isinstance(why, MP):
            j, k = why.premise, why.implication
            if not (0 <= j < i and 0 <= k < i):
                return Verdict(False, i, "MP must cite earlier steps")
            imp = seen[k]
            if not (isinstance(imp, Implies) and imp.left == seen[j] and imp.right == f):
                return Verdict(False, i, f"steps {j} and {k} do not yield this formula by MP")
        elif isinstance(why, Gen):
            j = why.step
            if not 0 <= j < i:
                return Verdict(False, i, "Gen must cite an earlier step")
            if f != Forall(why.var, seen[j]):
                return Verdict(False, i, "formula is not the generalization of the cited step")
            if why.var in hyp_free:
                return Verdict(False, i, f"{why.var.name} is free in a hypothesis")
        else:
            return Verdict(False, i, "unknown justification")
        seen.append(f)
    return Verdict(True)


def instantiate(scheme: str, phi: Formula, psi: Formula | None = None, chi: Formula | None = None) -> Formula:
    """The propositional scheme with its metavariables replaced (readable connectives kept)."""
    shapes = {
        "LAS1": lambda a, b, c: Implies(a, Implies(b, a)),
        "LAS2": lambda a, b, c: Implies(Implies(a, Implies(b, c)), Implies(Implies(a, b), Implies(a, c))),
        "LAS3": lambda a, b, c: Implies(And(a, b), a),
        "LAS4": lambda a, b, c: Implies(And(a, b), b),
        "LAS5": lambda a, b, c: Implies(a, Implies(b, And(a, b))),
        "LAS6": lambda a, b, c: Implies(a, Or(a, b)),
        "LAS7": lambda a, b, c: Implies(b, Or(a, b)),
        "LAS8": lambda a, b, c: Implies(Implies(a, c), Implies(Implies(b, c), Implies(Or(a, b), c))),
        "LAS9": lambda a, b, c: Implies(Implies(a, b), Implies(Implies(a, Not(b)), Not(a))),
        "LAS10": lambda a, b, c: Implies(Not(Not(a)), a),
    }
    return shapes[scheme](phi, psi, chi)


def specialization(v: Var, phi: Formula, t: Term) -> Formula:
    """LAS11 instance: (forall v phi) -> phi(v || t)."""
    return Implies(Forall(v, phi), substitute(phi, v, t))


def witness_introduction(v: Var, phi: Formula, t: Term) -> Formula:
    """LAS12 instance: phi(v || t) -> exists v phi."""
    return Implies(substitute(phi, v, t), Exists(v, phi))
