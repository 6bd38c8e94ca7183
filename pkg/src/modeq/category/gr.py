"""Ring structure on Mor(P, P) from composition alone, and ring sentences as category sentences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..algebra.rings import FiniteRing, verify_ring_axioms
from ..logic.syntax import (
    And, App, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Term, Var, conj,
    is_sentence,
)
from .formulas import (
    Comp, Id, In, Names, composite_is_zero, proobr_bounded, zero_morphism,
)
from .model import CategoryModel


class NoPairing(ValueError):
    pass


# ---- computing with the category structure only --------------------------------

def zero_objects(cat: CategoryModel) -> list[int]:
    b = cat.blocks
    return [z for z in cat.objects()
            if all(b.count[(z, x)] == 1 and b.count[(x, z)] == 1 for x in cat.objects())]


def zero_map(cat: CategoryModel, a: int, c: int) -> int:
    """The morphism a -> c that factors through a zero object."""
    zs = zero_objects(cat)
    if not zs:
        raise NoPairing("the category has no zero object")
    z = zs[0]
    g = cat.morphisms(a, z)[0]
    h = cat.morphisms(z, c)[0]
    return cat.compose(h, g)


@dataclass(frozen=True)
class Pairing:
    """Q with i1, i2: P -> Q and p1, p2: Q -> P, p_a i_b = delta_ab, i1 and i2 jointly epimorphic."""
    q: int
    i1: int
    i2: int
    p1: int
    p2: int


def pairings(cat: CategoryModel, p: int) -> Iterator[Pairing]:
    """All pairings for the object p, in a fixed order."""
    comp = cat.model.relations["Comp"]
    one_p = cat.identity(p)
    zero_pp = zero_map(cat, p, p)
    b = cat.blocks
    for q in cat.objects():
        # Mor(X, P (+) P) = Mor(X, P)^2 for every X
        if any(b.count[(x, q)] != b.count[(x, p)] ** 2 for x in cat.objects()):
            continue
        one_q = cat.identity(q)
        ins = cat.morphisms(p, q)
        for i1 in ins:
            for p1 in comp.candidates(0, (None, i1, one_p)):
                for i2 in ins:
                    if cat.compose(p1, i2) != zero_pp:
                        continue
                    for p2 in comp.candidates(0, (None, i2, one_p)):
                        if cat.compose(p2, i1) != zero_pp:
                            continue
                        fix1 = set(comp.candidates(0, (None, i1, i1)))
                        fix = [g for g in comp.candidates(0, (None, i2, i2)) if g in fix1]
                        if fix == [one_q]:
                            yield Pairing(q, i1, i2, p1, p2)


def find_pairing(cat: CategoryModel, p: int) -> Pairing:
    for pr in pairings(cat, p):
        return pr
    raise NoPairing(f"no object of the skeleton is a direct sum of object {p} with itself")


def gr_map(cat: CategoryModel, p: int, pr: Pairing) -> dict[int, int]:
    """f -> Gr_f, the unique a: Q -> Q with p1 a i1 = 1, p2 a i2 = 1, p2 a i1 = 0, p1 a i2 = f."""
    one_p = cat.identity(p)
    zero_pp = zero_map(cat, p, p)
    c = cat.compose
    out: dict[int, int] = {}
    for a in cat.morphisms(pr.q, pr.q):
        ai1, ai2 = c(a, pr.i1), c(a, pr.i2)
        if c(pr.p1, ai1) == one_p and c(pr.p2, ai2) == one_p and c(pr.p2, ai1) == zero_pp:
            f = c(pr.p1, ai2)
            if f in out:
                raise ValueError("Gr is not well defined: two graphs for one endomorphism")
            out[f] = a
    missing = [f for f in cat.morphisms(p, p) if f not in out]
    if missing:
        raise ValueError(f"no graph morphism for endomorphism {missing[0]}")
    return out


@dataclass
class GrCertificate:
    ring: FiniteRing
    pairing: Pairing
    gr: dict[int, int]
    elements: list[int]                       # ring element k <-> morphism elements[k]


def ring_from_endo_monoid(cat: CategoryModel, p: int, pairing: Pairing | None = None) -> FiniteRing:
    return gr_certificate(cat, p, pairing).ring


def gr_certificate(cat: CategoryModel, p: int, pairing: Pairing | None = None) -> GrCertificate:
    pr = pairing or find_pairing(cat, p)
    gr = gr_map(cat, p, pr)
    elems = list(cat.morphisms(p, p))
    pos = {f: k for k, f in enumerate(elems)}
    inv_gr = {a: f for f, a in gr.items()}
    n = len(elems)
    add = np.empty((n, n), dtype=np.int64)
    mul = np.empty((n, n), dtype=np.int64)
    for x, f in enumerate(elems):
        for y, g in enumerate(elems):
            s = inv_gr.get(cat.compose(gr[f], gr[g]))
            if s is None:
                raise ValueError("Gr_f o Gr_g is not a graph morphism")
            add[x, y] = pos[s]
            mul[x, y] = pos[cat.compose(f, g)]
    zero = pos[zero_map(cat, p, p)]
    one = pos[cat.identity(p)]
    verify_ring_axioms(add, mul, zero, one)
    name = f"Gr({cat.skeleton.modules[p].name})"
    ring = FiniteRing(add, mul, zero, one, tuple(f"m{f}" for f in elems), name)
    return GrCertificate(ring, pr, gr, elems)


# ---- translating ring sentences ---------------------------------------------------

P_VAR = Var("P", "Obj")


class _Translator:
    def __init__(self):
        self.nm = Names()
        self.uses_sum = False
        self.q = Var("Q", "Obj")
        self.i1, self.i2 = Var("i1", "Mor"), Var("i2", "Mor")
        self.p1, self.p2 = Var("p1", "Mor"), Var("p2", "Mor")

    @staticmethod
    def var(v: Var) -> Var:
        return Var(f"r_{v.name}", "Mor")

    def endo(self, v: Term) -> Formula:
        return In(v, P_VAR, P_VAR)

    # Gr_a encodes f
    def gr(self, a: Var, f: Term) -> Formula:
        u1, u2 = self.nm.mor("u"), self.nm.mor("u")
        first = Exists(u1, conj([Comp(a, self.i1, u1), Comp(self.p1, u1, Id(P_VAR)),
                                 composite_is_zero(self.nm, self.p2, u1)]))
        second = Exists(u2, conj([Comp(a, self.i2, u2), Comp(self.p2, u2, Id(P_VAR)),
                                  Comp(self.p1, u2, f)]))
        return conj([In(a, self.q, self.q), first, second])

    def sum(self, x: Term, y: Term, z: Term) -> Formula:
        """x = y + z, i.e. Gr_x = Gr_y o Gr_z."""
        self.uses_sum = True
        a, b, c = self.nm.mor("a"), self.nm.mor("b"), self.nm.mor("c")
        body = conj([self.gr(a, y), self.gr(b, z), self.gr(c, x), Comp(a, b, c)])
        return Exists(a, Exists(b, Exists(c, body)))

    def is_zero(self, u: Term) -> Formula:
        return And(self.endo(u), zero_morphism(self.nm, u))

    def pairing(self) -> Formula:
        P, q = P_VAR, self.q
        i1, i2, p1, p2 = self.i1, self.i2, self.p1, self.p2
        g = self.nm.mor()
        return conj([
            In(i1, P, q), In(i2, P, q), In(p1, q, P), In(p2, q, P),
            Comp(p1, i1, Id(P)), Comp(p2, i2, Id(P)),
            composite_is_zero(self.nm, p1, i2), composite_is_zero(self.nm, p2, i1),
            Forall(g, Implies(And(In(g, q, q), And(Comp(g, i1, i1), Comp(g, i2, i2))), Eq(g, Id(q)))),
        ])

    # terms: a morphism term plus defining clauses for fresh variables
    def term(self, t: Term, defs: list[tuple[Var, Formula]]) -> Term:
        if isinstance(t, Var):
            return self.var(t)
        if isinstance(t, Const):
            if t.name == "one":
                return Id(P_VAR)
            if t.name == "zero":
                u = self.nm.mor("z")
                defs.append((u, self.is_zero(u)))
                return u
            raise ValueError(f"unknown ring constant {t.name}")
        if isinstance(t, App):
            u = self.nm.mor("t")
            defs.append((u, self.app_equals(u, t, defs)))
            return u
        raise TypeError(t)

    def app_equals(self, x: Term, t: App, defs) -> Formula:
        """x = t for an application t, args flattened into defs."""
        if t.func == "mul":
            a, b = (self.term(s, defs) for s in t.args)
            return Comp(a, b, x)
        if t.func == "add":
            a, b = (self.term(s, defs) for s in t.args)
            return And(self.endo(x), self.sum(x, a, b))
        if t.func == "neg":
            a = self.term(t.args[0], defs)
            z = self.nm.mor("z")
            return And(self.endo(x), Exists(z, And(self.is_zero(z), self.sum(z, a, x))))
        raise ValueError(f"unknown ring function {t.func}")

    def equation(self, left: Term, right: Term) -> Formula:
        defs: list[tuple[Var, Formula]] = []
        if isinstance(right, App) and not isinstance(left, App):
            lv = self.term(left, defs)
            core = self.app_equals(lv, right, defs)
        elif isinstance(left, App) and not isinstance(right, App):
            rv = self.term(right, defs)
            core = self.app_equals(rv, left, defs)
        else:
            core = Eq(self.term(left, defs), self.term(right, defs))
        body = conj([d for _, d in defs] + [core])
        for v, _ in reversed(defs):
            body = Exists(v, body)
        return body

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, Eq):
            return self.equation(f.left, f.right)
        if isinstance(f, Not):
            return Not(self.formula(f.body))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(self.formula(f.left), self.formula(f.right))
        if isinstance(f, Forall):
            v = self.var(f.var)
            return Forall(v, Implies(self.endo(v), self.formula(f.body)))
        if isinstance(f, Exists):
            v = self.var(f.var)
            return Exists(v, And(self.endo(v), self.formula(f.body)))
        raise ValueError(f"unsupported formula for the ring signature: {f!r}")


def ring_sentence_to_category(phi: Formula) -> Formula:
    """phi relativized to the ring (Mor(P, P), +, o) with free object variable P.

    Addition is read through graph morphisms of a pairing (Q, i1, i2, p1, p2),
    quantified once in front when the sentence needs it.
    """
    if not is_sentence(phi):
        raise ValueError("expected a sentence over the ring signature")
    tr = _Translator()
    body = tr.formula(phi)
    if not tr.uses_sum:
        return body
    out = And(tr.pairing(), body)
    for v in (tr.p2, tr.p1, tr.i2, tr.i1, tr.q):
        out = Exists(v, out)
    return out


def xi_sentence(phi: Formula) -> Formula:
    """exists P (proobr_bounded(P) & phi over Mor(P, P))."""
    return Exists(P_VAR, And(proobr_bounded(Names(), P_VAR), ring_sentence_to_category(phi)))
