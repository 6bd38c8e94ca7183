"""Categorical notions as formulas over the (Obj, Mor; In, Comp; Id) signature.

Comp(f, g, h) reads h = f o g. Quantifiers over Mor(A, B) are written with an
In guard: forall f (In(f, A, B) -> ...), exists f (In(f, A, B) & ...).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..logic.semantics import evaluate
from ..logic.syntax import (
    And, App, Atom, Eq, Exists, Forall, Formula, Implies, Not, Or, Term, Var, conj, disj,
)
from .model import CategoryModel


class Names:
    """Fresh variable names, so nested builders never capture each other."""

    def __init__(self):
        self.counter = itertools.count(1)

    def obj(self, stem: str = "X") -> Var:
        return Var(f"{stem}{next(self.counter)}", "Obj")

    def mor(self, stem: str = "g") -> Var:
        return Var(f"{stem}{next(self.counter)}", "Mor")


def In(f: Term, a: Term, b: Term) -> Formula:
    return Atom("In", (f, a, b))


def Comp(f: Term, g: Term, h: Term) -> Formula:
    return Atom("Comp", (f, g, h))


def Id(a: Term) -> Term:
    return App("Id", (a,))


def all_mor(f: Var, a: Term, b: Term, body: Formula) -> Formula:
    return Forall(f, Implies(In(f, a, b), body))


def ex_mor(f: Var, a: Term, b: Term, body: Formula) -> Formula:
    return Exists(f, And(In(f, a, b), body))


def on_morphism(nm: Names, f: Var, body) -> Formula:
    """forall A forall B (In(f, A, B) -> body(A, B))."""
    a, b = nm.obj("A"), nm.obj("B")
    return Forall(a, Forall(b, Implies(In(f, a, b), body(a, b))))


def same_composite(nm: Names, f1: Term, g1: Term, f2: Term, g2: Term) -> Formula:
    """f1 o g1 = f2 o g2."""
    h = nm.mor("h")
    return Exists(h, And(Comp(f1, g1, h), Comp(f2, g2, h)))


def different_composite(nm: Names, f1: Term, g1: Term, f2: Term, g2: Term) -> Formula:
    """f1 o g1 != f2 o g2 (both composable)."""
    h = nm.mor("h")
    return Exists(h, And(Comp(f1, g1, h), Not(Comp(f2, g2, h))))


# ---- objects and morphisms -----------------------------------------------------

def left_zero(nm: Names, t: Term) -> Formula:
    x, f, g = nm.obj(), nm.mor("f"), nm.mor()
    return Forall(x, ex_mor(f, t, x, all_mor(g, t, x, Eq(g, f))))


def right_zero(nm: Names, t: Term) -> Formula:
    x, f, g = nm.obj(), nm.mor("f"), nm.mor()
    return Forall(x, ex_mor(f, x, t, all_mor(g, x, t, Eq(g, f))))


def zero_object(nm: Names, t: Term) -> Formula:
    return And(left_zero(nm, t), right_zero(nm, t))


def zero_morphism(nm: Names, f: Var) -> Formula:
    """f factors through a zero object."""
    def body(a, b):
        z, g, h = nm.obj("Z"), nm.mor(), nm.mor("h")
        return Exists(z, And(zero_object(nm, z),
                             ex_mor(g, a, z, ex_mor(h, z, b, Comp(h, g, f)))))
    return on_morphism(nm, f, body)


def composite_is_zero(nm: Names, f: Term, g: Term) -> Formula:
    u = nm.mor("u")
    return Exists(u, And(Comp(f, g, u), zero_morphism(nm, u)))


def composite_is_nonzero(nm: Names, f: Term, g: Term) -> Formula:
    u = nm.mor("u")
    return Exists(u, And(Comp(f, g, u), Not(zero_morphism(nm, u))))


def retraction(nm: Names, f: Var) -> Formula:
    def body(a, b):
        g = nm.mor()
        return ex_mor(g, b, a, Comp(f, g, Id(b)))
    return on_morphism(nm, f, body)


def coretraction(nm: Names, f: Var) -> Formula:
    def body(a, b):
        g = nm.mor()
        return ex_mor(g, b, a, Comp(g, f, Id(a)))
    return on_morphism(nm, f, body)


def equivalence(nm: Names, f: Var) -> Formula:
    def body(a, b):
        g = nm.mor()
        return ex_mor(g, b, a, And(Comp(f, g, Id(b)), Comp(g, f, Id(a))))
    return on_morphism(nm, f, body)


def mono(nm: Names, f: Var) -> Formula:
    def body(a, b):
        # f o g1 = h = f o g2 -> g1 = g2, with h bound before g2 so g2 is enumerated from Comp
        c, g1, g2, h = nm.obj("C"), nm.mor(), nm.mor(), nm.mor("h")
        return Forall(c, all_mor(g1, c, a, Forall(h, Implies(Comp(f, g1, h), Forall(g2, Implies(
            And(In(g2, c, a), Comp(f, g2, h)), Eq(g1, g2)))))))
    return on_morphism(nm, f, body)


def epi(nm: Names, f: Var) -> Formula:
    def body(a, b):
        c, g1, g2, h = nm.obj("C"), nm.mor(), nm.mor(), nm.mor("h")
        return Forall(c, all_mor(g1, b, c, Forall(h, Implies(Comp(g1, f, h), Forall(g2, Implies(
            And(In(g2, b, c), Comp(g2, f, h)), Eq(g1, g2)))))))
    return on_morphism(nm, f, body)


def projective(nm: Names, p: Term) -> Formula:
    """Every map from p into the target of an epi f lifts through f."""
    x, y, f, gt, g = nm.obj(), nm.obj("Y"), nm.mor("f"), nm.mor("gt"), nm.mor()
    lift = all_mor(gt, p, y, ex_mor(g, p, x, Comp(f, g, gt)))
    return Forall(x, Forall(y, all_mor(f, x, y, Implies(epi(nm, f), lift))))


def injective(nm: Names, e: Term) -> Formula:
    """Every map into e from the source of a mono f extends along f."""
    x, y, f, gt, g = nm.obj(), nm.obj("Y"), nm.mor("f"), nm.mor("gt"), nm.mor()
    ext = all_mor(gt, x, e, ex_mor(g, y, e, Comp(g, f, gt)))
    return Forall(x, Forall(y, all_mor(f, x, y, Implies(mono(nm, f), ext))))


def generator(nm: Names, a: Term) -> Formula:
    """Distinct parallel maps are told apart by some map out of a."""
    x, y, f, f2, g = nm.obj(), nm.obj("Y"), nm.mor("f"), nm.mor("f"), nm.mor()
    sep = ex_mor(g, a, x, different_composite(nm, f, g, f2, g))
    return Forall(x, Forall(y, all_mor(f, x, y, all_mor(f2, x, y, Implies(Not(Eq(f, f2)), sep)))))


def generator_additive(nm: Names, a: Term) -> Formula:
    """Every nonzero map is nonzero on some map out of a (equivalent to `generator` in additive categories)."""
    x, y, f, g = nm.obj(), nm.obj("Y"), nm.mor("f"), nm.mor()
    sep = ex_mor(g, a, x, composite_is_nonzero(nm, f, g))
    return Forall(x, Forall(y, all_mor(f, x, y, Implies(Not(zero_morphism(nm, f)), sep))))


def cogenerator(nm: Names, a: Term) -> Formula:
    x, y, f, f2, g = nm.obj(), nm.obj("Y"), nm.mor("f"), nm.mor("f"), nm.mor()
    sep = ex_mor(g, y, a, different_composite(nm, g, f, g, f2))
    return Forall(x, Forall(y, all_mor(f, x, y, all_mor(f2, x, y, Implies(Not(Eq(f, f2)), sep)))))


def simp(nm: Names, m: Term) -> Formula:
    """m is nonzero and every mono into m is from a zero object or invertible."""
    x, f = nm.obj(), nm.mor("f")
    return And(Not(zero_object(nm, m)),
               Forall(x, all_mor(f, x, m, Implies(mono(nm, f),
                                                  Or(zero_object(nm, x), equivalence(nm, f))))))


def simple_epimorphic_image(nm: Names, p: Term) -> Formula:
    m, f = nm.obj("M"), nm.mor("f")
    return Exists(m, ex_mor(f, p, m, And(simp(nm, m), epi(nm, f))))


def biproduct(nm: Names, x: Term, m: Term, n: int) -> Formula:
    """x is an n-fold direct sum of m: injections i_a, projections p_a with p_a i_b = delta_ab,
    and the i_a jointly epimorphic."""
    ins = [nm.mor("i") for _ in range(n)]
    prs = [nm.mor("p") for _ in range(n)]
    parts: list[Formula] = [In(i, m, x) for i in ins] + [In(p, x, m) for p in prs]
    for a in range(n):
        for b in range(n):
            if a == b:
                parts.append(Comp(prs[a], ins[b], Id(m)))
            else:
                parts.append(composite_is_zero(nm, prs[a], ins[b]))
    g = nm.mor()
    parts.append(all_mor(g, x, x, Implies(conj([Comp(g, i, i) for i in ins]), Eq(g, Id(x)))))
    body = conj(parts)
    for v in reversed(ins + prs):
        body = Exists(v, body)
    return body


def sum_fin_bounded(nm: Names, x: Term, m: Term, k: int) -> Formula:
    """m simple and x isomorphic to m^n for some 1 <= n <= k."""
    return And(simp(nm, m), disj([biproduct(nm, x, m, n) for n in range(1, k + 1)]))


def pret(nm: Names, p: Term) -> Formula:
    return conj([projective(nm, p), generator(nm, p), simple_epimorphic_image(nm, p)])


def proobr_bounded(nm: Names, p: Term) -> Formula:
    return conj([projective(nm, p), generator_additive(nm, p), simple_epimorphic_image(nm, p)])


def endo_commutative(nm: Names, x: Term) -> Formula:
    f, g = nm.mor("f"), nm.mor()
    return all_mor(f, x, x, all_mor(g, x, x, same_composite(nm, f, g, g, f)))


def comm(nm: Names, x: Term) -> Formula:
    return And(proobr_bounded(nm, x), endo_commutative(nm, x))


def nonunit(nm: Names, f: Term, x: Term) -> Formula:
    f2 = nm.mor("f")
    return all_mor(f2, x, x, Not(And(Comp(f, f2, Id(x)), Comp(f2, f, Id(x)))))


def orthogonal_sum(nm: Names, h: Term, f: Term, g: Term, x: Term) -> Formula:
    """f, g orthogonal idempotents in End(x) and h = f + g = 1: h o f = f, h o g = g,
    and h is the only endomorphism fixing both f and g on the left."""
    k = nm.mor("k")
    return conj([
        Comp(f, f, f), Comp(g, g, g),
        composite_is_zero(nm, f, g), composite_is_zero(nm, g, f),
        Comp(h, f, f), Comp(h, g, g),
        all_mor(k, x, x, Implies(And(Comp(k, f, f), Comp(k, g, g)), Eq(k, h))),
    ])


def local(nm: Names, x: Term) -> Formula:
    # nonunit f, g and orthogonal_sum(h, f, g) imply nonunit h; the hypotheses are
    # curried so each one is tested as soon as its variables are bound
    f, g, h, k = nm.mor("f"), nm.mor(), nm.mor("h"), nm.mor("k")
    at_h = Forall(h, Implies(conj([In(h, x, x), Comp(h, f, f), Comp(h, g, g),
                                   all_mor(k, x, x, Implies(And(Comp(k, f, f), Comp(k, g, g)), Eq(k, h)))]),
                             nonunit(nm, h, x)))
    at_g = Forall(g, Implies(conj([In(g, x, x), Comp(g, g, g), nonunit(nm, g, x),
                                   composite_is_zero(nm, f, g), composite_is_zero(nm, g, f)]), at_h))
    at_f = Forall(f, Implies(conj([In(f, x, x), Comp(f, f, f), nonunit(nm, f, x)]), at_g))
    return And(proobr_bounded(nm, x), at_f)


def principal(nm: Names, x: Term) -> Formula:
    f, g = nm.mor("f"), nm.mor()
    hyp = And(Not(zero_morphism(nm, f)), Not(zero_morphism(nm, g)))
    concl = And(composite_is_nonzero(nm, f, g), composite_is_nonzero(nm, g, f))
    return And(proobr_bounded(nm, x), all_mor(f, x, x, all_mor(g, x, x, Implies(hyp, concl))))


# ---- literal infinite-rank chain (built for inspection; no finite-scale claims) ----

def isomorphic(nm: Names, x: Term, y: Term) -> Formula:
    f = nm.mor("f")
    return ex_mor(f, x, y, equivalence(nm, f))


def direct_sum_of(nm: Names, x: Term, a: Term, b: Term) -> Formula:
    """x is isomorphic to a (+) b."""
    i1, i2, p1, p2, g = nm.mor("i"), nm.mor("i"), nm.mor("p"), nm.mor("p"), nm.mor()
    body = conj([
        In(i1, a, x), In(i2, b, x), In(p1, x, a), In(p2, x, b),
        Comp(p1, i1, Id(a)), Comp(p2, i2, Id(b)),
        composite_is_zero(nm, p1, i2), composite_is_zero(nm, p2, i1),
        all_mor(g, x, x, Implies(And(Comp(g, i1, i1), Comp(g, i2, i2)), Eq(g, Id(x)))),
    ])
    for v in (p2, p1, i2, i1):
        body = Exists(v, body)
    return body


def summand_of(nm: Names, y: Term, x: Term) -> Formula:
    """exists Q (y = x (+) Q)."""
    q = nm.obj("Q")
    return Exists(q, direct_sum_of(nm, y, x, q))


def subobject(nm: Names, y: Term, x: Term) -> Formula:
    f = nm.mor("f")
    return ex_mor(f, y, x, mono(nm, f))


def sum_omega(nm: Names, x: Term, m: Term) -> Formula:
    y = nm.obj("Y")
    return conj([simp(nm, m), direct_sum_of(nm, x, x, m),
                 Forall(y, Implies(direct_sum_of(nm, y, y, m), summand_of(nm, y, x)))])


def sum_fin(nm: Names, x: Term, m: Term) -> Formula:
    y = nm.obj("Y")
    return And(simp(nm, m), Exists(y, conj([sum_omega(nm, y, m), summand_of(nm, y, x),
                                            Not(isomorphic(nm, x, y))])))


def sum_literal(nm: Names, x: Term, m: Term) -> Formula:
    y, p = nm.obj("Y"), nm.obj("P")
    return And(simp(nm, m), Forall(y, Implies(And(subobject(nm, y, x), Not(zero_object(nm, y))),
                                              Exists(p, direct_sum_of(nm, y, p, m)))))


def under(nm: Names, p: Term, m: Term, n: Term, x: Term, f: Term) -> Formula:
    """f: p -> m the chosen simple image. The second family of p_M ranges over Mor(n, m)."""
    g = nm.mor("g")
    im, pm, i, pp = nm.mor("iM"), nm.mor("pM"), nm.mor("i"), nm.mor("p")
    squares = lambda i_, p_, im_, pm_: And(same_composite(nm, g, i_, im_, f),
                                           same_composite(nm, f, p_, pm_, g))
    lift = all_mor(im, m, n, all_mor(pm, n, m, Implies(
        Comp(pm, im, Id(m)),
        ex_mor(i, p, x, ex_mor(pp, x, p, And(Comp(pp, i, Id(p)), squares(i, pp, im, pm)))))))
    im2, pm2, i2, pp2 = nm.mor("iM"), nm.mor("pM"), nm.mor("i"), nm.mor("p")
    hyp = conj([Comp(pm, im, Id(m)), Comp(pm2, im2, Id(m)), Comp(pp, i, Id(p)), Comp(pp2, i2, Id(p)),
                squares(i, pp, im, pm), squares(i2, pp2, im2, pm2),
                composite_is_zero(nm, pm, im2), composite_is_zero(nm, pm2, im)])
    concl = And(composite_is_zero(nm, pp, i2), composite_is_zero(nm, pp2, i))
    disjoint = all_mor(im, m, n, all_mor(im2, m, n, all_mor(pm, n, m, all_mor(pm2, n, m, all_mor(
        i, p, x, all_mor(i2, p, x, all_mor(pp, x, p, all_mor(pp2, x, p, Implies(hyp, concl)))))))))
    return And(sum_fin(nm, n, m), ex_mor(g, x, n, conj([epi(nm, g), lift, disjoint])))


def und(nm: Names, p: Term, m: Term, n: Term, x2: Term, f: Term) -> Formula:
    x = nm.obj("X")
    return Forall(x, Implies(under(nm, p, m, n, x, f), summand_of(nm, x, x2)))


def finite(nm: Names, p: Term, x: Term) -> Formula:
    m, f, y = nm.obj("M"), nm.mor("f"), nm.obj("Y")
    return Exists(m, ex_mor(f, p, m, conj([simp(nm, m), epi(nm, f),
                                           Exists(y, And(sum_fin(nm, y, m), und(nm, p, m, y, x, f)))])))


def proobr(nm: Names, p: Term) -> Formula:
    s, x = nm.obj("S"), nm.obj("X")
    return And(pret(nm, p), Forall(s, Implies(pret(nm, s), Exists(
        x, And(finite(nm, s, x), summand_of(nm, x, p))))))


# ---- the named inventory ---------------------------------------------------------

@dataclass(frozen=True)
class FormulaSpec:
    builder: object
    params: tuple[tuple[str, str], ...]   # (variable name, sort)
    description: str


def _obj(b):
    return lambda nm, args: b(nm, args[0])


def _multi(b):
    return lambda nm, args: b(nm, *args)


_INVENTORY: dict[str, FormulaSpec] = {
    "equivalence": FormulaSpec(_obj(equivalence), (("f", "Mor"),), "f has a two-sided inverse"),
    "left_zero": FormulaSpec(_obj(left_zero), (("T", "Obj"),), "exactly one map from T to each object"),
    "right_zero": FormulaSpec(_obj(right_zero), (("T", "Obj"),), "exactly one map from each object to T"),
    "zero_object": FormulaSpec(_obj(zero_object), (("T", "Obj"),), "left and right zero"),
    "zero_morphism": FormulaSpec(_obj(zero_morphism), (("f", "Mor"),), "f factors through a zero object"),
    "retraction": FormulaSpec(_obj(retraction), (("f", "Mor"),), "f has a right inverse"),
    "coretraction": FormulaSpec(_obj(coretraction), (("f", "Mor"),), "f has a left inverse"),
    "mono": FormulaSpec(_obj(mono), (("f", "Mor"),), "f is left cancellable"),
    "epi": FormulaSpec(_obj(epi), (("f", "Mor"),), "f is right cancellable"),
    "projective": FormulaSpec(_obj(projective), (("P", "Obj"),), "maps from P lift along epis"),
    "injective": FormulaSpec(_obj(injective), (("E", "Obj"),), "maps into E extend along monos"),
    "generator": FormulaSpec(_obj(generator), (("G", "Obj"),), "maps out of G separate parallel maps"),
    "generator_additive": FormulaSpec(_obj(generator_additive), (("G", "Obj"),),
                                      "maps out of G detect nonzero maps"),
    "cogenerator": FormulaSpec(_obj(cogenerator), (("G", "Obj"),), "maps into G separate parallel maps"),
    "simp": FormulaSpec(_obj(simp), (("M", "Obj"),), "M is simple"),
    "pret": FormulaSpec(_obj(pret), (("P", "Obj"),), "projective generator with a simple epimorphic image"),
    "proobr_bounded": FormulaSpec(_obj(proobr_bounded), (("P", "Obj"),),
                                  "projective, additive generator, simple epimorphic image"),
    "comm": FormulaSpec(_obj(comm), (("X", "Obj"),), "proobr_bounded with commutative endomorphisms"),
    "local": FormulaSpec(_obj(local), (("X", "Obj"),),
                         "proobr_bounded and no splitting of 1 into two orthogonal nonunit idempotents"),
    "principal": FormulaSpec(_obj(principal), (("X", "Obj"),),
                             "proobr_bounded and no zero divisors among endomorphisms"),
    # literal infinite-rank chain: constructible, no finite-scale semantics claimed
    "isomorphic": FormulaSpec(_multi(isomorphic), (("X", "Obj"), ("Y", "Obj")), "X and Y are isomorphic"),
    "direct_sum_of": FormulaSpec(_multi(direct_sum_of), (("X", "Obj"), ("A", "Obj"), ("B", "Obj")),
                                 "X is isomorphic to A (+) B"),
    "sum_omega": FormulaSpec(_multi(sum_omega), (("X", "Obj"), ("M", "Obj")),
                             "X absorbs M and is a summand of everything absorbing M"),
    "sum_fin": FormulaSpec(_multi(sum_fin), (("X", "Obj"), ("M", "Obj")),
                           "X a proper summand of the countable sum of M"),
    "sum": FormulaSpec(_multi(sum_literal), (("X", "Obj"), ("M", "Obj")),
                       "every nonzero subobject of X splits off M"),
    "under": FormulaSpec(_multi(under), (("P", "Obj"), ("M", "Obj"), ("N", "Obj"), ("X", "Obj"), ("f", "Mor")),
                         "X maps onto N compatibly with copies of P over copies of M"),
    "und": FormulaSpec(_multi(und), (("P", "Obj"), ("M", "Obj"), ("N", "Obj"), ("X", "Obj"), ("f", "Mor")),
                       "X is a summand of every object satisfying under"),
    "finite": FormulaSpec(_multi(finite), (("P", "Obj"), ("X", "Obj")), "X sits between finite powers of P"),
    "proobr": FormulaSpec(_obj(proobr), (("P", "Obj"),), "pret and a summand of a finite object for every pret"),
}

FORMULA_NAMES = tuple(_INVENTORY) + ("sum_fin_bounded",)


def _parse_name(name: str) -> tuple[str, int | None]:
    """'sum_fin_bounded(3)' -> ('sum_fin_bounded', 3)."""
    if name.startswith("sum_fin_bounded"):
        rest = name[len("sum_fin_bounded"):]
        if not rest:
            return "sum_fin_bounded", 2
        if rest.startswith("(") and rest.endswith(")") and rest[1:-1].isdigit():
            return "sum_fin_bounded", int(rest[1:-1])
        raise KeyError(f"unknown formula name {name!r}")
    if name not in _INVENTORY:
        raise KeyError(f"unknown formula name {name!r}")
    return name, None


def formula_params(name: str) -> tuple[Var, ...]:
    base, _ = _parse_name(name)
    if base == "sum_fin_bounded":
        return (Var("X", "Obj"), Var("M", "Obj"))
    return tuple(Var(n, s) for n, s in _INVENTORY[base].params)


@functools.lru_cache(maxsize=None)
def build_named_formula(name: str) -> Formula:
    """The formula for a named notion; its free variables are formula_params(name)."""
    base, k = _parse_name(name)
    nm = Names()
    params = formula_params(name)
    if base == "sum_fin_bounded":
        return sum_fin_bounded(nm, params[0], params[1], k)
    return _INVENTORY[base].builder(nm, params)


def eval_named_formula(cat: CategoryModel, name: str, args: Sequence[int] | Mapping[str, int]) -> bool:
    """Evaluate a named formula at the given objects/morphisms (results cached per model)."""
    params = formula_params(name)
    if isinstance(args, Mapping):
        values = tuple(args[v.name] for v in params)
    else:
        values = tuple(args)
        if len(values) != len(params):
            raise ValueError(f"{name} takes {len(params)} argument(s)")
    for v, x in zip(params, values):
        if not 0 <= x < cat.model.carriers[v.sort]:
            raise ValueError(f"argument {v.name}={x} outside sort {v.sort}")
    key = (name, values)
    with cat._lock:
        hit = cat._results.get(key)
        if hit is None:
            phi = build_named_formula(name)
            hit = evaluate(cat.model, phi, dict(zip(params, values)))
            cat._results[key] = hit
    return hit
