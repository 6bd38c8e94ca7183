"""Unit groups of matrix rings, matrix units, commutator identities and relativized group sentences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import caps
from .algebra.rings import FiniteRing, _matrix, build_ring, matrix
from .algebra.structure import inverse, units
from .logic.semantics import FiniteModel, FunctionTable
from .logic.syntax import (
    GROUP_SIGNATURE, And, App, Atom, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or,
    Term, Var, free_variables, is_sentence, term_vars,
)


class GroupAxiomError(ValueError):
    pass


# ---- matrix rings and their unit groups ----------------------------------------

def matrix_ring(r: FiniteRing, n: int) -> FiniteRing:
    if r.spec is not None:
        return build_ring(matrix(r.spec, n))
    m = _matrix(r, n)
    m.name = f"M{n}({r.name})"
    return m


def matrix_element(r: FiniteRing, n: int, entries) -> int:
    """Index in matrix_ring(r, n) of the n x n matrix of ring elements (entry (0, 0) most significant)."""
    e = 0
    for row in entries:
        for x in row:
            e = e * r.size + int(x)
    return e


def matrix_entries(r: FiniteRing, n: int, e: int) -> np.ndarray:
    out = np.empty(n * n, dtype=np.int64)
    for k in range(n * n - 1, -1, -1):
        out[k] = e % r.size
        e //= r.size
    return out.reshape(n, n)


@dataclass
class GroupModel:
    model: FiniteModel
    ring: FiniteRing                 # the ring whose units form the carrier
    elements: tuple[int, ...]        # group element k is ring element elements[k]

    @property
    def order(self) -> int:
        return len(self.elements)


def verify_group_axioms(mul: np.ndarray, inv: np.ndarray, one: int) -> None:
    n = mul.shape[0]
    idx = np.arange(n)
    if not (np.array_equal(mul[one], idx) and np.array_equal(mul[:, one], idx)):
        raise GroupAxiomError("identity law fails")
    if not (np.all(mul[idx, inv] == one) and np.all(mul[inv, idx] == one)):
        raise GroupAxiomError("inverse law fails")
    if not np.array_equal(mul[mul[:, :, None], idx[None, None, :]], mul[idx[:, None, None], mul[None, :, :]]):
        raise GroupAxiomError("associativity fails")


def unit_group(r: FiniteRing, name: str = "") -> GroupModel:
    us = sorted(units(r))
    pos = {x: k for k, x in enumerate(us)}
    sub = r.mul[np.ix_(us, us)]
    mul = np.vectorize(pos.__getitem__, otypes=[np.int64])(sub)
    inv = np.array([pos[inverse(r, x)] for x in us], dtype=np.int64)
    one = pos[r.one]
    verify_group_axioms(mul, inv, one)
    model = FiniteModel(GROUP_SIGNATURE, {"G": len(us)},
                        {"mul": FunctionTable(2, table=mul), "inv": FunctionTable(1, table=inv)},
                        {}, {"one": one}, name=name or f"U({r.name})")
    return GroupModel(model, r, tuple(us))


def gl_model(r: FiniteRing, n: int) -> GroupModel:
    """GL_n(r): the units of the n x n matrix ring over r."""
    caps.require("ring", r.size ** (n * n))
    m = matrix_ring(r, n)
    return unit_group(m, name=f"GL{n}({r.name})")


# ---- matrix units -------------------------------------------------------------------

@dataclass
class MatrixUnitSystem:
    ring: FiniteRing                   # a matrix ring M_n(base)
    n: int
    units: dict[tuple[int, int], int]  # (i, j), 0-based -> ring element


def standard_matrix_units(base: FiniteRing, n: int, ring: FiniteRing | None = None) -> MatrixUnitSystem:
    ring = ring or matrix_ring(base, n)
    out = {}
    for i in range(n):
        for j in range(n):
            entries = np.full((n, n), base.zero)
            entries[i, j] = base.one
            out[(i, j)] = matrix_element(base, n, entries)
    return MatrixUnitSystem(ring, n, out)


def conjugate_system(sys: MatrixUnitSystem, c: int) -> MatrixUnitSystem:
    """The system c e_ij c^-1 for a unit c."""
    ci = inverse(sys.ring, c)
    if ci is None:
        raise ValueError("conjugating element is not a unit")
    m = sys.ring.mul
    return MatrixUnitSystem(sys.ring, sys.n, {k: int(m[m[c, e], ci]) for k, e in sys.units.items()})


@dataclass(frozen=True)
class UnitVerdict:
    ok: bool
    counterexample: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_matrix_units(sys: MatrixUnitSystem) -> UnitVerdict:
    """e_ij e_st = delta_js e_it for all indices, and e_11 + ... + e_nn = 1."""
    r = sys.ring
    e = sys.units
    n = sys.n
    for i, j, s, t in itertools.product(range(n), repeat=4):
        want = e[(i, t)] if j == s else r.zero
        if int(r.mul[e[(i, j)], e[(s, t)]]) != want:
            return UnitVerdict(False, ((i + 1, j + 1), (s + 1, t + 1)), "product relation fails")
    acc = r.zero
    for i in range(n):
        acc = int(r.add[acc, e[(i, i)]])
    if acc != r.one:
        return UnitVerdict(False, None, "diagonal units do not sum to 1")
    return UnitVerdict(True)


# ---- commutator identities by direct matrix arithmetic --------------------------------

class _Mat:
    """n x n matrices over r as integer arrays of element indices."""

    def __init__(self, r: FiniteRing, n: int):
        self.r, self.n = r, n
        self.add_t = r.add.astype(np.int64)
        self.mul_t = r.mul.astype(np.int64)
        self.neg_t = r.neg.astype(np.int64)

    def identity(self) -> np.ndarray:
        a = np.full((self.n, self.n), self.r.zero, dtype=np.int64)
        np.fill_diagonal(a, self.r.one)
        return a

    def unit(self, i: int, j: int, x: int) -> np.ndarray:
        a = np.full((self.n, self.n), self.r.zero, dtype=np.int64)
        a[i, j] = x
        return a

    def add(self, a, b):
        return self.add_t[a, b]

    def neg(self, a):
        return self.neg_t[a]

    def mul(self, a, b):
        out = np.full((self.n, self.n), self.r.zero, dtype=np.int64)
        for k in range(self.n):
            out = self.add_t[out, self.mul_t[a[:, k][:, None], b[k, :][None, :]]]
        return out

    def one_plus(self, i, j, x):
        return self.add(self.identity(), self.unit(i, j, x))

    def commutator(self, a, a_inv, b, b_inv):
        """[a, b] = a b a^-1 b^-1."""
        return self.mul(self.mul(self.mul(a, b), a_inv), b_inv)


@dataclass(frozen=True)
class IdentityReport:
    name: str
    instances: int
    failures: int
    first_counterexample: dict | None
    skipped: str = ""

    @property
    def ok(self) -> bool:
        return not self.skipped and self.failures == 0

    def to_json(self) -> dict:
        return {"identity": self.name, "instances": self.instances, "failures": self.failures,
                "pass": self.ok, "first_counterexample": self.first_counterexample,
                "skipped": self.skipped or None}


def check_transvection_identities(r: FiniteRing, n: int) -> dict[str, IdentityReport]:
    """Exhaustive checks over all scalars and all distinct index triples (i, j, k).

    transvection:     [1 + l e_ij, 1 + x e_jk] = 1 + l x e_ik
    second_literal:   [1 + x e_ij, 1 - y e_jk] = 1 + x y e_ik
    second_corrected: [1 + x e_ij, 1 - y e_jk] = 1 - x y e_ik
    involution:       (1 - 2 e_ii)^2 = 1, run only when 2 is a unit of r
    """
    if n < 3:
        raise ValueError("the commutator identities need n >= 3")
    m = _Mat(r, n)
    one = m.identity()
    triples = [t for t in itertools.permutations(range(n), 3)]
    elems = range(r.size)
    neg = r.neg

    def run(name, build):
        count, fails, first = 0, 0, None
        for (i, j, k) in triples:
            for x, y in itertools.product(elems, elems):
                a, ai, b, bi, want = build(i, j, k, x, y)
                got = m.commutator(a, ai, b, bi)
                count += 1
                if not np.array_equal(got, want):
                    fails += 1
                    if first is None:
                        first = {"indices": [i + 1, j + 1, k + 1], "scalars": [r.labels[x], r.labels[y]]}
        return IdentityReport(name, count, fails, first)

    def transvection(i, j, k, lam, x):
        a, ai = m.one_plus(i, j, lam), m.one_plus(i, j, int(neg[lam]))
        b, bi = m.one_plus(j, k, x), m.one_plus(j, k, int(neg[x]))
        return a, ai, b, bi, m.one_plus(i, k, int(r.mul[lam, x]))

    def second(sign):
        def build(i, j, k, x, y):
            ny = int(neg[y])
            a, ai = m.one_plus(i, j, x), m.one_plus(i, j, int(neg[x]))
            b, bi = m.one_plus(j, k, ny), m.one_plus(j, k, y)
            xy = int(r.mul[x, y])
            return a, ai, b, bi, m.one_plus(i, k, xy if sign > 0 else int(neg[xy]))
        return build

    out = {
        "transvection": run("transvection", transvection),
        "second_literal": run("second_literal", second(+1)),
        "second_corrected": run("second_corrected", second(-1)),
    }
    two = int(r.add[r.one, r.one])
    if inverse(r, two) is None:
        out["involution"] = IdentityReport("involution", 0, 0, None, skipped="2 is not a unit")
    else:
        count, fails, first = 0, 0, None
        for i in range(n):
            q = m.add(one, m.neg(m.unit(i, i, two)))
            count += 1
            if not np.array_equal(m.mul(q, q), one):
                fails += 1
                first = first or {"indices": [i + 1]}
        out["involution"] = IdentityReport("involution", count, fails, first)
    return out


# ---- relativization ---------------------------------------------------------------------

class _Fresh:
    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.k = 0

    def __call__(self, stem: str) -> Var:
        while True:
            self.k += 1
            name = f"{stem}_{self.k}"
            if name not in self.taken:
                self.taken.add(name)
                return Var(name, "R")


def _all_names(phi: Formula) -> set[str]:
    names = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Forall, Exists)):
            names.add(f.var.name)
            stack.append(f.body)
        elif isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, (And, Or, Implies, Iff)):
            stack += [f.left, f.right]
        elif isinstance(f, Eq):
            names |= {v.name for v in term_vars(f.left)} | {v.name for v in term_vars(f.right)}
        elif isinstance(f, Atom):
            for a in f.args:
                names |= {v.name for v in term_vars(a)}
    return names


def _unit_witness(x: Term, y: Var) -> Formula:
    """x y = 1 and y x = 1."""
    one = Const("one")
    return And(Eq(App("mul", (x, y)), one), Eq(App("mul", (y, x)), one))


def _to_ring_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name, "R")
    if isinstance(t, Const):
        return t
    return App(t.func, tuple(_to_ring_term(a) for a in t.args))


def _innermost_inv(t: Term) -> App | None:
    if isinstance(t, App):
        for a in t.args:
            hit = _innermost_inv(a)
            if hit is not None:
                return hit
        if t.func == "inv":
            return t
    return None


def _replace(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, App):
        return App(t.func, tuple(_replace(a, old, new) for a in t.args))
    return t


def _eliminate_inv(eq: Eq, fresh: _Fresh) -> Formula:
    """An equation with inv(s) subterms as exists v (s v = 1 = v s and the equation with v)."""
    hit = _innermost_inv(eq.left) or _innermost_inv(eq.right)
    if hit is None:
        return Eq(_to_ring_term(eq.left), _to_ring_term(eq.right))
    v = fresh("inv")
    s = _to_ring_term(hit.args[0])
    rest = Eq(_replace(eq.left, hit, Var(v.name, "G")), _replace(eq.right, hit, Var(v.name, "G")))
    return Exists(v, And(_unit_witness(s, v), _eliminate_inv(rest, fresh)))


def relativize_group_sentence(phi: Formula) -> Formula:
    """A ring sentence true in a ring exactly when phi holds in its group of units.

    forall x (...) becomes forall x (exists x' (x x' = 1 = x' x) -> ...),
    exists x (...) becomes exists x (exists x' (x x' = 1 = x' x) & ...),
    and inv(s) is replaced by a witnessed two-sided inverse of s.
    """
    if not is_sentence(phi):
        raise ValueError("expected a sentence over the group signature")
    fresh = _Fresh(_all_names(phi))

    def go(f: Formula) -> Formula:
        if isinstance(f, Eq):
            return _eliminate_inv(f, fresh)
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, (Forall, Exists)):
            x = Var(f.var.name, "R")
            w = fresh(f.var.name)
            unit = Exists(w, _unit_witness(x, w))
            if isinstance(f, Forall):
                return Forall(x, Implies(unit, go(f.body)))
            return Exists(x, And(unit, go(f.body)))
        raise ValueError(f"unsupported formula for the group signature: {f!r}")

    out = go(phi)
    assert not free_variables(out)
    return out
