"""Submodule lattices of free modules: definable lattice operations, graph submodules
carrying End(P), and the matrix encoding of submodules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import caps
from .algebra.rings import FiniteRing, verify_ring_axioms
from .algebra.structure import ring_isomorphic
from .logic.semantics import FiniteModel, TupleRelation, evaluate
from .logic.syntax import And, Atom, Exists, Forall, Formula, Implies, Not, Signature, Var, conj
from .modules.module import (
    FiniteModule, end_ring, free_module, hom_set, is_homomorphism, module_isomorphic, restrict,
    span, submodule_sum, submodules, zero_module,
)

LATTICE_SIGNATURE = Signature(sorts=("Sub",), predicates={"Leq": ("Sub", "Sub")})

Sub = frozenset


class LatticeError(ValueError):
    pass


# ---- the projective space -------------------------------------------------------

@dataclass(eq=False)
class ProjectiveSpace:
    """All submodules of V = R^n ordered by inclusion.

    With enumerate=False only the ambient module is kept; meet and join are
    then computed on element sets instead of read from the order.
    """
    ring: FiniteRing
    rank: int
    module: FiniteModule
    subs: tuple[Sub, ...] | None
    leq: np.ndarray | None = field(default=None, repr=False)
    meet_table: np.ndarray | None = field(default=None, repr=False)
    join_table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.index = {s: k for k, s in enumerate(self.subs)} if self.subs is not None else None
        self.zero = Sub([self.module.zero])
        self.full = Sub(range(self.module.size))
        self._model = None

    @property
    def enumerated(self) -> bool:
        return self.subs is not None

    def __len__(self):
        if self.subs is None:
            raise LatticeError("the space was built without enumeration")
        return len(self.subs)

    def meet(self, a: Sub, b: Sub) -> Sub:
        if self.index is None:
            return a & b
        return self.subs[self.meet_table[self.index[a], self.index[b]]]

    def join(self, a: Sub, b: Sub) -> Sub:
        if self.index is None:
            return submodule_sum(self.module, a, b)
        return self.subs[self.join_table[self.index[a], self.index[b]]]

    def join_all(self, parts: Sequence[Sub]) -> Sub:
        out = self.zero
        for p in parts:
            out = self.join(out, p)
        return out

    def disjoint(self, a: Sub, b: Sub) -> bool:
        return self.meet(a, b) == self.zero

    def model(self) -> FiniteModel:
        """The structure (submodules, inclusion)."""
        if self._model is None:
            if self.leq is None:
                raise LatticeError("the space was built without enumeration")
            pairs = [tuple(map(int, t)) for t in np.argwhere(self.leq)]
            self._model = FiniteModel(LATTICE_SIGNATURE, {"Sub": len(self.subs)}, {},
                                      {"Leq": TupleRelation(pairs)}, {},
                                      name=f"P({self.module.name})")
        return self._model


def projective_space(r: FiniteRing, n: int, enumerate: bool = True) -> ProjectiveSpace:
    if n < 0:
        raise ValueError("rank must be >= 0")
    caps.require("lattice_enum" if enumerate else "lattice", r.size ** n)
    v = free_module(r, n, cap="lattice") if n else zero_module(r)
    if not enumerate:
        return ProjectiveSpace(r, n, v, None)
    subs = tuple(submodules(v, cap="lattice_enum"))
    k = len(subs)
    masks = [sum(1 << x for x in s) for s in subs]
    leq = np.array([[a & ~b == 0 for b in masks] for a in masks], dtype=bool)
    _check_partial_order(leq)
    meet_t, join_t = _order_bounds(leq, [len(s) for s in subs])
    ps = ProjectiveSpace(r, n, v, subs, leq, meet_t, join_t)
    if ps.zero not in ps.index or ps.full not in ps.index:
        raise LatticeError("0 or V missing from the submodule list")
    # closure: the order-theoretic bounds are the set intersection and sum
    for i, j in itertools.product(range(k), repeat=2):
        if subs[meet_t[i, j]] != subs[i] & subs[j]:
            raise LatticeError("meet differs from intersection")
        if subs[join_t[i, j]] != submodule_sum(v, subs[i], subs[j]):
            raise LatticeError("join differs from sum")
    return ps


def _check_partial_order(leq: np.ndarray) -> None:
    if not leq.diagonal().all():
        raise LatticeError("inclusion is not reflexive")
    if (leq & leq.T & ~np.eye(len(leq), dtype=bool)).any():
        raise LatticeError("inclusion is not antisymmetric")
    li = leq.astype(np.int64)
    if ((li @ li > 0) & ~leq).any():
        raise LatticeError("inclusion is not transitive")


def _order_bounds(leq: np.ndarray, sizes: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Greatest lower and least upper bounds read from the order alone.

    Height (longest chain from the bottom) is strictly monotone, so a greatest
    lower bound is the lower bound of largest height; the choice is then
    checked to dominate every other lower bound.
    """
    k = len(leq)
    order = sorted(range(k), key=lambda i: sizes[i])       # a linear extension
    height = np.zeros(k, dtype=np.int64)
    for c in order:
        below = np.flatnonzero(leq[:, c])
        below = below[below != c]
        height[c] = 1 + int(height[below].max()) if len(below) else 0
    meet_t = np.empty((k, k), dtype=np.int64)
    join_t = np.empty((k, k), dtype=np.int64)
    for a in range(k):
        lower = leq[:, a][:, None] & leq            # lower[c, b]: c <= a and c <= b
        upper = leq[a, :][:, None] & leq.T          # upper[c, b]: a <= c and b <= c
        meet_t[a] = np.argmax(np.where(lower, height[:, None], -1), axis=0)
        join_t[a] = np.argmin(np.where(upper, height[:, None], 1 << 30), axis=0)
        for b in range(k):
            if not (lower[:, b] <= leq[:, meet_t[a, b]]).all():
                raise LatticeError("no greatest lower bound")
            if not (upper[:, b] <= leq[join_t[a, b], :]).all():
                raise LatticeError("no least upper bound")
    return meet_t, join_t


# ---- definable operations as formulas over (P(V), Leq) ---------------------------

class _Names:
    def __init__(self):
        self.counter = itertools.count(1)

    def sub(self, stem: str = "M") -> Var:
        return Var(f"{stem}_{next(self.counter)}", "Sub")


def Leq(a: Var, b: Var) -> Formula:
    return Atom("Leq", (a, b))


def is_top(nm: _Names, m: Var) -> Formula:
    x = nm.sub()
    return Forall(x, Leq(x, m))


def is_bottom(nm: _Names, m: Var) -> Formula:
    x = nm.sub()
    return Forall(x, Leq(m, x))


def meet_formula(nm: _Names, m1: Var, m2: Var, m3: Var) -> Formula:
    """m1 = m2 meet m3."""
    m4 = nm.sub()
    return conj([Leq(m1, m2), Leq(m1, m3),
                 Forall(m4, Implies(And(Leq(m4, m2), Leq(m4, m3)), Leq(m4, m1)))])


def join_formula(nm: _Names, m1: Var, m2: Var, m3: Var) -> Formula:
    """m1 = m2 + m3."""
    m4 = nm.sub()
    return conj([Leq(m2, m1), Leq(m3, m1),
                 Forall(m4, Implies(And(Leq(m2, m4), Leq(m3, m4)), Leq(m1, m4)))])


def disjoint_formula(nm: _Names, a: Var, b: Var) -> Formula:
    z = nm.sub("Z")
    return Exists(z, And(meet_formula(nm, z, a, b), is_bottom(nm, z)))


def direct_sum_formula(nm: _Names, m1: Var, m2: Var, m3: Var) -> Formula:
    """m1 = m2 (+) m3: the sum, with trivial intersection."""
    return And(join_formula(nm, m1, m2, m3), disjoint_formula(nm, m2, m3))


def iso_d_body(nm: _Names, p1: Var, p2: Var, p: Var, literal: bool = True) -> Formula:
    """The clauses on the witness p; s names p1 (+) p2."""
    s = nm.sub("S")
    parts = [direct_sum_formula(nm, s, p1, p2), Leq(p, s)]
    if literal:
        parts.append(Not(is_bottom(nm, p)))
    parts += [disjoint_formula(nm, p, p1), disjoint_formula(nm, p, p2),
              direct_sum_formula(nm, s, p, p1), direct_sum_formula(nm, s, p, p2)]
    return Exists(s, conj(parts))


def iso_d_formula(nm: _Names, p1: Var, p2: Var, literal: bool = True) -> Formula:
    """p1 and p2 are disjoint and isomorphic.

    literal=True keeps the clause "p is nonzero", which rejects p1 = p2 = 0;
    literal=False drops it (it is implied whenever p1 or p2 is nonzero).
    """
    p = nm.sub("P")
    return And(disjoint_formula(nm, p1, p2), Exists(p, iso_d_body(nm, p1, p2, p, literal)))


@dataclass
class LatticeOpsReport:
    space: str
    submodules: int
    checks: dict[str, int]
    mismatches: dict[str, list]
    iso_d_witnesses: dict[tuple[int, int], int]

    @property
    def ok(self) -> bool:
        return all(not v for k, v in self.mismatches.items() if k != "iso_d_literal")

    def to_json(self) -> dict:
        return {"space": self.space, "submodules": self.submodules, "checks": self.checks,
                "mismatches": {k: [list(t) for t in v] for k, v in self.mismatches.items()},
                "iso_d_witnesses": {f"{a},{b}": p for (a, b), p in sorted(self.iso_d_witnesses.items())},
                "ok": self.ok}


def lattice_definable_ops(ps: ProjectiveSpace) -> LatticeOpsReport:
    """Formula verdicts over (P(V), Leq) against set-theoretic oracles, on all pairs and triples."""
    m = ps.model()
    subs, v = ps.subs, ps.module
    k = len(subs)
    nm = _Names()
    x1, x2, x3 = Var("X1", "Sub"), Var("X2", "Sub"), Var("X3", "Sub")
    f_top, f_bot = is_top(nm, x1), is_bottom(nm, x1)
    f_meet, f_join = meet_formula(nm, x1, x2, x3), join_formula(nm, x1, x2, x3)
    f_dsum = direct_sum_formula(nm, x1, x2, x3)
    f_iso_lit, f_iso = iso_d_formula(nm, x1, x2, True), iso_d_formula(nm, x1, x2, False)
    witness_var = Var("W", "Sub")
    f_body = And(disjoint_formula(nm, x1, x2), iso_d_body(nm, x1, x2, witness_var, literal=False))

    sums = {(i, j): submodule_sum(v, subs[i], subs[j]) for i in range(k) for j in range(k)}
    checks = {name: 0 for name in ("top", "bottom", "meet", "join", "direct_sum", "iso_d", "iso_d_literal")}
    bad: dict[str, list] = {name: [] for name in checks}

    def record(name, key, got, want):
        checks[name] += 1
        if got != want:
            bad[name].append(key)

    for i in range(k):
        record("top", (i,), evaluate(m, f_top, {x1: i}), subs[i] == ps.full)
        record("bottom", (i,), evaluate(m, f_bot, {x1: i}), subs[i] == ps.zero)
    for i, j, l in itertools.product(range(k), repeat=3):
        env = {x1: i, x2: j, x3: l}
        record("meet", (i, j, l), evaluate(m, f_meet, env), subs[i] == subs[j] & subs[l])
        record("join", (i, j, l), evaluate(m, f_join, env), subs[i] == sums[(j, l)])
        record("direct_sum", (i, j, l), evaluate(m, f_dsum, env),
               subs[i] == sums[(j, l)] and subs[j] & subs[l] == ps.zero)
    restricted = [restrict(v, s)[0] for s in subs]
    witnesses = {}
    for i, j in itertools.product(range(k), repeat=2):
        env = {x1: i, x2: j}
        want = subs[i] & subs[j] == ps.zero and module_isomorphic(restricted[i], restricted[j]) is not None
        got = evaluate(m, f_iso, env)
        record("iso_d", (i, j), got, want)
        record("iso_d_literal", (i, j), evaluate(m, f_iso_lit, env), want)
        if got:
            witnesses[(i, j)] = next(w for w in range(k) if evaluate(m, f_body, {x1: i, x2: j, witness_var: w}))
    return LatticeOpsReport(m.name, k, checks, bad, witnesses)


# ---- three copies of P and graph submodules ---------------------------------------

@dataclass(eq=False)
class Copies:
    """P_1, P_2, P_3 inside V with identifications f_i: P -> P_i (element maps)."""
    space: ProjectiveSpace
    p: FiniteModule
    maps: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    parts: tuple[Sub, Sub, Sub] = ()

    def __post_init__(self):
        v = self.space.module
        if len(self.maps) != 3:
            raise LatticeError("need three copies")
        for f in self.maps:
            if len(f) != self.p.size or not is_homomorphism(f, self.p, v):
                raise LatticeError("an identification is not a homomorphism P -> V")
            if len(set(f)) != self.p.size:
                raise LatticeError("an identification is not injective")
        self.parts = tuple(Sub(f) for f in self.maps)
        for a in range(3):
            rest = submodule_sum(v, *[self.parts[b] for b in range(3) if b != a])
            if self.parts[a] & rest != self.space.zero:
                raise LatticeError("the copies are not independent")

    def vec(self, *terms: tuple[int, int]) -> int:
        """sum of f_i(e) over the (i, e) pairs, i 1-based."""
        v = self.space.module
        out = v.zero
        for i, e in terms:
            out = int(v.add[out, self.maps[i - 1][e]])
        return out


def standard_copies(ps: ProjectiveSpace, m: int = 1) -> Copies:
    """P = R^m placed in coordinate blocks 1..m, m+1..2m, 2m+1..3m of V = R^n (n >= 3m)."""
    r, n = ps.ring, ps.rank
    if n < 3 * m:
        raise LatticeError(f"rank {n} leaves no room for three copies of R^{m}")
    p = free_module(r, m, cap="lattice")
    pc = np.array(list(itertools.product(range(r.size), repeat=m)), dtype=np.int64).reshape(-1, m)
    weights = r.size ** np.arange(n - 1, -1, -1)
    maps = []
    for block in range(3):
        coords = np.full((len(pc), n), r.zero, dtype=np.int64)
        coords[:, block * m:(block + 1) * m] = pc
        maps.append(tuple(int(x) for x in coords @ weights))
    return Copies(ps, p, tuple(maps))


@dataclass(frozen=True)
class GraphSubmodule:
    q: tuple[int, ...]      # endomorphism of P as an element map
    v3: Sub                 # {f1(e) + f2(e) + f3(q e)}


class LatticeCalculus:
    """The auxiliary submodules and the operations on graph submodules.

    Every construction uses only meet and join of the space; explicit element
    sets are used to name the input graphs and to check results.
    """

    def __init__(self, copies: Copies):
        self.c = copies
        ps = copies.space
        self.ps = ps
        p1, p2, p3 = copies.parts
        self.p = copies.parts
        es = range(copies.p.size)
        self.u12 = Sub(copies.vec((1, e), (2, e)) for e in es)
        self.u23 = Sub(copies.vec((2, e), (3, e)) for e in es)
        j = ps.join
        if not (self.u12 <= j(p1, p2) and p1 <= j(self.u12, p2) and p2 <= j(self.u12, p1)):
            raise LatticeError("U12 fails its defining formula")
        if not (self.u23 <= j(p2, p3) and p2 <= j(self.u23, p3) and p3 <= j(self.u23, p2)):
            raise LatticeError("U23 fails its defining formula")
        self.u123 = ps.meet(j(p1, self.u23), j(p3, self.u12))
        self.u13 = ps.meet(j(p1, p3), j(self.u123, p2))
        if self.u123 != Sub(copies.vec((1, e), (2, e), (3, e)) for e in es):
            raise LatticeError("U123 is not the diagonal")
        if self.u13 != Sub(copies.vec((1, e), (3, e)) for e in es):
            raise LatticeError("U13 is not the diagonal of P1 + P3")
        self.p12, self.p13, self.p23 = j(p1, p2), j(p1, p3), j(p2, p3)
        self._neg: dict[Sub, Sub] = {}

    # graphs named by explicit endomorphisms
    def graph(self, q: Sequence[int]) -> GraphSubmodule:
        c = self.c
        q = tuple(int(x) for x in q)
        if not is_homomorphism(q, c.p, c.p):
            raise LatticeError("q is not an endomorphism of P")
        v3 = Sub(c.vec((1, e), (2, e), (3, q[e])) for e in range(c.p.size))
        if self.ps.index is not None and v3 not in self.ps.index:
            raise LatticeError("graph is not a submodule")
        j = self.ps.join
        if not (v3 <= j(self.u12, self.p[2]) and self.u12 <= j(v3, self.p[2])):
            raise LatticeError("V_q fails its defining formula")
        return GraphSubmodule(q, v3)

    def read_endo(self, v3: Sub) -> tuple[int, ...]:
        """The map e -> e' with f1(e) + f2(e) + f3(e') in v3; each e' must be unique."""
        c = self.c
        out = []
        for e in range(c.p.size):
            hits = [x for x in range(c.p.size) if c.vec((1, e), (2, e), (3, x)) in v3]
            if len(hits) != 1:
                raise LatticeError(f"{len(hits)} values over one element: not a graph")
            out.append(hits[0])
        return tuple(out)

    def as_graph(self, v3: Sub) -> GraphSubmodule:
        return GraphSubmodule(self.read_endo(v3), v3)

    # lattice constructions
    def w13(self, v3: Sub) -> Sub:
        w = self.ps.meet(self.p13, self.ps.join(v3, self.p[1]))
        if not self.p[0] <= self.ps.join(w, self.p[2]):
            raise LatticeError("W13 fails its defining formula")
        return w

    def w23(self, v3: Sub) -> Sub:
        w = self.ps.meet(self.p23, self.ps.join(v3, self.p[0]))
        if not self.p[1] <= self.ps.join(w, self.p[2]):
            raise LatticeError("W23 fails its defining formula")
        return w

    def x23(self, v3: Sub) -> Sub:
        return self.ps.meet(self.ps.join(self.w23(v3), self.p[1]), self.u23)

    def w32_condition(self, w: Sub, v3: Sub) -> bool:
        ps, (p1, p2, p3) = self.ps, self.p
        rhs = ps.meet(ps.join(ps.meet(ps.join(w, p3), p2), ps.meet(ps.join(self.w23(v3), p2), p3)), self.u23)
        return w <= self.p23 and p3 <= ps.join(p2, w) and self.x23(v3) == rhs

    def w32(self, g: GraphSubmodule) -> Sub:
        """{f3(e) + f2(q e)}, checked against its defining condition."""
        c = self.c
        w = Sub(c.vec((3, e), (2, g.q[e])) for e in range(c.p.size))
        if not self.w32_condition(w, g.v3):
            raise LatticeError("W32 fails its defining condition")
        return w

    def w32_solutions(self, g: GraphSubmodule) -> int:
        """How many submodules satisfy the defining condition of W32 (enumerated spaces only)."""
        return sum(self.w32_condition(w, g.v3) for w in self.ps.subs)

    def w12(self, g: GraphSubmodule) -> Sub:
        ps = self.ps
        v2 = ps.meet(ps.join(self.w32(g), self.p[0]), ps.join(self.u13, self.p[1]))
        return ps.meet(ps.join(v2, self.p[2]), self.p12)

    def add(self, a: GraphSubmodule, b: GraphSubmodule) -> GraphSubmodule:
        ps = self.ps
        v = ps.meet(ps.join(self.u12, self.p[2]), ps.join(self.w13(a.v3), self.w23(b.v3)))
        return self.as_graph(v)

    def neg(self, b: GraphSubmodule) -> GraphSubmodule:
        """-b by repeated addition: the last partial sum before reaching 0."""
        zero = self.u12
        if b.v3 == zero:
            return b
        if b.v3 not in self._neg:
            x = b
            while True:
                y = self.add(x, b)
                if y.v3 == zero:
                    break
                x = y
            self._neg[b.v3] = x.v3
        return self.as_graph(self._neg[b.v3])

    def mul(self, a: GraphSubmodule, b: GraphSubmodule) -> GraphSubmodule:
        """V_{ab}: W_s^{12} = (W_a^{32} + W_{-b}^{13}) meet (P1 + P2), then s read off W_s^{12}."""
        ps, c = self.ps, self.c
        ws = ps.meet(ps.join(self.w32(a), self.w13(self.neg(b).v3)), self.p12)
        s = []
        for e in range(c.p.size):
            hits = [x for x in range(c.p.size) if c.vec((1, e), (2, x)) in ws]
            if len(hits) != 1:
                raise LatticeError("W_s^12 is not a graph")
            s.append(hits[0])
        out = self.graph(s)
        if self.w12(out) != ws:
            raise LatticeError("W12 of the product graph differs from the constructed one")
        return out


# ---- recovering End(P) -------------------------------------------------------------

@dataclass
class LatticeRecovery:
    ring: FiniteRing
    end: FiniteRing
    endos: list[tuple[int, ...]]      # element k of both rings is endomorphism endos[k]
    graphs: list[Sub]
    isomorphism: list[int] | None     # ring_isomorphic(ring, end)
    identity_is_iso: bool             # q -> V_q matches the end ring tables exactly

    @property
    def ok(self) -> bool:
        return self.identity_is_iso and self.isomorphism is not None

    def to_text(self, copies: Copies) -> str:
        v = copies.space.module
        lines = [f"ambient {v.name}", "copies:"]
        for i, part in enumerate(copies.parts, 1):
            lines.append(f"  P{i} = {{{', '.join(v.labels[x] for x in sorted(part))}}}")
        lines.append("graphs:")
        for k, (q, g) in enumerate(zip(self.endos, self.graphs)):
            lines.append(f"  q{k} = {list(q)} -> V = {{{', '.join(v.labels[x] for x in sorted(g))}}}")
        lines.append("add:")
        lines += ["  " + " ".join(map(str, row)) for row in self.ring.add.tolist()]
        lines.append("mul:")
        lines += ["  " + " ".join(map(str, row)) for row in self.ring.mul.tolist()]
        lines.append(f"isomorphism to End(P): {self.isomorphism}")
        lines.append(f"q -> V_q is a ring isomorphism: {self.identity_is_iso}")
        return "\n".join(lines) + "\n"


def recover_end_ring(copies: Copies) -> LatticeRecovery:
    calc = LatticeCalculus(copies)
    end, homs = end_ring(copies.p)
    endos = [h.table for h in homs]
    graphs = [calc.graph(q) for q in endos]
    pos = {g.v3: k for k, g in enumerate(graphs)}
    k = len(graphs)
    add = np.empty((k, k), dtype=np.int64)
    mul = np.empty((k, k), dtype=np.int64)
    for i, j in itertools.product(range(k), repeat=2):
        add[i, j] = pos[calc.add(graphs[i], graphs[j]).v3]
        mul[i, j] = pos[calc.mul(graphs[i], graphs[j]).v3]
    zero, one = pos[calc.u12], pos[calc.u123]
    verify_ring_axioms(add, mul, zero, one)
    ring = FiniteRing(add, mul, zero, one, tuple(f"V{i}" for i in range(k)),
                      f"Lat({copies.p.name})")
    same = (np.array_equal(add, end.add) and np.array_equal(mul, end.mul)
            and zero == end.zero and one == end.one)
    return LatticeRecovery(ring, end, endos, [g.v3 for g in graphs], ring_isomorphic(ring, end), same)


def sampled_products(copies: Copies, samples: int = 10, seed: int = 0) -> list[tuple[int, int, bool]]:
    """Lattice products of random pairs of endomorphisms against composition."""
    calc = LatticeCalculus(copies)
    homs = hom_set(copies.p, copies.p)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        i, j = (int(x) for x in rng.integers(len(homs), size=2))
        q, r = homs[i], homs[j]
        got = calc.mul(calc.graph(q.table), calc.graph(r.table)).q
        out.append((i, j, got == q.compose(r).table))
    return out


# ---- submodules as matrices -------------------------------------------------------

@dataclass
class MatrixEncoding:
    """Submodules of R^n as n x n matrices whose columns generate them (zero padded)."""
    space: ProjectiveSpace

    def __post_init__(self):
        ps = self.space
        r, n = ps.ring, ps.rank
        self.weights = r.size ** np.arange(n - 1, -1, -1)
        self.coords = np.array(list(itertools.product(range(r.size), repeat=n)),
                               dtype=np.int64).reshape(-1, n)
        self.mats = np.array(list(itertools.product(range(r.size), repeat=n * n)),
                             dtype=np.int64).reshape(-1, n, n)

    def column_vector(self, x: int) -> np.ndarray:
        return self.coords[x]

    def vector_index(self, col) -> int:
        return int(np.dot(col, self.weights))

    def encode(self, s: Sub) -> np.ndarray:
        ps = self.space
        n, v = ps.rank, ps.module
        gens = _small_generating_set(v, s, n)
        x = np.full((n, n), ps.ring.zero, dtype=np.int64)
        for j, g in enumerate(gens):
            x[:, j] = self.coords[g]
        return x

    def decode(self, x: np.ndarray) -> Sub:
        return span(self.space.module, [self.vector_index(x[:, j]) for j in range(x.shape[1])])

    def product(self, x: np.ndarray, a: np.ndarray) -> np.ndarray:
        """x a over the ring, for a single a (n x n) or a stack (k x n x n)."""
        r = self.space.ring
        a = np.asarray(a)
        stack = a if a.ndim == 3 else a[None]
        n = x.shape[0]
        out = np.full((len(stack), n, n), r.zero, dtype=np.int64)
        for l in range(n):
            out = r.add[out, r.mul[x[None, :, l, None], stack[:, None, l, :]]]
        return out if a.ndim == 3 else out[0]

    def leq_witness(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray | None:
        """Some A with x1 = x2 A, by exhaustive search over all n x n matrices."""
        prods = self.product(x2, self.mats)
        hit = np.flatnonzero((prods == x1[None]).all(axis=(1, 2)))
        return self.mats[hit[0]] if len(hit) else None

    def submodule_leq(self, x1: np.ndarray, x2: np.ndarray) -> bool:
        return self.leq_witness(x1, x2) is not None

    def equivalent(self, x1: np.ndarray, x2: np.ndarray) -> bool:
        return self.submodule_leq(x1, x2) and self.submodule_leq(x2, x1)


def _small_generating_set(v: FiniteModule, s: Sub, n: int) -> list[int]:
    """At most n elements spanning s; greedy first, then exhaustive."""
    gens: list[int] = []
    cur = Sub([v.zero])
    for x in sorted(s, key=lambda y: -len(span(v, [y]))):
        if x not in cur:
            gens.append(x)
            cur = span(v, gens)
        if cur == s:
            break
    if len(gens) <= n:
        return gens
    elems = sorted(s)
    for size in range(1, n + 1):
        for combo in itertools.combinations(elems, size):
            if span(v, combo) == s:
                return list(combo)
    raise LatticeError(f"submodule needs more than {n} generators")


@dataclass
class MatrixEncodingReport:
    space: str
    pairs: int
    leq_mismatches: list[tuple[int, int]]
    equivalence_mismatches: list[tuple[int, int]]
    roundtrip_failures: list[int]

    @property
    def ok(self) -> bool:
        return not (self.leq_mismatches or self.equivalence_mismatches or self.roundtrip_failures)


def submodule_matrix_encoding(ps: ProjectiveSpace) -> tuple[MatrixEncoding, MatrixEncodingReport]:
    """The encoder/decoder plus an exhaustive check of leq and equivalence against the order."""
    enc = MatrixEncoding(ps)
    mats = [enc.encode(s) for s in ps.subs]
    roundtrip = [k for k, (s, x) in enumerate(zip(ps.subs, mats)) if enc.decode(x) != s]
    k = len(mats)
    leq = np.zeros((k, k), dtype=bool)
    for i, j in itertools.product(range(k), repeat=2):
        leq[i, j] = enc.submodule_leq(mats[i], mats[j])
    leq_bad = [(int(i), int(j)) for i, j in np.argwhere(leq != ps.leq)]
    eq_bad = [(int(i), int(j)) for i, j in np.argwhere((leq & leq.T) != np.eye(k, dtype=bool))]
    return enc, MatrixEncodingReport(ps.module.name, k * k, leq_bad, eq_bad, roundtrip)
