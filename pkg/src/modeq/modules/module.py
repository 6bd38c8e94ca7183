"""Finite right modules, homomorphisms, submodules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .. import caps
from ..algebra.rings import FiniteRing


class ModuleAxiomError(ValueError):
    pass


def _idx_dtype(n: int):
    return np.int32


@dataclass(eq=False)
class FiniteModule:
    ring: FiniteRing
    add: np.ndarray     # m x m
    act: np.ndarray     # m x |R|, act[x, r] = x.r
    zero: int = 0
    labels: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        self.add = np.asarray(self.add, dtype=np.int32)
        self.act = np.asarray(self.act, dtype=np.int32)
        if not self.labels:
            self.labels = tuple(str(i) for i in range(self.size))
        self.neg = np.argmin(self.add != self.zero, axis=1).astype(np.int32)
        self._gens = None
        self._inv = None

    @property
    def size(self) -> int:
        return self.add.shape[0]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FiniteModule({self.name or '?'}, |M|={self.size}, over {self.ring.name})"

    def is_zero(self) -> bool:
        return self.size == 1

    def generators(self) -> list[int]:
        if self._gens is None:
            self._gens = generating_set(self)
        return self._gens

    def element_invariants(self) -> list[tuple]:
        """Isomorphism-invariant data per element: additive order, |ann(x)|, |xR|."""
        if self._inv is None:
            out = []
            for x in range(self.size):
                k, y = 1, x
                while y != self.zero:
                    y = int(self.add[y, x])
                    k += 1
                row = self.act[x]
                out.append((k, int((row == self.zero).sum()), len(set(row.tolist()))))
            self._inv = out
        return self._inv

    def to_json(self) -> dict:
        return {"ring": self.ring.spec, "add": self.add.tolist(), "act": self.act.tolist(),
                "zero": int(self.zero)}


def verify_module_axioms(m: FiniteModule) -> None:
    r = m.ring
    add, act = m.add.astype(np.int64), m.act.astype(np.int64)
    n = m.size
    if add.shape != (n, n) or act.shape != (n, r.size):
        raise ModuleAxiomError("table shapes do not match the carrier and ring")
    if add.min() < 0 or add.max() >= n or act.min() < 0 or act.max() >= n:
        raise ModuleAxiomError("table entry outside the carrier")
    idx = np.arange(n)
    if not np.array_equal(add, add.T):
        raise ModuleAxiomError("addition is not commutative")
    if not np.array_equal(add[m.zero], idx):
        raise ModuleAxiomError("zero is not an additive identity")
    if not np.all((add == m.zero).any(axis=1)):
        raise ModuleAxiomError("missing additive inverse")
    if not np.array_equal(add[add, :], add[:, add]):
        raise ModuleAxiomError("addition is not associative")
    if not np.array_equal(act[:, r.one], idx):
        raise ModuleAxiomError("x.1 != x")
    radd, rmul = r.add.astype(np.int64), r.mul.astype(np.int64)
    # (x+y).r = x.r + y.r
    if not np.array_equal(act[add, :], add[act[:, None, :], act[None, :, :]]):
        raise ModuleAxiomError("(x+y).r != x.r + y.r")
    # x.(r+s) = x.r + x.s
    if not np.array_equal(act[:, radd], add[act[:, :, None], act[:, None, :]]):
        raise ModuleAxiomError("x.(r+s) != x.r + x.s")
    # x.(rs) = (x.r).s
    if not np.array_equal(act[:, rmul], act[act, :]):
        raise ModuleAxiomError("x.(rs) != (x.r).s")


def make_module(ring: FiniteRing, add, act, zero: int = 0, labels=(), name: str = "",
                verify: bool = True) -> FiniteModule:
    m = FiniteModule(ring, np.asarray(add), np.asarray(act), zero, tuple(labels), name)
    if verify:
        verify_module_axioms(m)
    return m


def zero_module(r: FiniteRing) -> FiniteModule:
    return FiniteModule(r, np.zeros((1, 1)), np.zeros((1, r.size)), 0, ("0",), "0")


def free_module(r: FiniteRing, n: int, cap: str = "module") -> FiniteModule:
    """R^n with componentwise operations; coordinates in mixed radix, first most significant."""
    if n < 0:
        raise ValueError("rank must be >= 0")
    if n == 0:
        return zero_module(r)
    size = r.size ** n
    caps.require(cap, size)
    coords = np.array(list(itertools.product(range(r.size), repeat=n)), dtype=np.int64).reshape(size, n)
    weights = r.size ** np.arange(n - 1, -1, -1)
    radd, rmul = r.add.astype(np.int64), r.mul.astype(np.int64)
    add = (radd[coords[:, None, :], coords[None, :, :]] * weights).sum(axis=2)
    act = (rmul[coords[:, :, None], np.arange(r.size)[None, None, :]] * weights[None, :, None]).sum(axis=1)
    zero = int((np.full(n, r.zero) * weights).sum())
    labels = tuple("(" + ",".join(r.labels[c] for c in row) + ")" if n > 1 else r.labels[row[0]]
                   for row in coords)
    name = r.name if n == 1 else f"{r.name}^{n}"
    return FiniteModule(r, add, act, zero, labels, name)


def regular_module(r: FiniteRing) -> FiniteModule:
    return free_module(r, 1)


def direct_sum(a: FiniteModule, b: FiniteModule) -> FiniteModule:
    if a.ring is not b.ring:
        raise ValueError("modules over different rings")
    na, nb = a.size, b.size
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    add = a.add[ia[:, None], ia[None, :]].astype(np.int64) * nb + b.add[ib[:, None], ib[None, :]]
    act = a.act[ia].astype(np.int64) * nb + b.act[ib]
    labels = tuple(f"({a.labels[x]},{b.labels[y]})" for x, y in zip(ia, ib))
    return FiniteModule(a.ring, add, act, a.zero * nb + b.zero, labels, f"{a.name}+{b.name}")


def direct_sum_maps(a: FiniteModule, b: FiniteModule, s: FiniteModule | None = None):
    """Injections and projections of a (+) b as element maps."""
    s = s or direct_sum(a, b)
    nb = b.size
    i1 = tuple(x * nb + b.zero for x in range(a.size))
    i2 = tuple(a.zero * nb + y for y in range(nb))
    p1 = tuple(z // nb for z in range(s.size))
    p2 = tuple(z % nb for z in range(s.size))
    return s, i1, i2, p1, p2


# ---- submodules --------------------------------------------------------------

def cyclic(m: FiniteModule, x: int) -> frozenset[int]:
    return frozenset(m.act[x].tolist())


def submodule_sum(m: FiniteModule, s: frozenset[int], t: frozenset[int]) -> frozenset[int]:
    if len(s) == 1:
        return t
    if len(t) == 1:
        return s
    return frozenset(np.unique(m.add[np.ix_(sorted(s), sorted(t))]).tolist())


def span(m: FiniteModule, elems: Sequence[int]) -> frozenset[int]:
    out = frozenset([m.zero])
    for x in elems:
        if x not in out:
            out = submodule_sum(m, out, cyclic(m, x))
    return out


def is_submodule(m: FiniteModule, s) -> bool:
    s = sorted(set(s))
    if m.zero not in s:
        return False
    ss = set(s)
    return (set(np.unique(m.add[np.ix_(s, s)]).tolist()) <= ss
            and set(np.unique(m.act[s]).tolist()) <= ss)


def submodules(m: FiniteModule, cap: str = "module") -> list[frozenset[int]]:
    """All submodules, sorted by size then by elements."""
    caps.require(cap, m.size)
    cyc = {}
    for x in range(m.size):
        cyc.setdefault(cyclic(m, x), x)
    cyclics = sorted(cyc, key=lambda c: (len(c), sorted(c)))
    seen = {frozenset([m.zero])}
    frontier = [frozenset([m.zero])]
    while frontier:
        nxt = []
        for s in frontier:
            for c in cyclics:
                if c <= s:
                    continue
                t = submodule_sum(m, s, c)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def generating_set(m: FiniteModule) -> list[int]:
    """Greedy generating set: repeatedly add the element whose cyclic submodule adds most."""
    gens: list[int] = []
    cur = frozenset([m.zero])
    while len(cur) < m.size:
        best, best_size = None, -1
        for x in range(m.size):
            if x in cur:
                continue
            size = len(submodule_sum(m, cur, cyclic(m, x)))
            if size > best_size:
                best, best_size = x, size
        gens.append(best)
        cur = submodule_sum(m, cur, cyclic(m, best))
    return gens


def restrict(m: FiniteModule, sub) -> tuple[FiniteModule, tuple[int, ...]]:
    """The submodule as a module of its own, with its inclusion map."""
    elems = sorted(sub)
    pos = {x: i for i, x in enumerate(elems)}
    add = [[pos[int(m.add[x, y])] for y in elems] for x in elems]
    act = [[pos[int(m.act[x, r])] for r in range(m.ring.size)] for x in elems]
    sm = FiniteModule(m.ring, np.array(add), np.array(act).reshape(len(elems), m.ring.size),
                      pos[m.zero], tuple(m.labels[x] for x in elems), f"sub({m.name})")
    return sm, tuple(elems)


def quotient(m: FiniteModule, sub) -> tuple[FiniteModule, tuple[int, ...]]:
    """M/N with the projection map."""
    sub = sorted(sub)
    cls = [-1] * m.size
    reps = []
    for x in range(m.size):
        if cls[x] != -1:
            continue
        k = len(reps)
        reps.append(x)
        for y in m.add[x, sub].tolist():
            cls[y] = k
    add = [[cls[int(m.add[x, y])] for y in reps] for x in reps]
    act = [[cls[int(m.act[x, r])] for r in range(m.ring.size)] for x in reps]
    qm = FiniteModule(m.ring, np.array(add), np.array(act).reshape(len(reps), m.ring.size),
                      cls[m.zero], tuple(m.labels[x] for x in reps), f"{m.name}/N")
    return qm, tuple(cls)


# ---- homomorphisms -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModuleHom:
    source: FiniteModule
    target: FiniteModule
    table: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __eq__(self, other):
        return (isinstance(other, ModuleHom) and self.source is other.source
                and self.target is other.target and self.table == other.table)

    def __hash__(self):
        return hash((id(self.source), id(self.target), self.table))

    def compose(self, inner: "ModuleHom") -> "ModuleHom":
        """self o inner (inner first)."""
        if inner.target is not self.source:
            raise ValueError("morphisms are not composable")
        t = self.table
        return ModuleHom(inner.source, self.target, tuple(t[x] for x in inner.table))

    def is_injective(self) -> bool:
        return len(set(self.table)) == self.source.size

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.target.size

    def is_zero(self) -> bool:
        z = self.target.zero
        return all(y == z for y in self.table)

    def image(self) -> frozenset[int]:
        return frozenset(self.table)

    def kernel(self) -> frozenset[int]:
        z = self.target.zero
        return frozenset(x for x, y in enumerate(self.table) if y == z)


def is_homomorphism(f: Sequence[int], a: FiniteModule, b: FiniteModule) -> bool:
    t = np.asarray(f, dtype=np.int64)
    if t.shape != (a.size,):
        return False
    return (np.array_equal(t[a.add], b.add[t[:, None], t[None, :]])
            and np.array_equal(t[a.act], b.act[t]))


def identity_hom(m: FiniteModule) -> ModuleHom:
    return ModuleHom(m, m, tuple(range(m.size)))


def zero_hom(a: FiniteModule, b: FiniteModule) -> ModuleHom:
    return ModuleHom(a, b, (b.zero,) * a.size)


def _ann_ok(a: FiniteModule, b: FiniteModule, g: int) -> np.ndarray:
    """Mask of y in b with ann(g) inside ann(y): a necessary condition for g -> y."""
    killers = np.nonzero(a.act[g] == a.zero)[0]
    if len(killers) == 0:
        return np.ones(b.size, dtype=bool)
    return (b.act[:, killers] == b.zero).all(axis=1)


def hom_search(a: FiniteModule, b: FiniteModule,
               allowed: Callable[[int, int], np.ndarray] | None = None,
               injective: bool = False) -> Iterator[tuple[int, ...]]:
    """Yield element maps of homs a -> b, by assigning images to the generators of a.

    `allowed(i, g)` may narrow the images of the i-th generator g (boolean mask over b).
    """
    gens = a.generators()
    if not gens:
        yield (b.zero,) * a.size
        return
    cands = []
    for i, g in enumerate(gens):
        mask = _ann_ok(a, b, g)
        if allowed is not None:
            mask = mask & allowed(i, g)
        cands.append(np.nonzero(mask)[0].tolist())
    space = 1
    for c in cands:
        space *= max(len(c), 1)
    caps.require("hom_search", space)
    a_add = a.add
    b_add = b.add
    a_act = a.act
    b_act = b.act

    def extend(img: np.ndarray, span_elems: np.ndarray, g: int, y: int):
        zs = a_add[span_elems][:, a_act[g]].ravel()
        vs = b_add[img[span_elems]][:, b_act[y]].ravel()
        new = np.full(a.size, -1, dtype=np.int64)
        new[zs] = vs
        if not np.array_equal(new[zs], vs):
            return None
        return new

    def rec(i: int, img: np.ndarray, span_elems: np.ndarray):
        if i == len(gens):
            yield tuple(img.tolist())
            return
        g = gens[i]
        for y in cands[i]:
            new = extend(img, span_elems, g, y)
            if new is None:
                continue
            elems = np.nonzero(new >= 0)[0]
            if injective and len(np.unique(new[elems])) != len(elems):
                continue
            yield from rec(i + 1, new, elems)

    img0 = np.full(a.size, -1, dtype=np.int64)
    img0[a.zero] = b.zero
    yield from rec(0, img0, np.array([a.zero]))


def hom_set(a: FiniteModule, b: FiniteModule) -> list[ModuleHom]:
    return [ModuleHom(a, b, t) for t in hom_search(a, b)]


def end_ring(m: FiniteModule, homs: Sequence[ModuleHom] | None = None) -> tuple[FiniteRing, list[ModuleHom]]:
    """End(M): pointwise sum, composition as product ((fg)(x) = f(g(x))); returns the ring and its elements."""
    homs = list(homs) if homs is not None else hom_set(m, m)
    k = len(homs)
    caps.require("ring", k)
    H = np.array([h.table for h in homs], dtype=np.int64).reshape(k, m.size)
    index = {h.table: i for i, h in enumerate(homs)}
    madd = m.add.astype(np.int64)
    add = np.empty((k, k), dtype=np.int64)
    mul = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        sums = madd[H[i][None, :], H]          # (k, m): f_i + f_j pointwise
        comps = H[i][H]                       # (k, m): f_i o f_j
        add[i] = [index[tuple(row)] for row in sums.tolist()]
        mul[i] = [index[tuple(row)] for row in comps.tolist()]
    zero = index[(m.zero,) * m.size]
    one = index[tuple(range(m.size))]
    labels = tuple(f"f{i}" for i in range(k))
    ring = FiniteRing(add, mul, zero, one, labels, f"End({m.name})")
    return ring, homs


def module_isomorphic(a: FiniteModule, b: FiniteModule) -> ModuleHom | None:
    if a.ring is not b.ring and a.ring.spec != b.ring.spec:
        raise ValueError("modules over different rings")
    if a.size != b.size:
        return None
    ia, ib = a.element_invariants(), b.element_invariants()
    if sorted(ia) != sorted(ib):
        return None
    by_inv = {}
    for y, key in enumerate(ib):
        by_inv.setdefault(key, []).append(y)
    gens = a.generators()

    def allowed(i, g):
        mask = np.zeros(b.size, dtype=bool)
        mask[by_inv.get(ia[g], [])] = True
        return mask

    for t in hom_search(a, b, allowed=allowed, injective=True):
        return ModuleHom(a, b, t)
    return None
