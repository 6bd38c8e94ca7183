"""Enumeration of modules up to isomorphism, oracle predicates, Morita search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .. import caps
from ..algebra.rings import FiniteRing
from ..algebra.structure import derivation, ring_generators, ring_isomorphic
from .module import (
    FiniteModule, ModuleHom, end_ring, free_module, hom_search, hom_set,
    module_isomorphic, regular_module, submodules,
)


# ---- abelian groups and their endomorphism matrices --------------------------

def _prime_powers(n: int) -> list[int]:
    out = []
    m, p = n, 2
    while m > 1:
        if m % p == 0:
            q = p
            while m % p == 0:
                m //= p
            while n % q == 0:
                out.append(q)
                q *= p
        p += 1
    return sorted(out)


def abelian_groups(exponent: int, order: int) -> list[tuple[int, ...]]:
    """Cyclic decompositions (sorted prime powers) of groups of the given order and exponent dividing `exponent`."""
    if order == 1:
        return [()]
    parts = _prime_powers(exponent)
    out = []

    def rec(rest: int, start: int, acc: list[int]):
        if rest == 1:
            out.append(tuple(acc))
            return
        for i in range(start, len(parts)):
            q = parts[i]
            if rest % q == 0:
                rec(rest // q, i, acc + [q])

    rec(order, 0, [])
    return sorted(out)


class _Group:
    def __init__(self, mods: tuple[int, ...]):
        self.mods = np.array(mods, dtype=np.int64)
        self.k = len(mods)
        self.order = int(np.prod(self.mods)) if mods else 1
        self.coords = np.array(list(itertools.product(*[range(q) for q in mods])),
                               dtype=np.int64).reshape(self.order, self.k)
        w = np.ones(self.k, dtype=np.int64)
        for i in range(self.k - 2, -1, -1):
            w[i] = w[i + 1] * mods[i + 1]
        self.weights = w
        self.add = self.index((self.coords[:, None, :] + self.coords[None, :, :]) % self.mods)

    def index(self, coords: np.ndarray) -> np.ndarray:
        return (coords * self.weights).sum(axis=-1)

    def end_candidates(self) -> np.ndarray:
        k, mods = self.k, self.mods.tolist()
        choices = []
        for i in range(k):
            for j in range(k):
                step = mods[j] // math.gcd(mods[i], mods[j])
                choices.append(range(0, mods[j], step))
        count = 1
        for c in choices:
            count *= len(c)
        caps.require("hom_search", count)
        arr = np.array(list(itertools.product(*choices)), dtype=np.int64)
        return arr.reshape(count, k, k)

    def element_maps(self, mats: np.ndarray) -> np.ndarray:
        """(C, k, k) matrices -> (C, |A|) element maps x -> x.M."""
        imgs = np.einsum("xi,cij->cxj", self.coords, mats) % self.mods
        return self.index(imgs)


def _act_tables(g: _Group, rho: np.ndarray) -> np.ndarray:
    """rho: (n, k, k) -> action table (|A|, n)."""
    imgs = np.einsum("xi,rij->xrj", g.coords, rho) % g.mods
    return g.index(imgs)


def _check_actions(r: FiniteRing, g: _Group, assigned: dict[int, np.ndarray],
                   steps, reached: Sequence[int]) -> np.ndarray:
    """For a batch of generator assignments, which extend to ring homs R' -> End(A) on the reached subring R'."""
    C = next(iter(assigned.values())).shape[0] if assigned else 1
    n, k, mods = r.size, g.k, g.mods
    rho = np.zeros((C, n, k, k), dtype=np.int64)
    rho[:, r.one] = np.eye(k, dtype=np.int64)
    for x, arr in assigned.items():
        rho[:, x] = arr
    for z, op, a, b in steps:
        if op == "+":
            rho[:, z] = (rho[:, a] + rho[:, b]) % mods
        else:
            rho[:, z] = (rho[:, a] @ rho[:, b]) % mods
    S = np.array(sorted(reached))
    ok = np.ones(C, dtype=bool)
    sub_add = r.add[np.ix_(S, S)].astype(np.int64)
    sub_mul = r.mul[np.ix_(S, S)].astype(np.int64)
    A = rho[:, S]
    for i in range(len(S)):
        lhs = rho[:, sub_add[i]]
        rhs = (A[:, i:i + 1] + A) % mods
        ok &= (lhs == rhs).all(axis=(1, 2, 3))
        lhs = rho[:, sub_mul[i]]
        rhs = np.einsum("cij,csjk->csik", A[:, i], A) % mods
        ok &= (lhs == rhs).all(axis=(1, 2, 3))
    return ok, rho


def _reached(r: FiniteRing, gens, steps) -> set[int]:
    return {r.zero, r.one, *gens, *(z for z, *_ in steps)}


def _batched(arr: np.ndarray, size: int):
    for i in range(0, arr.shape[0], size):
        yield arr[i:i + size]


def _structures_on(r: FiniteRing, g: _Group) -> list[FiniteModule]:
    """Module structures on the group g, one per isomorphism class."""
    gens = ring_generators(r)
    if g.k == 0:
        m = FiniteModule(r, np.zeros((1, 1)), np.zeros((1, r.size)), 0, ("0",), "0")
        return [m]
    steps = derivation(r, gens)
    if not gens:
        ok, rho = _check_actions(r, g, {}, steps, range(r.size))
        return [_module_from(r, g, rho[0])] if ok[0] else []
    ends = g.end_candidates()
    chunk = max(1, 4_000_000 // (r.size * r.size * g.k * g.k))

    def filt(x: int) -> np.ndarray:
        st = derivation(r, [x], complete=False)
        reach = _reached(r, [x], st)
        keep = []
        for batch in _batched(ends, chunk):
            ok, _ = _check_actions(r, g, {x: batch}, st, reach)
            keep.append(batch[ok])
        return np.concatenate(keep) if keep else ends[:0]

    per_gen = [filt(x) for x in gens]
    if any(len(c) == 0 for c in per_gen):
        return []
    # the first generator only up to conjugation by Aut(A)
    first = per_gen[0]
    maps = g.element_maps(ends)
    bij = np.array([len(np.unique(row)) == g.order for row in maps])
    auts, aut_maps = ends[bij], maps[bij]
    basis_idx = [int(g.index(np.eye(g.k, dtype=np.int64)[i])) for i in range(g.k)]
    inv = np.argsort(aut_maps, axis=1)
    aut_inv = g.coords[inv[:, basis_idx]]          # rows of the inverse matrices
    keys = {row.tobytes(): i for i, row in enumerate(first.reshape(len(first), -1))}
    seen = np.zeros(len(first), dtype=bool)
    reps = []
    for i in range(len(first)):
        if seen[i]:
            continue
        reps.append(first[i])
        conj = np.einsum("aij,jk,akl->ail", aut_inv, first[i], auts) % g.mods
        for row in conj.reshape(len(conj), -1):
            j = keys.get(row.tobytes())
            if j is not None:
                seen[j] = True
    reps = np.array(reps).reshape(len(reps), g.k, g.k)
    found: list[FiniteModule] = []
    rest = per_gen[1:]
    combos = itertools.product(range(len(reps)), *[range(len(c)) for c in rest])
    total = len(reps)
    for c in rest:
        total *= len(c)
    caps.require("hom_search", total)
    idx = np.array(list(combos), dtype=np.int64).reshape(total, 1 + len(rest))
    everything = set(range(r.size))
    for batch in _batched(idx, chunk):
        assigned = {gens[0]: reps[batch[:, 0]]}
        for t, c in enumerate(rest):
            x = gens[t + 1]
            assigned[x] = c[batch[:, t + 1]]
        ok, rho = _check_actions(r, g, assigned, steps, everything)
        for row in rho[ok]:
            m = _module_from(r, g, row)
            if not any(module_isomorphic(m, other) for other in found):
                found.append(m)
    return found


def _module_from(r: FiniteRing, g: _Group, rho: np.ndarray) -> FiniteModule:
    labels = tuple("(" + ",".join(map(str, c)) + ")" if g.k > 1 else str(c[0]) for c in g.coords.tolist())
    return FiniteModule(r, g.add, _act_tables(g, rho), 0, labels, "")


def _group_name(mods: Sequence[int]) -> str:
    if not mods:
        return "0"
    parts = []
    for q, grp in itertools.groupby(mods):
        e = len(list(grp))
        parts.append(f"Z{q}" + (f"^{e}" if e > 1 else ""))
    return "+".join(parts)


def iter_modules(r: FiniteRing, bound: int) -> Iterator[FiniteModule]:
    """Representatives of the isomorphism classes of modules with at most `bound` elements, by increasing size."""
    char = r.characteristic()
    for order in range(1, bound + 1):
        for mods in abelian_groups(char, order):
            caps.require("module", order)
            g = _Group(mods)
            ms = _structures_on(r, g)
            for i, m in enumerate(ms):
                m.name = _group_name(mods) + (f"#{i + 1}" if len(ms) > 1 else "")
                yield m


# ---- skeleton ------------------------------------------------------------------

@dataclass(eq=False)
class Skeleton:
    ring: FiniteRing
    bound: int
    modules: list[FiniteModule]
    homs: dict[tuple[int, int], list[ModuleHom]] = field(repr=False, default_factory=dict)
    regular: int | None = None

    def __len__(self):
        return len(self.modules)

    def index_of(self, m: FiniteModule) -> int:
        """Position of the representative isomorphic to m."""
        for i, x in enumerate(self.modules):
            if x is m or module_isomorphic(m, x) is not None:
                return i
        raise KeyError("module not represented in the skeleton")

    def morphism_count(self) -> int:
        return sum(len(v) for v in self.homs.values())


def build_skeleton(r: FiniteRing, bound: int) -> Skeleton:
    caps.require("skeleton", bound)
    if bound < 1:
        raise ValueError("bound must be at least 1")
    mods = list(iter_modules(r, bound))
    # put R_R under its own name
    regular = None
    if r.size <= bound:
        rr = regular_module(r)
        for i, m in enumerate(mods):
            if m.size == r.size and module_isomorphic(m, rr) is not None:
                regular = i
                m.name = f"{m.name} (R_R)"
                break
    skel = Skeleton(r, bound, mods, {}, regular)
    total = 0
    for i, a in enumerate(mods):
        for j, b in enumerate(mods):
            hs = hom_set(a, b)
            total += len(hs)
            caps.require("morphisms", total)
            skel.homs[(i, j)] = hs
    return skel


# ---- oracle predicates -----------------------------------------------------------

@dataclass(frozen=True)
class ModulePredicates:
    simple: bool
    projective: bool | None
    injective: bool | None
    generator: bool | None
    progenerator: bool | None
    injective_baer: bool | None = None
    generator_power: int | None = None

    def to_json(self) -> dict:
        def v(x):
            return "unknown" if x is None else x
        return {"simple": self.simple, "projective": v(self.projective), "injective": v(self.injective),
                "generator": v(self.generator), "progenerator": v(self.progenerator),
                "injective_baer": v(self.injective_baer), "generator_power": self.generator_power}


def is_simple(m: FiniteModule) -> bool:
    return m.size > 1 and len(submodules(m)) == 2


def canonical_cover(m: FiniteModule) -> tuple[FiniteModule, ModuleHom]:
    """The surjection R^k -> M sending the unit vectors to the generators of M."""
    gens = m.generators()
    k = len(gens)
    caps.require("rank", k)
    f = free_module(m.ring, k)
    n = m.ring.size
    table = []
    for e in range(f.size):
        digits = []
        for _ in range(k):
            digits.append(e % n)
            e //= n
        digits.reverse()
        acc = m.zero
        for gi, ri in zip(gens, digits):
            acc = int(m.add[acc, m.act[gi, ri]])
        table.append(acc)
    return f, ModuleHom(f, m, tuple(table))


def find_section(p: ModuleHom) -> ModuleHom | None:
    """s with p o s = id, if p is a split epimorphism."""
    src, tgt = p.source, p.target
    pt = np.array(p.table)
    for t in hom_search(tgt, src, allowed=lambda i, g: pt == g):
        return ModuleHom(tgt, src, t)
    return None


def is_projective(m: FiniteModule) -> bool | None:
    if m.size == 1:
        return True
    try:
        _, pi = canonical_cover(m)
    except caps.CapExceeded:
        return None
    return find_section(pi) is not None


def generator_power(m: FiniteModule) -> int | None:
    """Least n with R a direct summand of M^n, or None if M is not a generator.

    Equivalently the least n with 1 a sum of n elements of images of maps M -> R_R.
    """
    r = m.ring
    rr = regular_module(r)
    images = set()
    for t in hom_search(m, rr):
        images.update(t)
    images = sorted(images)
    reach = {r.zero}
    n = 0
    while r.one not in reach:
        new = set(np.unique(r.add[np.ix_(sorted(reach), images)]).tolist())
        if new <= reach:
            return None
        reach |= new
        n += 1
    return max(n, 1)


def is_injective_baer(m: FiniteModule) -> bool:
    """Every map from a right ideal to M extends to R_R."""
    r = m.ring
    rr = regular_module(r)
    from .module import restrict
    for ideal in submodules(rr):
        sub, incl = restrict(rr, ideal)
        homs = {t for t in hom_search(sub, m)}
        # maps R -> M are x |-> m0.x; restrict along the inclusion
        restr = {tuple(int(m.act[m0, incl[i]]) for i in range(sub.size)) for m0 in range(m.size)}
        if len(restr) != len(homs):
            return False
    return True


def is_injective_relative(skel: Skeleton, m_index: int) -> bool:
    """Lifting along every mono between representatives."""
    n = len(skel.modules)
    for x in range(n):
        gx = skel.homs[(x, m_index)]
        for y in range(n):
            for f in skel.homs[(x, y)]:
                if not f.is_injective():
                    continue
                ft = f.table
                restr = {tuple(h.table[v] for v in ft) for h in skel.homs[(y, m_index)]}
                if len(restr) != len(gx):
                    return False
    return True


def module_predicates(m: FiniteModule, skel: Skeleton | None = None) -> ModulePredicates:
    simple = is_simple(m)
    proj = is_projective(m)
    gp = generator_power(m)
    gen = gp is not None
    inj = None
    if skel is not None:
        try:
            idx = skel.index_of(m)
            inj = is_injective_relative(skel, idx)
        except KeyError:
            inj = None
    baer = is_injective_baer(m)
    prog = None if proj is None else (proj and gen)
    return ModulePredicates(simple, proj, inj, gen, prog, baer, gp)


def summand_of_free(m: FiniteModule) -> tuple[ModuleHom, ModuleHom] | None:
    """(s, p) with p: R^k -> M, s: M -> R^k and p o s = id, so that R^k = M (+) ker p."""
    _, pi = canonical_cover(m)
    sec = find_section(pi)
    return None if sec is None else (sec, pi)


# ---- Morita --------------------------------------------------------------------

@dataclass
class MoritaResult:
    status: str                     # "found" | "absent" | "unknown"
    witness: FiniteModule | None
    isomorphism: list[int] | None
    searched_bound: int
    theoretical_bound: int
    reason: str = ""

    def to_json(self) -> dict:
        return {"status": self.status,
                "witness_size": None if self.witness is None else self.witness.size,
                "witness": None if self.witness is None else self.witness.name,
                "searched_bound": self.searched_bound,
                "theoretical_bound": self.theoretical_bound,
                "reason": self.reason}


def morita_similar(r: FiniteRing, s: FiniteRing, bound: int | None = None) -> MoritaResult:
    """Look for a progenerator P over s with End(P) isomorphic to r."""
    theory = s.size * r.size
    limit = theory if bound is None else min(bound, theory)
    try:
        for p in iter_modules(s, limit):
            if p.size == 1:
                continue
            homs = list(hom_search(p, p))
            if len(homs) != r.size:
                continue
            e, _ = end_ring(p, [ModuleHom(p, p, t) for t in homs])
            iso = ring_isomorphic(r, e)
            if iso is None:
                continue
            pr = module_predicates(p)
            if pr.progenerator:
                return MoritaResult("found", p, iso, limit, theory,
                                    f"End({p.name}) is isomorphic to {r.name}")
    except caps.CapExceeded as exc:
        return MoritaResult("unknown", None, None, limit, theory, str(exc))
    if limit >= theory:
        return MoritaResult("absent", None, None, limit, theory,
                            "no progenerator within the theoretical size bound")
    return MoritaResult("unknown", None, None, limit, theory, "search bound below the theoretical bound")
