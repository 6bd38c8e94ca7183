"""Units, centre, ring isomorphism, the table sentence of a ring, beautiful combinations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import caps
from ..logic.syntax import (
    App, Const, Eq, Exists, Forall, Formula, Var, conj, disj, neq,
)
from .rings import FiniteRing


@dataclass(frozen=True)
class RingFeatures:
    units: frozenset[int]
    central_idempotents: frozenset[int]
    center: FiniteRing
    center_elements: tuple[int, ...]


def units(r: FiniteRing) -> frozenset[int]:
    m = r.mul
    left = (m == r.one)
    # x is a unit iff some y has xy = 1 = yx
    both = left & left.T
    return frozenset(int(x) for x in np.nonzero(both.any(axis=1))[0])


def inverse(r: FiniteRing, x: int) -> int | None:
    for y in range(r.size):
        if r.mul[x, y] == r.one and r.mul[y, x] == r.one:
            return y
    return None


def center_elements(r: FiniteRing) -> tuple[int, ...]:
    comm = (r.mul == r.mul.T).all(axis=1)
    return tuple(int(x) for x in np.nonzero(comm)[0])


def idempotents(r: FiniteRing) -> tuple[int, ...]:
    d = r.mul[np.arange(r.size), np.arange(r.size)]
    return tuple(int(x) for x in np.nonzero(d == np.arange(r.size))[0])


def subring(r: FiniteRing, elements: Sequence[int], name: str = "") -> FiniteRing:
    """The ring on a subset closed under the operations, relabelled 0..k-1."""
    elems = list(elements)
    pos = {x: i for i, x in enumerate(elems)}
    try:
        add = [[pos[int(r.add[x, y])] for y in elems] for x in elems]
        mul = [[pos[int(r.mul[x, y])] for y in elems] for x in elems]
    except KeyError as exc:
        raise ValueError("subset is not closed under the ring operations") from exc
    return FiniteRing(np.array(add), np.array(mul), pos[r.zero], pos[r.one],
                      tuple(r.labels[x] for x in elems), name)


def ring_features(r: FiniteRing) -> RingFeatures:
    cen = center_elements(r)
    cset = set(cen)
    cid = frozenset(e for e in idempotents(r) if e in cset)
    return RingFeatures(units(r), cid, subring(r, cen, f"Z({r.name})"), cen)


# ---- isomorphism -----------------------------------------------------------

def _closure(r: FiniteRing, seeds: Sequence[int]) -> np.ndarray:
    mask = np.zeros(r.size, dtype=bool)
    mask[[r.zero, r.one, *seeds]] = True
    while True:
        idx = np.nonzero(mask)[0]
        new = mask.copy()
        new[r.add[np.ix_(idx, idx)].ravel()] = True
        new[r.mul[np.ix_(idx, idx)].ravel()] = True
        if new.sum() == mask.sum():
            return mask
        mask = new


def ring_generators(r: FiniteRing) -> list[int]:
    """A small generating set, grown greedily by the size of the generated subring."""
    gens: list[int] = []
    mask = _closure(r, gens)
    while not mask.all():
        best, best_size = None, -1
        for x in range(r.size):
            if mask[x]:
                continue
            s = int(_closure(r, gens + [x]).sum())
            if s > best_size:
                best, best_size = x, s
        gens.append(best)
        mask = _closure(r, gens)
    return gens


def derivation(r: FiniteRing, gens: Sequence[int], complete: bool = True) -> list[tuple[int, str, int, int]]:
    """How each element arises from 0, 1 and the generators: (element, op, a, b).

    With complete=False the generated subring may be proper.
    """
    known = [r.zero]
    seen = {r.zero}
    steps: list[tuple[int, str, int, int]] = []
    for g in [r.one, *gens]:
        if g not in seen:
            seen.add(g)
            known.append(g)
    i = 0
    while i < len(known):
        x = known[i]
        for j in range(i + 1):
            y = known[j]
            for op, table in (("+", r.add), ("*", r.mul)):
                for a, b in ((x, y), (y, x)):
                    z = int(table[a, b])
                    if z not in seen:
                        seen.add(z)
                        known.append(z)
                        steps.append((z, op, a, b))
        i += 1
    if complete and len(seen) != r.size:
        raise ValueError("generators do not generate the ring")
    return steps


def _element_invariants(r: FiniteRing) -> list[tuple]:
    n = r.size
    out = []
    unit = units(r)
    for x in range(n):
        k, y = 1, x
        while y != r.zero:
            y = int(r.add[y, x])
            k += 1
        seq, y = [], x
        while y not in seq:
            seq.append(y)
            y = int(r.mul[y, x])
        out.append((
            k,
            len(seq), seq.index(y),
            x in unit,
            int((r.mul[x] == r.zero).sum()),
            int((r.mul[:, x] == r.zero).sum()),
            int((r.mul[x] == r.mul[:, x]).sum()),
        ))
    return out


def ring_isomorphic(r1: FiniteRing, r2: FiniteRing) -> list[int] | None:
    """A bijection preserving +, *, 0, 1 (as a list: element of r1 -> element of r2), or None."""
    if r1.size != r2.size:
        return None
    inv1, inv2 = _element_invariants(r1), _element_invariants(r2)
    if sorted(inv1) != sorted(inv2):
        return None
    gens = ring_generators(r1)
    steps = derivation(r1, gens)
    cands = [[y for y in range(r2.size) if inv2[y] == inv1[g]] for g in gens]
    a1 = r1.add.astype(np.int64)
    m1 = r1.mul.astype(np.int64)
    a2 = r2.add.astype(np.int64)
    m2 = r2.mul.astype(np.int64)
    for images in itertools.product(*cands):
        img = [-1] * r1.size
        img[r1.zero] = r2.zero
        img[r1.one] = r2.one
        ok = True
        for g, h in zip(gens, images):
            if img[g] not in (-1, h):
                ok = False
                break
            img[g] = h
        if not ok:
            continue
        for z, op, a, b in steps:
            table = a2 if op == "+" else m2
            img[z] = int(table[img[a], img[b]])
        f = np.array(img)
        if len(set(img)) != r1.size:
            continue
        if np.array_equal(f[a1], a2[np.ix_(f, f)]) and np.array_equal(f[m1], m2[np.ix_(f, f)]):
            return img
    return None


# ---- the table sentence ----------------------------------------------------

def sentence_phi_R(r: FiniteRing) -> Formula:
    """exists x_1..x_m: pairwise distinct, exhaustive, with the addition and multiplication tables of r."""
    caps.require("ring", r.size)
    xs = [Var(f"x{i}", "R") for i in range(r.size)]
    parts: list[Formula] = [neq(xs[i], xs[j]) for i in range(r.size) for j in range(i + 1, r.size)]
    y = Var("y", "R")
    parts.append(Forall(y, disj(Eq(y, x) for x in xs)))
    for i in range(r.size):
        for j in range(r.size):
            parts.append(Eq(App("add", (xs[i], xs[j])), xs[int(r.add[i, j])]))
    for i in range(r.size):
        for j in range(r.size):
            parts.append(Eq(App("mul", (xs[i], xs[j])), xs[int(r.mul[i, j])]))
    body = conj(parts)
    for x in reversed(xs):
        body = Exists(x, body)
    return body


# ---- beautiful linear combinations -----------------------------------------

@dataclass(frozen=True)
class LinearCombination:
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) < 1:
            raise ValueError("a linear combination needs at least one coefficient")

    def __len__(self):
        return len(self.coefficients)

    def apply(self, r: FiniteRing, xs: Sequence[int]) -> int:
        """alpha_1 x_1 + ... + alpha_n x_n with x_i in the regular module (x r, scalars on the left of x)."""
        acc = r.zero
        for a, x in zip(self.coefficients, xs):
            acc = int(r.add[acc, r.mul[a, x]])
        return acc


def _identities_hold(r: FiniteRing, lhs, rhs, nvars: int) -> bool:
    """lhs == rhs for all assignments; both sides are additive in every variable,
    so it suffices to let one variable vary at a time with the others at zero,
    provided lhs and rhs are sums of one-variable terms."""
    for i in range(nvars):
        for x in range(r.size):
            xs = [r.zero] * nvars
            xs[i] = x
            if lhs(xs) != rhs(xs):
                return False
    return True


def is_beautiful(tau: LinearCombination, r: FiniteRing, sigma_bound: int = 2) -> bool:
    """Identities (a) commuting with every sigma of length <= sigma_bound,
    (b) tau(tau(x_11..x_1n), ..., tau(x_n1..x_nn)) = tau(x_11, x_22, ..., x_nn),
    (c) tau(x, ..., x) = x; variables range over the regular module R."""
    n = len(tau)
    a = tau.coefficients
    R = r.size
    # (c)
    for x in range(R):
        if tau.apply(r, [x] * n) != x:
            return False
    # (b): the matrix of variables x_ij, n*n of them; both sides are additive
    def lhs_b(xs):
        rows = [tau.apply(r, xs[i * n:(i + 1) * n]) for i in range(n)]
        return tau.apply(r, rows)

    def rhs_b(xs):
        return tau.apply(r, [xs[i * n + i] for i in range(n)])

    if not _identities_hold(r, lhs_b, rhs_b, n * n):
        return False
    # (a): tau(sigma(x_11..x_1m), ..., sigma(x_n1..x_nm)) = sigma(tau(x_11..x_n1), ..., tau(x_1m..x_nm))
    for m in range(1, sigma_bound + 1):
        for beta in itertools.product(range(R), repeat=m):
            sigma = LinearCombination(beta)

            def lhs_a(xs, sigma=sigma, m=m):
                return tau.apply(r, [sigma.apply(r, xs[i * m:(i + 1) * m]) for i in range(n)])

            def rhs_a(xs, sigma=sigma, m=m):
                return sigma.apply(r, [tau.apply(r, [xs[i * m + j] for i in range(n)]) for j in range(m)])

            if not _identities_hold(r, lhs_a, rhs_a, n * m):
                return False
    return True


def is_beautiful_exhaustive(tau: LinearCombination, r: FiniteRing, sigma_bound: int = 2) -> bool:
    """Same identities checked over every assignment of all variables (slow reference)."""
    n = len(tau)
    R = r.size
    for x in range(R):
        if tau.apply(r, [x] * n) != x:
            return False
    for xs in itertools.product(range(R), repeat=n * n):
        rows = [tau.apply(r, xs[i * n:(i + 1) * n]) for i in range(n)]
        if tau.apply(r, rows) != tau.apply(r, [xs[i * n + i] for i in range(n)]):
            return False
    for m in range(1, sigma_bound + 1):
        for beta in itertools.product(range(R), repeat=m):
            sigma = LinearCombination(beta)
            for xs in itertools.product(range(R), repeat=n * m):
                left = tau.apply(r, [sigma.apply(r, xs[i * m:(i + 1) * m]) for i in range(n)])
                right = sigma.apply(r, [tau.apply(r, [xs[i * m + j] for i in range(n)]) for j in range(m)])
                if left != right:
                    return False
    return True


def enumerate_beautiful(r: FiniteRing, n: int, sigma_bound: int = 2) -> list[LinearCombination]:
    if n < 1:
        raise ValueError("length must be at least 1")
    caps.require("beautiful", r.size ** n)
    return [LinearCombination(c) for c in itertools.product(range(r.size), repeat=n)
            if is_beautiful(LinearCombination(c), r, sigma_bound)]


def beautiful_characterization(r: FiniteRing, n: int) -> list[LinearCombination]:
    """Tuples of central idempotents, pairwise orthogonal, summing to 1."""
    cid = sorted(ring_features(r).central_idempotents)
    out = []
    for c in itertools.product(cid, repeat=n):
        if any(r.mul[c[i], c[j]] != r.zero for i in range(n) for j in range(n) if i != j):
            continue
        total = r.zero
        for x in c:
            total = int(r.add[total, x])
        if total == r.one:
            out.append(LinearCombination(tuple(c)))
    return out
