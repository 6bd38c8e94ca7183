"""Finite rings with unit stored as dense operation tables."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import caps
from ..logic.semantics import FiniteModel, FunctionTable
from ..logic.syntax import RING_SIGNATURE


class RingAxiomError(ValueError):
    pass


class RingSpecError(ValueError):
    pass


def _dtype(n: int):
    return np.uint8 if n <= 256 else np.int32


@dataclass(eq=False)
class FiniteRing:
    add: np.ndarray
    mul: np.ndarray
    zero: int
    one: int
    labels: tuple[str, ...] = ()
    name: str = ""
    spec: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.add.shape[0]
        self.add = np.asarray(self.add, dtype=_dtype(n))
        self.mul = np.asarray(self.mul, dtype=_dtype(n))
        if not self.labels:
            self.labels = tuple(str(i) for i in range(n))
        self.neg = np.argmin(self.add != self.zero, axis=1).astype(_dtype(n))
        self._model = None

    @property
    def size(self) -> int:
        return self.add.shape[0]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FiniteRing({self.name or '?'}, n={self.size})"

    def elements(self) -> range:
        return range(self.size)

    def a(self, x: int, y: int) -> int:
        return int(self.add[x, y])

    def m(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def sub(self, x: int, y: int) -> int:
        return int(self.add[x, self.neg[y]])

    def times(self, k: int, x: int) -> int:
        """k-fold sum x + ... + x for k >= 0."""
        acc = self.zero
        for _ in range(k):
            acc = int(self.add[acc, x])
        return acc

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def characteristic(self) -> int:
        k, x = 1, self.one
        while x != self.zero:
            x = int(self.add[x, self.one])
            k += 1
        return k

    def element(self, label: str) -> int:
        return self.labels.index(label)

    def model(self) -> FiniteModel:
        """The ring as a model over the ring signature (add, mul, neg, zero, one)."""
        if self._model is None:
            self._model = FiniteModel(
                signature=RING_SIGNATURE,
                carriers={"R": self.size},
                functions={
                    "add": FunctionTable(2, self.add.tolist()),
                    "mul": FunctionTable(2, self.mul.tolist()),
                    "neg": FunctionTable(1, self.neg.tolist()),
                },
                relations={},
                constants={"zero": int(self.zero), "one": int(self.one)},
                name=self.name,
            )
        return self._model

    def to_json(self) -> dict:
        return {"kind": "tables", "add": self.add.tolist(), "mul": self.mul.tolist(),
                "zero": int(self.zero), "one": int(self.one)}


def verify_ring_axioms(add: np.ndarray, mul: np.ndarray, zero: int, one: int) -> None:
    """Raise RingAxiomError naming the first failing axiom."""
    add = np.asarray(add)
    mul = np.asarray(mul)
    if add.ndim != 2 or add.shape[0] != add.shape[1] or mul.shape != add.shape:
        raise RingAxiomError("tables must be square and of equal size")
    n = add.shape[0]
    if n < 1:
        raise RingAxiomError("empty carrier")
    if add.min() < 0 or add.max() >= n or mul.min() < 0 or mul.max() >= n:
        raise RingAxiomError("table entry outside the carrier")
    if not (0 <= zero < n and 0 <= one < n):
        raise RingAxiomError("zero/one outside the carrier")
    idx = np.arange(n)
    add = add.astype(np.int16)
    mul = mul.astype(np.int16)
    if not np.array_equal(add, add.T):
        raise RingAxiomError("addition is not commutative")
    if not np.array_equal(add[zero], idx):
        raise RingAxiomError("zero is not an additive identity")
    if not np.all((add == zero).any(axis=1)):
        raise RingAxiomError("some element has no additive inverse")
    if not np.array_equal(add[add, :], add[:, add]):
        raise RingAxiomError("addition is not associative")
    if not (np.array_equal(mul[one], idx) and np.array_equal(mul[:, one], idx)):
        raise RingAxiomError("one is not a two-sided multiplicative identity")
    if not np.array_equal(mul[mul, :], mul[:, mul]):
        raise RingAxiomError("multiplication is not associative")
    # x(y+z) = xy + xz and (x+y)z = xz + yz
    if not np.array_equal(mul[:, add], add[mul[:, :, None], mul[:, None, :]]):
        raise RingAxiomError("left distributivity fails")
    if not np.array_equal(mul[add, :], add[mul[:, None, :], mul[None, :, :]]):
        raise RingAxiomError("right distributivity fails")


def ring_from_tables(add, mul, zero: int | None = None, one: int | None = None,
                     labels: Sequence[str] = (), name: str = "", spec: dict | None = None) -> FiniteRing:
    add = np.asarray(add, dtype=np.int64)
    mul = np.asarray(mul, dtype=np.int64)
    if add.ndim != 2 or add.shape[0] != add.shape[1]:
        raise RingAxiomError("tables must be square")
    n = add.shape[0]
    caps.require("ring", n)
    idx = np.arange(n)
    if zero is None:
        hits = [z for z in range(n) if np.array_equal(add[z], idx)]
        if not hits:
            raise RingAxiomError("no additive identity")
        zero = hits[0]
    if one is None:
        hits = [u for u in range(n) if mul.shape == add.shape
                and np.array_equal(mul[u], idx) and np.array_equal(mul[:, u], idx)]
        if not hits:
            raise RingAxiomError("no multiplicative identity")
        one = hits[0]
    verify_ring_axioms(add, mul, zero, one)
    return FiniteRing(add, mul, int(zero), int(one), tuple(labels), name, spec)


# ---- specs -----------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def _poly_label(coeffs: Sequence[int]) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mon if c == 1 else f"{c}{mon}")
    return "+".join(terms) if terms else "0"


def spec_name(spec: dict) -> str:
    kind = spec.get("kind")
    if kind == "zmod":
        return f"Z/{spec['n']}"
    if kind == "matrix":
        return f"M{spec['k']}({spec_name(spec['base'])})"
    if kind == "poly_quotient":
        return f"F{spec['p']}[x]/({_poly_label(spec['modulus'])})"
    if kind == "product":
        return f"{spec_name(spec['left'])} x {spec_name(spec['right'])}"
    if kind == "opposite":
        return f"op({spec_name(spec['base'])})"
    if kind == "tables":
        return spec.get("name", f"tables[{len(spec['add'])}]")
    raise RingSpecError(f"unknown ring kind {kind!r}")


def spec_size(spec: dict) -> int:
    kind = spec.get("kind")
    if kind == "zmod":
        return int(spec["n"])
    if kind == "matrix":
        return spec_size(spec["base"]) ** (int(spec["k"]) ** 2)
    if kind == "poly_quotient":
        return int(spec["p"]) ** (len(spec["modulus"]) - 1)
    if kind == "product":
        return spec_size(spec["left"]) * spec_size(spec["right"])
    if kind == "opposite":
        return spec_size(spec["base"])
    if kind == "tables":
        return len(spec["add"])
    raise RingSpecError(f"unknown ring kind {kind!r}")


def _zmod(n: int) -> FiniteRing:
    if n < 1:
        raise RingSpecError("zmod needs n >= 1")
    i = np.arange(n)
    return FiniteRing((i[:, None] + i[None, :]) % n, (i[:, None] * i[None, :]) % n, 0, 1 % n)


def _matrix(base: FiniteRing, k: int) -> FiniteRing:
    if k < 1:
        raise RingSpecError("matrix needs k >= 1")
    nb = base.size
    N = nb ** (k * k)
    caps.require("ring", N)
    # digits[e, i*k + j] is entry (i, j) of element e; entry (0, 0) is most significant
    digits = np.array(list(itertools.product(range(nb), repeat=k * k)), dtype=np.int64).reshape(N, k, k)
    weights = nb ** np.arange(k * k - 1, -1, -1).reshape(k, k)
    badd = base.add.astype(np.int64)
    bmul = base.mul.astype(np.int64)
    sums = badd[digits[:, None, :, :], digits[None, :, :, :]]
    add = (sums * weights).sum(axis=(2, 3))
    prod = np.zeros((N, N, k, k), dtype=np.int64)
    for i in range(k):
        for l in range(k):
            acc = np.full((N, N), base.zero, dtype=np.int64)
            for j in range(k):
                term = bmul[digits[:, None, i, j], digits[None, :, j, l]]
                acc = badd[acc, term]
            prod[:, :, i, l] = acc
    mul = (prod * weights).sum(axis=(2, 3))
    zero = int((np.full((k, k), base.zero) * weights).sum())
    ident = np.full((k, k), base.zero)
    np.fill_diagonal(ident, base.one)
    one = int((ident * weights).sum())
    labels = tuple("[" + ";".join(",".join(base.labels[digits[e, i, j]] for j in range(k)) for i in range(k)) + "]"
                   for e in range(N))
    return FiniteRing(add, mul, zero, one, labels)


def _poly_quotient(p: int, modulus: Sequence[int]) -> FiniteRing:
    if not _is_prime(p):
        raise RingSpecError(f"{p} is not prime")
    mod = [int(c) % p for c in modulus]
    d = len(mod) - 1
    if d < 1 or mod[-1] != 1:
        raise RingSpecError("modulus must be monic of degree >= 1 (coefficients constant first)")
    N = p ** d
    caps.require("ring", N)
    coeffs = np.array([[(e // p ** i) % p for i in range(d)] for e in range(N)], dtype=np.int64)
    weights = p ** np.arange(d)
    add = (((coeffs[:, None, :] + coeffs[None, :, :]) % p) * weights).sum(axis=2)
    full = np.zeros((N, N, 2 * d - 1), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            full[:, :, i + j] += coeffs[:, None, i] * coeffs[None, :, j]
    full %= p
    # reduce x^t for t >= d using x^d = -(m_0 + ... + m_{d-1} x^{d-1})
    for t in range(2 * d - 2, d - 1, -1):
        c = full[:, :, t].copy()
        full[:, :, t] = 0
        for i in range(d):
            full[:, :, t - d + i] = (full[:, :, t - d + i] - c * mod[i]) % p
    mul = (full[:, :, :d] * weights).sum(axis=2)
    labels = tuple(_poly_label(list(coeffs[e])) for e in range(N))
    return FiniteRing(add, mul, 0, 1, labels)


def _product(a: FiniteRing, b: FiniteRing) -> FiniteRing:
    na, nb = a.size, b.size
    caps.require("ring", na * nb)
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    aa, ba = a.add.astype(np.int64), b.add.astype(np.int64)
    am, bm = a.mul.astype(np.int64), b.mul.astype(np.int64)
    add = aa[ia[:, None], ia[None, :]] * nb + ba[ib[:, None], ib[None, :]]
    mul = am[ia[:, None], ia[None, :]] * nb + bm[ib[:, None], ib[None, :]]
    labels = tuple(f"({a.labels[x]},{b.labels[y]})" for x, y in zip(ia, ib))
    return FiniteRing(add, mul, a.zero * nb + b.zero, a.one * nb + b.one, labels)


def build_ring(spec: dict | str, verify: bool = True) -> FiniteRing:
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise RingSpecError("ring spec must be an object with a 'kind'")
    kind = spec["kind"]
    caps.require("ring", spec_size(spec))
    if kind == "zmod":
        r = _zmod(int(spec["n"]))
    elif kind == "matrix":
        r = _matrix(build_ring(spec["base"], verify=False), int(spec["k"]))
    elif kind == "poly_quotient":
        r = _poly_quotient(int(spec["p"]), spec["modulus"])
    elif kind == "product":
        r = _product(build_ring(spec["left"], verify=False), build_ring(spec["right"], verify=False))
    elif kind == "opposite":
        base = build_ring(spec["base"], verify=False)
        r = FiniteRing(base.add.copy(), base.mul.T.copy(), base.zero, base.one, base.labels)
    elif kind == "tables":
        r = ring_from_tables(spec["add"], spec["mul"], spec.get("zero"), spec.get("one"),
                             spec.get("labels", ()))
    else:
        raise RingSpecError(f"unknown ring kind {kind!r}")
    if verify and kind != "tables":
        verify_ring_axioms(r.add, r.mul, r.zero, r.one)
    r.name = spec_name(spec)
    r.spec = spec
    return r


def zmod(n: int) -> dict:
    return {"kind": "zmod", "n": n}


def matrix(base: dict, k: int) -> dict:
    return {"kind": "matrix", "base": base, "k": k}


def poly_quotient(p: int, modulus: Sequence[int]) -> dict:
    return {"kind": "poly_quotient", "p": p, "modulus": list(modulus)}


def product(left: dict, right: dict) -> dict:
    return {"kind": "product", "left": left, "right": right}


def opposite(base: dict) -> dict:
    return {"kind": "opposite", "base": base}


DEFAULT_CATALOG = (
    zmod(2),
    zmod(3),
    zmod(4),
    zmod(6),
    poly_quotient(2, [0, 0, 1]),
    poly_quotient(2, [1, 1, 1]),
    matrix(zmod(2), 2),
    product(zmod(2), zmod(2)),
)


def catalog_rings() -> list[FiniteRing]:
    return [build_ring(s) for s in DEFAULT_CATALOG]
