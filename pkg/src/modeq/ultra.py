"""Filters over finite index sets and filter products of finite models.

Subsets of I = {0, ..., n-1} are bitmasks: bit i set means i is in the subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import caps
from .logic.semantics import FiniteModel, FunctionTable, TupleRelation, evaluate, models_isomorphic
from .logic.syntax import Formula, is_sentence


class FilterError(ValueError):
    pass


def subset_mask(elements) -> int:
    m = 0
    for i in elements:
        m |= 1 << i
    return m


def mask_elements(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


@dataclass(frozen=True)
class Filter:
    n: int                          # |I|
    members: frozenset[int]         # subsets as bitmasks

    def __post_init__(self):
        check_filter_axioms(self.n, self.members)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    @property
    def proper(self) -> bool:
        return 0 not in self.members

    @property
    def generator(self) -> int:
        """The intersection of all members; it is a member, so the filter is principal."""
        g = self.full
        for m in self.members:
            g &= m
        return g

    @property
    def is_ultra(self) -> bool:
        return self.proper and all((x in self.members) != ((self.full ^ x) in self.members)
                                   for x in range(1 << self.n))

    def describe(self) -> dict:
        return {"index_size": self.n, "generator": list(mask_elements(self.generator, self.n)),
                "members": len(self.members), "proper": self.proper, "ultra": self.is_ultra}


class Ultrafilter(Filter):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_ultra:
            raise FilterError("not an ultrafilter: some X has neither or both of X, I minus X")


def check_filter_axioms(n: int, members) -> None:
    full = (1 << n) - 1
    ms = set(members)
    if any(not 0 <= m <= full for m in ms):
        raise FilterError("member is not a subset of I")
    if full not in ms:
        raise FilterError("I is not a member")
    for a in ms:
        for b in ms:
            if a & b not in ms:
                raise FilterError("not closed under intersection")
    for a in ms:
        # every superset of a: a | s for s ranging over subsets of the complement
        rest = full ^ a
        s = rest
        while True:
            if a | s not in ms:
                raise FilterError("not upward closed")
            if s == 0:
                break
            s = (s - 1) & rest


def principal_filter(n: int, generator) -> Filter:
    """All supersets of the generator (a mask or an iterable of indices)."""
    g = generator if isinstance(generator, int) else subset_mask(generator)
    members = frozenset(x for x in range(1 << n) if x & g == g)
    return Filter(n, members)


def trivial_filter(n: int) -> Filter:
    return principal_filter(n, (1 << n) - 1)


def improper_filter(n: int) -> Filter:
    return principal_filter(n, 0)


def as_ultrafilter(d: Filter) -> Ultrafilter:
    return Ultrafilter(d.n, d.members)


@dataclass(frozen=True)
class FilterEnumeration:
    n: int
    filters: tuple[Filter, ...]
    ultrafilters: tuple[Ultrafilter, ...]


def enumerate_filters(n: int) -> FilterEnumeration:
    """All filters over an n-element index set (the improper one included), ultrafilters flagged.

    Closure under intersection makes the meet of all members a member, so the
    filters are the principal ones; each is checked against the axioms, and
    every ultrafilter is asserted to be generated by a singleton.
    """
    if n < 1:
        raise FilterError("index set must be nonempty")
    caps.require("filter_index", n)
    filters = tuple(principal_filter(n, g) for g in range(1 << n))
    ultras = tuple(as_ultrafilter(d) for d in filters if d.is_ultra)
    if sorted(u.generator for u in ultras) != [1 << i for i in range(n)]:
        raise AssertionError("ultrafilters do not correspond to the indices")
    return FilterEnumeration(n, filters, ultras)


def enumerate_filters_bruteforce(n: int) -> list[frozenset[int]]:
    """Every family of subsets satisfying the axioms, by scanning all 2^(2^n) families (n <= 4)."""
    if n > 4:
        raise caps.CapExceeded("filter_index", n, 4)
    out = []
    for fam in range(1 << (1 << n)):
        members = frozenset(x for x in range(1 << n) if fam >> x & 1)
        try:
            check_filter_axioms(n, members)
        except FilterError:
            continue
        out.append(members)
    return out


# ---- filter products -------------------------------------------------------------

@dataclass
class FilterProduct:
    model: FiniteModel
    filter: Filter
    factors: tuple[FiniteModel, ...]
    representatives: dict[str, list[tuple[int, ...]]]    # class -> least choice function
    class_of: dict[str, np.ndarray] = field(repr=False)    # raw index -> class
    well_defined_checked: bool = True

    def describe(self) -> dict:
        return {"filter": self.filter.describe(), "factors": [m.name for m in self.factors],
                "sizes": dict(self.model.carriers), "well_defined_checked": self.well_defined_checked}


_CHECK_LIMIT = 1 << 24
_SQUARE_LIMIT = 4096


def _raw(models, sort):
    sizes = [m.carriers[sort] for m in models]
    total = int(np.prod(sizes, dtype=np.int64))
    # comps[k][x]: k-th coordinate of raw element x; the first coordinate is the most significant
    idx = np.arange(total, dtype=np.int64)
    comps = []
    for k in range(len(sizes)):
        stride = int(np.prod(sizes[k + 1:], dtype=np.int64))
        comps.append((idx // stride) % sizes[k])
    strides = [int(np.prod(sizes[k + 1:], dtype=np.int64)) for k in range(len(sizes))]
    return total, comps, strides


def _agreement_classes(comps, total, members: np.ndarray, generator: int):
    """Class of each raw element under =_D, numbered by least-index representative.

    A member of D contains the generator and every superset of it is a member,
    so x =_D y iff x and y agree on the generator's coordinates. When the raw
    carrier is within _SQUARE_LIMIT the agreement-set definition is also
    evaluated on all pairs and checked to coincide with "same class", which
    makes =_D an equivalence relation.
    """
    key = np.zeros(total, dtype=np.int64)
    for k, c in enumerate(comps):
        if generator >> k & 1:
            key = key * (int(c.max()) + 1) + c
    _, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")          # classes by least representative
    number = np.empty(len(first), dtype=np.int64)
    number[order] = np.arange(len(first))
    cls = number[inverse.reshape(-1)]
    reps = [int(first[o]) for o in order]
    if total <= _SQUARE_LIMIT:
        for lo in range(0, total, 256):
            hi = min(total, lo + 256)
            agree = np.zeros((hi - lo, total), dtype=np.int64)
            for k, c in enumerate(comps):
                agree |= (c[lo:hi, None] == c[None, :]).astype(np.int64) << k
            if not np.array_equal(members[agree], cls[lo:hi, None] == cls[None, :]):
                raise FilterError("=_D is not an equivalence relation")
    return cls, reps


def filter_product(models: Sequence[FiniteModel], d: Filter) -> FilterProduct:
    """The filter product prod_D models over a shared signature."""
    models = tuple(models)
    if len(models) != d.n:
        raise FilterError(f"{len(models)} factors for an index set of size {d.n}")
    if not d.proper:
        raise FilterError("the improper filter identifies everything")
    sig = models[0].signature
    if any(m.signature != sig for m in models):
        raise FilterError("factors have different signatures")
    members = np.zeros(1 << d.n, dtype=bool)
    for x in d.members:
        members[x] = True
    raw, cls, reps, comps_of, strides_of = {}, {}, {}, {}, {}
    for s in sig.sorts:
        total, comps, strides = _raw(models, s)
        caps.require("product", total)
        raw[s], comps_of[s], strides_of[s] = total, comps, strides
        cls[s], reps[s] = _agreement_classes(comps, total, members, d.generator)
    checked = True

    def combine(sort, parts):
        out = 0
        for k, p in enumerate(parts):
            out = out + p * strides_of[sort][k]
        return out

    functions = {}
    for f, (args, res) in sig.functions.items():
        tables = [np.asarray(_table(m.functions[f], [m.carriers[a] for a in args])) for m in models]
        # value on representatives
        grids = np.meshgrid(*[np.asarray(reps[a]) for a in args], indexing="ij")
        val = combine(res, [tables[k][tuple(comps_of[a][k][g] for a, g in zip(args, grids))]
                            for k in range(d.n)])
        table = cls[res][val]
        functions[f] = FunctionTable(len(args), table=table)
        # well defined: the class of the value depends only on the classes of the arguments
        if int(np.prod([raw[a] for a in args], dtype=np.int64)) <= _CHECK_LIMIT:
            full = np.meshgrid(*[np.arange(raw[a]) for a in args], indexing="ij")
            v = combine(res, [tables[k][tuple(comps_of[a][k][g] for a, g in zip(args, full))]
                              for k in range(d.n)])
            expect = table[tuple(cls[a][g] for a, g in zip(args, full))]
            if not np.array_equal(cls[res][v], expect):
                raise FilterError(f"{f} is not well defined on =_D classes")
        else:
            checked = False
    relations = {}
    for p, args in sig.predicates.items():
        sets = [m.relation_tuples(p) for m in models]
        tuples = []
        for ct in itertools.product(*(range(len(reps[a])) for a in args)):
            rt = [reps[a][c] for a, c in zip(args, ct)]
            mask = 0
            for k in range(d.n):
                if tuple(int(comps_of[a][k][x]) for a, x in zip(args, rt)) in sets[k]:
                    mask |= 1 << k
            if members[mask]:
                tuples.append(ct)
        relations[p] = TupleRelation(tuples)
    constants = {}
    for c, s in sig.constants.items():
        v = combine(s, [m.constants[c] for m in models])
        constants[c] = int(cls[s][v])
    name = "prod_D(" + ", ".join(m.name or "?" for m in models) + ")"
    model = FiniteModel(sig, {s: len(reps[s]) for s in sig.sorts}, functions, relations, constants, name=name)
    rep_tuples = {s: [tuple(int(comps_of[s][k][x]) for k in range(d.n)) for x in reps[s]] for s in sig.sorts}
    return FilterProduct(model, d, models, rep_tuples, cls, checked)


def _table(ft: FunctionTable, shape):
    if ft.table is not None:
        return ft.table
    out = np.empty(shape, dtype=np.int64)
    for t in itertools.product(*(range(k) for k in shape)):
        out[t] = ft(*t)
    return out


def ultrapower(u: FiniteModel, d: Filter) -> FilterProduct:
    return filter_product([u] * d.n, d)


@dataclass(frozen=True)
class UltrapowerReport:
    base: str
    filter: dict
    product_size: dict
    isomorphism: dict | None
    rows: tuple[tuple[Formula, bool, bool], ...]

    @property
    def isomorphic(self) -> bool:
        return self.isomorphism is not None

    @property
    def agree(self) -> bool:
        return all(a == b for _, a, b in self.rows)

    @property
    def ok(self) -> bool:
        return self.isomorphic and self.agree


def check_ultrapower_equivalence(u: FiniteModel, d: Filter, sentences: Sequence[Formula]) -> UltrapowerReport:
    """Compare u with its ultrapower by d: an isomorphism search plus every given sentence."""
    if not d.is_ultra:
        raise FilterError("expected an ultrafilter")
    prod = ultrapower(u, d)
    iso = models_isomorphic(prod.model, u)
    rows = []
    for phi in sentences:
        if not is_sentence(phi):
            raise ValueError("sentences only")
        rows.append((phi, evaluate(u, phi), evaluate(prod.model, phi)))
    return UltrapowerReport(u.name, d.describe(), dict(prod.model.carriers), iso, tuple(rows))
