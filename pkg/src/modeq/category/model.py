"""A skeleton of mod-R as a two-sorted finite model (Obj, Mor)."""

from __future__ import annotations

import threading
from importlib import resources
from dataclasses import dataclass, field

import numpy as np

from .. import caps
from ..logic.semantics import FiniteModel, FunctionTable
from ..logic.syntax import CATEGORY_SIGNATURE, Signature
from ..modules.module import ModuleHom
from ..modules.skeleton import Skeleton


class CategoryAxiomError(ValueError):
    pass


_CACHE_LIMIT = 500_000


class _Blocks:
    """Morphisms grouped by (source, target), with numpy tables for composition."""

    def __init__(self, skel: Skeleton):
        n = len(skel.modules)
        self.n = n
        self.offset: dict[tuple[int, int], int] = {}
        self.count: dict[tuple[int, int], int] = {}
        self.tables: dict[tuple[int, int], np.ndarray] = {}
        self.keys: dict[tuple[int, int], dict[bytes, int]] = {}
        src, tgt, local = [], [], []
        pos = 0
        for a in range(n):
            for b in range(n):
                hs = skel.homs[(a, b)]
                self.offset[(a, b)] = pos
                self.count[(a, b)] = len(hs)
                arr = np.array([h.table for h in hs], dtype=np.uint8).reshape(len(hs), skel.modules[a].size)
                self.tables[(a, b)] = arr
                self.keys[(a, b)] = {row.tobytes(): i for i, row in enumerate(arr)}
                src.extend([a] * len(hs))
                tgt.extend([b] * len(hs))
                local.extend(range(len(hs)))
                pos += len(hs)
        self.total = pos
        self.src = src
        self.tgt = tgt
        self.local = local

    def table(self, f: int) -> np.ndarray:
        return self.tables[(self.src[f], self.tgt[f])][self.local[f]]

    def index(self, a: int, b: int, row: np.ndarray) -> int | None:
        i = self.keys[(a, b)].get(row.tobytes())
        return None if i is None else self.offset[(a, b)] + i

    def block(self, a: int, b: int) -> range:
        o = self.offset[(a, b)]
        return range(o, o + self.count[(a, b)])


class InRelation:
    """In(f, A, B): f is a morphism from A to B."""

    def __init__(self, blocks: _Blocks):
        self.b = blocks

    def __contains__(self, t) -> bool:
        f, a, b = t
        return self.b.src[f] == a and self.b.tgt[f] == b

    @staticmethod
    def candidate_cost(pos: int) -> int:
        return 0

    def candidates(self, pos: int, args: tuple):
        f, a, b = args
        if pos == 0:
            return self.b.block(a, b)
        if pos == 1:
            return [self.b.src[f]] if self.b.tgt[f] == b else []
        return [self.b.tgt[f]] if self.b.src[f] == a else []


class CompRelation:
    """Comp(f, g, h): h = f o g, defined when the target of g is the source of f."""

    def __init__(self, blocks: _Blocks):
        self.b = blocks
        self._comp: dict[tuple[int, int], int | None] = {}
        self._cand: dict[tuple, list[int]] = {}
        self._lock = threading.Lock()

    def compose(self, f: int, g: int) -> int | None:
        key = (f, g)
        r = self._comp.get(key, -1)
        if r != -1:
            return r
        b = self.b
        if b.src[f] != b.tgt[g]:
            r = None
        else:
            r = b.index(b.src[g], b.tgt[f], b.table(f)[b.table(g)])
        with self._lock:
            if len(self._comp) > _CACHE_LIMIT:
                self._comp.clear()
            self._comp[key] = r
        return r

    def __contains__(self, t) -> bool:
        f, g, h = t
        return self.compose(f, g) == h

    @staticmethod
    def candidate_cost(pos: int) -> int:
        return 0 if pos == 2 else 1

    def candidates(self, pos: int, args: tuple):
        f, g, h = args
        if pos == 2:
            r = self.compose(f, g)
            return [] if r is None else [r]
        key = (pos, f, g, h)
        hit = self._cand.get(key)
        if hit is not None:
            return hit
        b = self.b
        out: list[int] = []
        if pos == 1:
            # all g with f o g = h
            if b.tgt[f] == b.tgt[h]:
                a, mid = b.src[h], b.src[f]
                gs = b.tables[(a, mid)]
                if len(gs):
                    ok = np.nonzero((b.table(f)[gs] == b.table(h)).all(axis=1))[0]
                    out = (ok + b.offset[(a, mid)]).tolist()
        else:
            # all f with f o g = h
            if b.src[g] == b.src[h]:
                mid, c = b.tgt[g], b.tgt[h]
                fs = b.tables[(mid, c)]
                if len(fs):
                    ok = np.nonzero((fs[:, b.table(g)] == b.table(h)).all(axis=1))[0]
                    out = (ok + b.offset[(mid, c)]).tolist()
        with self._lock:
            if len(self._cand) > _CACHE_LIMIT:
                self._cand.clear()
            self._cand[key] = out
        return out


@dataclass(eq=False)
class CategoryModel:
    skeleton: Skeleton
    model: FiniteModel
    blocks: _Blocks = field(repr=False)
    identities: list[int] = field(repr=False)
    _results: dict = field(default_factory=dict, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    @property
    def n_objects(self) -> int:
        return self.blocks.n

    @property
    def n_morphisms(self) -> int:
        return self.blocks.total

    def objects(self) -> range:
        return range(self.blocks.n)

    def morphisms(self, a: int | None = None, b: int | None = None) -> range:
        if a is None:
            return range(self.blocks.total)
        return self.blocks.block(a, b)

    def source(self, f: int) -> int:
        return self.blocks.src[f]

    def target(self, f: int) -> int:
        return self.blocks.tgt[f]

    def identity(self, a: int) -> int:
        return self.identities[a]

    def compose(self, f: int, g: int) -> int | None:
        """f o g, or None if not composable."""
        return self.model.relations["Comp"].compose(f, g)

    def hom(self, f: int) -> ModuleHom:
        b = self.blocks
        return self.skeleton.homs[(b.src[f], b.tgt[f])][b.local[f]]

    def morphism_of(self, h: ModuleHom) -> int:
        a = self.skeleton.modules.index(h.source)
        c = self.skeleton.modules.index(h.target)
        i = self.blocks.index(a, c, np.array(h.table, dtype=np.uint8))
        if i is None:
            raise KeyError("not a morphism of the skeleton")
        return i

    def object_of(self, m) -> int:
        return self.skeleton.modules.index(m)


def encode_category(skel: Skeleton, verify: bool = True) -> CategoryModel:
    caps.require("morphisms", skel.morphism_count())
    blocks = _Blocks(skel)
    ids = []
    for a, m in enumerate(skel.modules):
        i = blocks.index(a, a, np.arange(m.size, dtype=np.uint8))
        if i is None:
            raise CategoryAxiomError(f"no identity on object {a}")
        ids.append(i)
    model = FiniteModel(
        CATEGORY_SIGNATURE,
        {"Obj": blocks.n, "Mor": blocks.total},
        {"Id": FunctionTable(1, table=ids)},
        {"In": InRelation(blocks), "Comp": CompRelation(blocks)},
        {},
        name=f"mod-{skel.ring.name} (B={skel.bound})",
    )
    cat = CategoryModel(skel, model, blocks, ids)
    if verify:
        verify_category_axioms(cat)
    return cat


def _codes(rows: np.ndarray, base: int) -> np.ndarray:
    """Rows of values < base as integers (exact: base ** width <= 2 ** 64 for skeleton sizes)."""
    w = rows.shape[-1]
    weights = np.array([base ** k for k in range(w)], dtype=np.uint64)
    return (rows.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


class _BlockComposer:
    """Composite indices of whole blocks, computed with numpy."""

    def __init__(self, cat: CategoryModel):
        self.b = cat.blocks
        self.sizes = [m.size for m in cat.skeleton.modules]
        self.sorted: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def keys(self, a: int, c: int):
        hit = self.sorted.get((a, c))
        if hit is None:
            codes = _codes(self.b.tables[(a, c)], self.sizes[c])
            order = np.argsort(codes, kind="stable")
            hit = self.sorted[(a, c)] = (codes[order], order)
        return hit

    def compose(self, a: int, bb: int, c: int, F: np.ndarray, G: np.ndarray) -> np.ndarray:
        """Local indices in block (a, c) of F[i] o G[j], -1 where the composite is missing."""
        rows = F[:, G]                                   # (nf, ng, |a|)
        codes = _codes(rows, self.sizes[c])
        ref, order = self.keys(a, c)
        pos = np.searchsorted(ref, codes)
        pos = np.minimum(pos, len(ref) - 1)
        found = ref[pos] == codes
        return np.where(found, order[pos], -1)


def verify_category_axioms(cat: CategoryModel, exhaustive_limit: int = 300_000) -> None:
    """Composition closed and associative, identities neutral, In functional.

    Closure is checked on every composable pair of blocks with at most
    `exhaustive_limit` pairs and on the first 256 rows of each larger block.
    Associativity is checked on every composable triple of blocks whose
    composite tables have at most `exhaustive_limit` entries.
    """
    b = cat.blocks
    n = b.n
    # In assigns one (source, target) pair: by construction of the blocks
    for f in range(b.total):
        if not (0 <= b.src[f] < n and 0 <= b.tgt[f] < n):
            raise CategoryAxiomError(f"morphism {f} without source/target")
    bc = _BlockComposer(cat)
    # identities
    for a in range(n):
        ida = b.table(cat.identities[a])[None, :]
        for x in range(n):
            right = b.tables[(a, x)]
            if len(right) and not np.array_equal(bc.compose(a, a, x, right, ida)[:, 0], np.arange(len(right))):
                raise CategoryAxiomError(f"f o 1 != f for a morphism out of object {a}")
            left = b.tables[(x, a)]
            if len(left) and not np.array_equal(bc.compose(x, a, a, ida, left)[0], np.arange(len(left))):
                raise CategoryAxiomError(f"1 o f != f for a morphism into object {a}")
    full: dict[tuple[int, int, int], np.ndarray] = {}
    # closure: every composite is a morphism of the skeleton
    for a in range(n):
        for bb in range(n):
            G0 = b.tables[(a, bb)]
            for c in range(n):
                F, G = b.tables[(bb, c)], G0
                if not (len(F) and len(G)):
                    continue
                exhaustive = len(F) * len(G) <= exhaustive_limit
                if not exhaustive:
                    F, G = F[:256], G[:256]
                idx = bc.compose(a, bb, c, F, G)
                if (idx < 0).any():
                    raise CategoryAxiomError("composite is not a morphism of the skeleton")
                if exhaustive:
                    full[(a, bb, c)] = idx
    # associativity: h o (f o g) = (h o f) o g on index level
    for (a, bb, c), fg in full.items():
        for d in range(n):
            hf = full.get((bb, c, d))
            h_fg = full.get((a, c, d))
            hf_g = full.get((a, bb, d))
            if hf is None or h_fg is None or hf_g is None or not hf.size or not fg.size:
                continue
            if hf.shape[0] * fg.size > exhaustive_limit:
                continue
            left = h_fg[:, fg]                   # (nh, nf, ng)
            right = hf_g[hf]                     # (nh, nf, ng)
            if not np.array_equal(left, right):
                raise CategoryAxiomError("composition is not associative")


def load_category_signature() -> Signature:
    """The shipped signature document for category models."""
    text = resources.files("modeq").joinpath("data/category_signature.json").read_text()
    return Signature.from_json(text)
