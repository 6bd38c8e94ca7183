"""Enumeration caps, adjustable through MODEQ_CAP_OVERRIDE="ring=512,module=128"."""

from __future__ import annotations

import os

DEFAULTS = {
    "ring": 256,          # elements of a constructed ring
    "module": 64,         # elements of a module handled by submodule/hom machinery
    "skeleton": 16,       # size bound B of a skeleton
    "rank": 3,            # free rank searched by the projective/generator oracles
    "hom_search": 1_500_000,  # candidate generator assignments in a hom search
    "morphisms": 200_000,  # morphisms in an encoded category
    "filter_index": 5,    # |I| for filter enumeration
    "product": 65536,     # raw carrier (all choice functions) of a filter product
    "beautiful": 100_000,  # coefficient tuples scanned by enumerate_beautiful
    "lattice": 4096,      # elements of the ambient module of a projective space
    "lattice_enum": 1024,  # ambient elements when all submodules are enumerated
}


class CapExceeded(ValueError):
    def __init__(self, cap: str, needed, limit):
        super().__init__(f"cap {cap!r} exceeded: need {needed}, limit {limit}")
        self.cap = cap
        self.needed = needed
        self.limit = limit


def _overrides() -> dict[str, int]:
    raw = os.environ.get("MODEQ_CAP_OVERRIDE", "").strip()
    out = {}
    if not raw:
        return out
    for part in raw.split(","):
        if not part.strip():
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ValueError(f"MODEQ_CAP_OVERRIDE names unknown cap {key!r}")
        n = int(value)
        if n <= 0:
            raise ValueError(f"cap {key} must be positive")
        out[key] = n
    return out


def cap(name: str) -> int:
    return _overrides().get(name, DEFAULTS[name])


def require(name: str, needed, limit: int | None = None) -> None:
    limit = cap(name) if limit is None else limit
    if needed > limit:
        raise CapExceeded(name, needed, limit)
