import functools

import pytest

from modeq.algebra.rings import build_ring, matrix, poly_quotient, product, zmod
from modeq.category import encode_category
from modeq.modules import build_skeleton

SPECS = {
    "Z2": zmod(2),
    "Z3": zmod(3),
    "Z4": zmod(4),
    "Z6": zmod(6),
    "F2x2": poly_quotient(2, [0, 0, 1]),
    "F4": poly_quotient(2, [1, 1, 1]),
    "M2F2": matrix(zmod(2), 2),
    "Z2xZ2": product(zmod(2), zmod(2)),
}


@functools.lru_cache(maxsize=None)
def ring(name: str):
    return build_ring(SPECS[name])


@functools.lru_cache(maxsize=None)
def category(name: str, bound: int):
    return encode_category(build_skeleton(ring(name), bound))


@pytest.fixture
def rings():
    return ring
