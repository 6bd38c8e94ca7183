"""Fixed sentence samples (at most three quantifiers each) for sampled equivalence checks."""

from __future__ import annotations

import functools

from .logic.syntax import GROUP_SIGNATURE, RING_SIGNATURE, Exists, Forall, Formula, subformulas
from .logic.text import parse_formula

RING_SENTENCES = (
    "forall x:R. add(x, zero) = x",
    "forall x:R. mul(x, one) = x",
    "forall x:R. forall y:R. mul(x, y) = mul(y, x)",
    "exists x:R. x != zero & mul(x, x) = zero",
    "forall x:R. mul(x, x) = x",
    "forall x:R. add(x, x) = zero",
    "forall x:R. add(add(x, x), x) = zero",
    "forall x:R. x = zero | (exists y:R. mul(x, y) = one)",
    "exists x:R. exists y:R. x != zero & y != zero & mul(x, y) = zero",
    "forall x:R. exists y:R. add(x, y) = zero",
    "exists x:R. mul(x, x) = x & x != zero & x != one",
    "forall x:R. forall y:R. mul(x, y) = zero -> mul(y, x) = zero",
    "forall x:R. exists y:R. mul(y, y) = x",
    "exists x:R. add(x, x) = one",
    "forall x:R. mul(mul(x, x), x) = x",
    "exists x:R. forall y:R. add(x, y) = y",
    "forall x:R. forall y:R. forall z:R. mul(x, add(y, z)) = add(mul(x, y), mul(x, z))",
    "exists x:R. exists y:R. mul(x, y) != mul(y, x)",
    "forall x:R. mul(x, x) = zero -> x = zero",
    "exists x:R. exists y:R. mul(x, y) = one & mul(y, x) != one",
    "exists x:R. neg(x) = x & x != zero",
    "exists x:R. mul(x, x) = neg(one)",
    "forall x:R. forall y:R. mul(add(x, y), add(x, y)) = add(mul(x, x), mul(y, y))",
    "exists x:R. x != zero & (forall y:R. mul(mul(x, y), x) = zero)",
    "exists x:R. exists y:R. exists z:R. x != y & y != z & x != z",
)

GROUP_SENTENCES = (
    "forall x:G. mul(x, one) = x",
    "forall x:G. exists y:G. mul(x, y) = one",
    "forall x:G. forall y:G. mul(x, y) = mul(y, x)",
    "exists x:G. mul(x, x) = one & x != one",
    "forall x:G. mul(x, x) = one",
    "forall x:G. mul(mul(x, x), x) = one",
    "exists x:G. x != one",
    "exists x:G. exists y:G. x != one & y != one & x != y",
    "exists x:G. exists y:G. exists z:G. x != y & y != z & x != z",
    "forall x:G. exists y:G. mul(y, y) = x",
    "exists x:G. mul(x, x) != one & mul(mul(x, x), x) = one",
    "forall x:G. forall y:G. mul(mul(x, y), mul(x, y)) = mul(mul(x, x), mul(y, y))",
    "exists x:G. forall y:G. mul(x, y) = mul(y, x)",
    "exists x:G. x != one & (forall y:G. mul(x, y) = mul(y, x))",
    "forall x:G. inv(inv(x)) = x",
    "forall x:G. forall y:G. inv(mul(x, y)) = mul(inv(y), inv(x))",
    "forall x:G. forall y:G. inv(mul(x, y)) = mul(inv(x), inv(y))",
    "exists x:G. inv(x) = x & x != one",
    "forall x:G. forall y:G. exists z:G. mul(x, z) = y",
    "exists x:G. exists y:G. mul(mul(x, y), mul(inv(x), inv(y))) != one",
    "forall x:G. mul(mul(x, x), mul(x, x)) = one",
    "exists x:G. mul(mul(x, x), mul(x, x)) != one",
    "forall x:G. x = one | mul(x, x) != x",
    "exists x:G. forall y:G. mul(mul(x, y), inv(x)) = y & x != one",
    "forall x:G. forall y:G. mul(x, x) = one & mul(y, y) = one -> mul(x, y) = mul(y, x)",
)


@functools.lru_cache(maxsize=None)
def ring_sentences() -> tuple[Formula, ...]:
    return tuple(parse_formula(s, RING_SIGNATURE) for s in RING_SENTENCES)


@functools.lru_cache(maxsize=None)
def group_sentences() -> tuple[Formula, ...]:
    return tuple(parse_formula(s, GROUP_SIGNATURE) for s in GROUP_SENTENCES)


def quantifier_count(phi: Formula) -> int:
    return sum(1 for f in subformulas(phi) if isinstance(f, (Forall, Exists)))
