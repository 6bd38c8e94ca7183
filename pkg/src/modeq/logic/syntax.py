"""Many-sorted first-order syntax: signatures, terms, formulas, substitution."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


class SignatureError(ValueError):
    pass


class SortError(ValueError):
    pass


class InadmissibleSubstitution(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    predicates: dict[str, tuple[str, ...]] = field(default_factory=dict)
    functions: dict[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    constants: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.sorts:
            raise SignatureError("a signature needs at least one sort")
        if len(set(self.sorts)) != len(self.sorts):
            raise SignatureError("duplicate sort names")
        seen: set[str] = set()
        for group in (self.predicates, self.functions, self.constants):
            for name in group:
                if name in seen:
                    raise SignatureError(f"symbol {name!r} declared twice")
                seen.add(name)
        for name, arg_sorts in self.predicates.items():
            if len(arg_sorts) < 1:
                raise SignatureError(f"predicate {name!r} needs arity >= 1")
            self._check_sorts(arg_sorts, name)
        for name, (arg_sorts, result) in self.functions.items():
            if len(arg_sorts) < 1:
                raise SignatureError(f"function {name!r} needs arity >= 1")
            self._check_sorts(arg_sorts + (result,), name)
        for name, sort in self.constants.items():
            self._check_sorts((sort,), name)

    def _check_sorts(self, sorts: Iterable[str], name: str) -> None:
        for s in sorts:
            if s not in self.sorts:
                raise SignatureError(f"symbol {name!r} uses unknown sort {s!r}")

    def __hash__(self):
        return hash((self.sorts, tuple(sorted(self.predicates.items())),
                     tuple(sorted(self.functions.items())),
                     tuple(sorted(self.constants.items()))))

    @property
    def default_sort(self) -> str | None:
        return self.sorts[0] if len(self.sorts) == 1 else None

    def symbol_kind(self, name: str) -> str | None:
        if name in self.predicates:
            return "predicate"
        if name in self.functions:
            return "function"
        if name in self.constants:
            return "constant"
        return None

    def to_json(self) -> dict:
        return {
            "sorts": list(self.sorts),
            "predicates": {k: list(v) for k, v in self.predicates.items()},
            "functions": {k: {"args": list(a), "result": r}
                          for k, (a, r) in self.functions.items()},
            "constants": dict(self.constants),
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "Signature":
        if isinstance(data, str):
            data = json.loads(data)
        funcs = {}
        for name, entry in data.get("functions", {}).items():
            if isinstance(entry, dict):
                funcs[name] = (tuple(entry["args"]), entry["result"])
            else:
                *args, result = entry
                funcs[name] = (tuple(args), result)
        return cls(
            sorts=tuple(data["sorts"]),
            predicates={k: tuple(v) for k, v in data.get("predicates", {}).items()},
            functions=funcs,
            constants=dict(data.get("constants", {})),
        )


def _cached_hash(cls):
    """Frozen dataclass nodes are hashed often as cache keys; memoize the hash."""
    plain = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = plain(self)
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


# ---- terms -----------------------------------------------------------------

@_cached_hash
@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@_cached_hash
@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@_cached_hash
@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...]

    def __str__(self):
        return f"{self.func}({', '.join(map(str, self.args))})"


Term = Union[Var, Const, App]


# ---- formulas --------------------------------------------------------------

@_cached_hash
@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@_cached_hash
@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@_cached_hash
@dataclass(frozen=True)
class Not:
    body: "Formula"


@_cached_hash
@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@_cached_hash
@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@_cached_hash
@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@_cached_hash
@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@_cached_hash
@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@_cached_hash
@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Atom, Eq, Not, Implies, And, Or, Iff, Forall, Exists]
BINARY = (Implies, And, Or, Iff)
QUANTIFIERS = (Forall, Exists)


# ---- small builders --------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is not representable."""
    items = list(parts)
    if not items:
        raise ValueError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    if not items:
        raise ValueError("empty disjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def forall(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Forall(v, body)
    return body


def exists(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def neq(a: Term, b: Term) -> Formula:
    return Not(Eq(a, b))


# ---- traversal -------------------------------------------------------------

def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from term_vars(a)


def term_sort(t: Term, sig: Signature) -> str:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        if t.name not in sig.constants:
            raise SignatureError(f"unknown constant {t.name!r}")
        return sig.constants[t.name]
    if t.func not in sig.functions:
        raise SignatureError(f"unknown function {t.func!r}")
    arg_sorts, result = sig.functions[t.func]
    if len(arg_sorts) != len(t.args):
        raise SortError(f"{t.func} expects {len(arg_sorts)} arguments, got {len(t.args)}")
    for a, s in zip(t.args, arg_sorts):
        if term_sort(a, sig) != s:
            raise SortError(f"argument {a} of {t.func} should have sort {s}")
    return result


def check_formula(phi: Formula, sig: Signature) -> None:
    """Raise unless phi is well-sorted over sig."""
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            if f.pred not in sig.predicates:
                raise SignatureError(f"unknown predicate {f.pred!r}")
            arg_sorts = sig.predicates[f.pred]
            if len(arg_sorts) != len(f.args):
                raise SortError(f"{f.pred} expects {len(arg_sorts)} arguments, got {len(f.args)}")
            for a, s in zip(f.args, arg_sorts):
                if term_sort(a, sig) != s:
                    raise SortError(f"argument {a} of {f.pred} should have sort {s}")
        elif isinstance(f, Eq):
            if term_sort(f.left, sig) != term_sort(f.right, sig):
                raise SortError(f"equality between different sorts: {f.left} = {f.right}")
        elif isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, BINARY):
            stack.extend((f.left, f.right))
        elif isinstance(f, QUANTIFIERS):
            if f.var.sort not in sig.sorts:
                raise SortError(f"unknown sort {f.var.sort!r} for {f.var.name}")
            stack.append(f.body)
        else:
            raise TypeError(f"not a formula: {f!r}")


_FV_CACHE: dict = {}


def free_variables(phi: Formula) -> frozenset[Var]:
    if isinstance(phi, Atom):
        return frozenset(v for a in phi.args for v in term_vars(a))
    if isinstance(phi, Eq):
        return frozenset(term_vars(phi.left)) | frozenset(term_vars(phi.right))
    key = id(phi)
    hit = _FV_CACHE.get(key)
    if hit is not None and hit[0] is phi:
        return hit[1]
    if isinstance(phi, Not):
        out = free_variables(phi.body)
    elif isinstance(phi, BINARY):
        out = free_variables(phi.left) | free_variables(phi.right)
    elif isinstance(phi, QUANTIFIERS):
        out = free_variables(phi.body) - {phi.var}
    else:
        raise TypeError(f"not a formula: {phi!r}")
    if len(_FV_CACHE) > 200_000:
        _FV_CACHE.clear()
    _FV_CACHE[key] = (phi, out)
    return out


def is_sentence(phi: Formula) -> bool:
    return not free_variables(phi)


def subformulas(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, BINARY):
            stack.extend((f.right, f.left))
        elif isinstance(f, QUANTIFIERS):
            stack.append(f.body)


# ---- substitution ----------------------------------------------------------

def substitute_term(t: Term, v: Var, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t == v else t
    if isinstance(t, App):
        return App(t.func, tuple(substitute_term(a, v, s) for a in t.args))
    return t


def substitute(phi: Formula, v: Var, t: Term, sig: Signature | None = None) -> Formula:
    """Replace the free occurrences of v by t.

    A free occurrence of v inside the scope of a quantifier over a variable of
    t makes the substitution inadmissible; that raises instead of renaming.
    """
    if sig is not None and term_sort(t, sig) != v.sort:
        raise SortError(f"cannot substitute {t} for {v.name}:{v.sort}")
    t_vars = frozenset(term_vars(t))

    def go(f: Formula, bound: frozenset) -> Formula:
        if v not in free_variables(f):
            return f
        if isinstance(f, Atom):
            if bound & t_vars:
                raise InadmissibleSubstitution(
                    f"{v.name} := {t} captured by {sorted(x.name for x in bound & t_vars)}")
            return Atom(f.pred, tuple(substitute_term(a, v, t) for a in f.args))
        if isinstance(f, Eq):
            if bound & t_vars:
                raise InadmissibleSubstitution(
                    f"{v.name} := {t} captured by {sorted(x.name for x in bound & t_vars)}")
            return Eq(substitute_term(f.left, v, t), substitute_term(f.right, v, t))
        if isinstance(f, Not):
            return Not(go(f.body, bound))
        if isinstance(f, BINARY):
            return type(f)(go(f.left, bound), go(f.right, bound))
        # v is free in f, so f.var != v
        return type(f)(f.var, go(f.body, bound | {f.var}))

    return go(phi, frozenset())


def is_admissible(phi: Formula, v: Var, t: Term) -> bool:
    try:
        substitute(phi, v, t)
    except InadmissibleSubstitution:
        return False
    return True


# ---- abbreviations ---------------------------------------------------------

def desugar(phi: Formula) -> Formula:
    """Rewrite into the primitive basis: negation, implication, universal."""
    if isinstance(phi, (Atom, Eq)):
        return phi
    if isinstance(phi, Not):
        return Not(desugar(phi.body))
    if isinstance(phi, Implies):
        return Implies(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, And):
        return Not(Implies(desugar(phi.left), Not(desugar(phi.right))))
    if isinstance(phi, Or):
        return Implies(Not(desugar(phi.left)), desugar(phi.right))
    if isinstance(phi, Iff):
        a, b = desugar(phi.left), desugar(phi.right)
        return Not(Implies(Implies(a, b), Not(Implies(b, a))))
    if isinstance(phi, Forall):
        return Forall(phi.var, desugar(phi.body))
    if isinstance(phi, Exists):
        return Not(Forall(phi.var, Not(desugar(phi.body))))
    raise TypeError(f"not a formula: {phi!r}")


RING_SIGNATURE = Signature(
    sorts=("R",),
    functions={"add": (("R", "R"), "R"), "mul": (("R", "R"), "R"), "neg": (("R",), "R")},
    constants={"zero": "R", "one": "R"},
)

GROUP_SIGNATURE = Signature(
    sorts=("G",),
    functions={"mul": (("G", "G"), "G"), "inv": (("G",), "G")},
    constants={"one": "G"},
)

CATEGORY_SIGNATURE = Signature(
    sorts=("Obj", "Mor"),
    predicates={"In": ("Mor", "Obj", "Obj"), "Comp": ("Mor", "Mor", "Mor")},
    functions={"Id": (("Obj",), "Mor")},
)
