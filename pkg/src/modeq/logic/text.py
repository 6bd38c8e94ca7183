"""Surface syntax: a recursive-descent parser and the matching printer.

    formula     := quantified | iff
    quantified  := ("forall" | "exists") IDENT ":" IDENT "." formula
    iff         := implication ("<->" iff)?
    implication := disjunction ("->" implication)?
    disjunction := conjunction ("|" conjunction)*
    conjunction := negation ("&" negation)*
    negation    := "~" negation | quantified | atom
    atom        := "(" formula ")" | PRED "(" terms ")" | term ("=" | "!=") term

A quantifier body extends as far right as possible, so the printer wraps every
quantifier that is not the whole formula (or another quantifier's body).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    App, And, Atom, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or,
    Signature, SortError, SignatureError, Term, Var, check_formula,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(<->|->|!=|[()&|~=,:.])|([A-Za-z_][A-Za-z0-9_']*))")
KEYWORDS = ("forall", "exists")


@dataclass
class _Tok:
    kind: str  # "op", "ident", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(_Tok("op", m.group(1), start))
        else:
            toks.append(_Tok("ident", m.group(2), start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Free:
    """Placeholder for a free variable whose sort is not yet known."""

    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.scope: list[Var] = []
        self.free_sorts: dict[str, set[str]] = {}
        self.free_links: list[tuple[str, object]] = []

    # token helpers
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.kind != "op" or t.text != text:
            found = t.text or "end of input"
            raise FormulaSyntaxError(f"expected {text!r}, found {found!r}", t.pos)
        return self.take()

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def ident(self) -> _Tok:
        t = self.peek()
        if t.kind != "ident":
            raise FormulaSyntaxError(f"expected identifier, found {t.text or 'end of input'!r}", t.pos)
        return self.take()

    # grammar
    def formula(self):
        t = self.peek()
        if t.kind == "ident" and t.text in KEYWORDS:
            return self.quantified()
        return self.iff()

    def quantified(self):
        kw = self.take()
        name = self.ident()
        if name.text in KEYWORDS:
            raise FormulaSyntaxError("keyword used as variable", name.pos)
        self.expect(":")
        sort = self.ident()
        if sort.text not in self.sig.sorts:
            raise FormulaSyntaxError(f"unknown sort {sort.text!r}", sort.pos)
        self.expect(".")
        v = Var(name.text, sort.text)
        self.scope.append(v)
        body = self.formula()
        self.scope.pop()
        return (Forall if kw.text == "forall" else Exists)(v, body)

    def iff(self):
        left = self.implication()
        if self.at("<->"):
            self.take()
            return Iff(left, self.iff_rhs())
        return left

    def iff_rhs(self):
        t = self.peek()
        if t.kind == "ident" and t.text in KEYWORDS:
            return self.quantified()
        return self.iff()

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.take()
            t = self.peek()
            if t.kind == "ident" and t.text in KEYWORDS:
                return Implies(left, self.quantified())
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        out = self.conjunction()
        while self.at("|"):
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self):
        out = self.negation()
        while self.at("&"):
            self.take()
            out = And(out, self.negation())
        return out

    def negation(self):
        t = self.peek()
        if t.kind == "op" and t.text == "~":
            self.take()
            return Not(self.negation())
        if t.kind == "ident" and t.text in KEYWORDS:
            return self.quantified()
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "op" and t.text == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text in self.sig.predicates:
            self.take()
            args = self.arguments(t)
            sorts = self.sig.predicates[t.text]
            if len(sorts) != len(args):
                raise FormulaSyntaxError(
                    f"{t.text} expects {len(sorts)} arguments, got {len(args)}", t.pos)
            for a, s in zip(args, sorts):
                self.require_sort(a, s, t.pos)
            return Atom(t.text, tuple(args))
        if t.kind == "end":
            raise FormulaSyntaxError("unexpected end of input", t.pos)
        left = self.term()
        op = self.peek()
        if op.kind == "op" and op.text in ("=", "!="):
            self.take()
            right = self.term()
            self.unify(left, right, op.pos)
            eq = Eq(left, right)
            return eq if op.text == "=" else Not(eq)
        raise FormulaSyntaxError(f"expected '=' or '!=' after term, found {op.text or 'end of input'!r}", op.pos)

    def arguments(self, head: _Tok) -> list:
        self.expect("(")
        args = [self.term()]
        while self.at(","):
            self.take()
            args.append(self.term())
        if not self.at(")"):
            t = self.peek()
            raise FormulaSyntaxError(f"unclosed argument list of {head.text}", t.pos)
        self.take()
        return args

    def term(self):
        t = self.ident()
        if t.text in KEYWORDS:
            raise FormulaSyntaxError("keyword used as term", t.pos)
        for v in reversed(self.scope):
            if v.name == t.text:
                if self.at("("):
                    raise FormulaSyntaxError(f"variable {t.text} applied to arguments", t.pos)
                return v
        kind = self.sig.symbol_kind(t.text)
        if kind == "function":
            args = self.arguments(t)
            sorts, _ = self.sig.functions[t.text]
            if len(sorts) != len(args):
                raise FormulaSyntaxError(
                    f"{t.text} expects {len(sorts)} arguments, got {len(args)}", t.pos)
            for a, s in zip(args, sorts):
                self.require_sort(a, s, t.pos)
            return App(t.text, tuple(args))
        if kind == "constant":
            return Const(t.text)
        if kind == "predicate":
            raise FormulaSyntaxError(f"predicate {t.text} used as a term", t.pos)
        if self.at("("):
            raise FormulaSyntaxError(f"unknown function symbol {t.text!r}", t.pos)
        self.free_sorts.setdefault(t.text, set())
        return _Free(t.text)

    # sort bookkeeping for free variables
    def sort_of(self, t) -> str | None:
        if isinstance(t, _Free):
            return None
        if isinstance(t, Var):
            return t.sort
        if isinstance(t, Const):
            return self.sig.constants[t.name]
        return self.sig.functions[t.func][1]

    def require_sort(self, t, sort: str, pos: int) -> None:
        if isinstance(t, _Free):
            self.free_sorts[t.name].add(sort)
            return
        actual = self.sort_of(t)
        if actual != sort:
            raise FormulaSyntaxError(f"sort mismatch: {t} has sort {actual}, expected {sort}", pos)

    def unify(self, a, b, pos: int) -> None:
        sa, sb = self.sort_of(a), self.sort_of(b)
        if sa is None and sb is None:
            self.free_links.append((a.name, b.name))
        elif sa is None:
            self.free_sorts[a.name].add(sb)
        elif sb is None:
            self.free_sorts[b.name].add(sa)
        elif sa != sb:
            raise FormulaSyntaxError(f"equality between sorts {sa} and {sb}", pos)

    def resolve_free(self) -> dict[str, str]:
        sorts = {k: set(v) for k, v in self.free_sorts.items()}
        changed = True
        while changed:
            changed = False
            for a, b in self.free_links:
                merged = sorts[a] | sorts[b]
                if merged != sorts[a] or merged != sorts[b]:
                    sorts[a] = sorts[b] = merged
                    changed = True
        out = {}
        for name, cands in sorts.items():
            if len(cands) > 1:
                raise FormulaSyntaxError(f"free variable {name} used at sorts {sorted(cands)}", 0)
            if not cands:
                if self.sig.default_sort is None:
                    raise FormulaSyntaxError(f"cannot infer the sort of free variable {name}", 0)
                cands = {self.sig.default_sort}
            out[name] = next(iter(cands))
        return out


def _fill_term(t, sorts):
    if isinstance(t, _Free):
        return Var(t.name, sorts[t.name])
    if isinstance(t, App):
        return App(t.func, tuple(_fill_term(a, sorts) for a in t.args))
    return t


def _fill(f, sorts):
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_fill_term(a, sorts) for a in f.args))
    if isinstance(f, Eq):
        return Eq(_fill_term(f.left, sorts), _fill_term(f.right, sorts))
    if isinstance(f, Not):
        return Not(_fill(f.body, sorts))
    if isinstance(f, (Implies, And, Or, Iff)):
        return type(f)(_fill(f.left, sorts), _fill(f.right, sorts))
    return type(f)(f.var, _fill(f.body, sorts))


def parse_formula(text: str, sig: Signature) -> Formula:
    p = _Parser(text, sig)
    f = p.formula()
    t = p.peek()
    if t.kind != "end":
        raise FormulaSyntaxError(f"unexpected {t.text!r}", t.pos)
    f = _fill(f, p.resolve_free())
    try:
        check_formula(f, sig)
    except (SortError, SignatureError) as exc:
        raise FormulaSyntaxError(str(exc), 0) from exc
    return f


def parse_term(text: str, sig: Signature, sort: str | None = None) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    if p.peek().kind != "end":
        raise FormulaSyntaxError(f"unexpected {p.peek().text!r}", p.peek().pos)
    if sort is not None:
        p.require_sort(t, sort, 0)
    return _fill_term(t, p.resolve_free())


# ---- printing --------------------------------------------------------------

_QUANT, _IFF, _IMP, _OR, _AND, _NOT, _ATOM = range(7)


def format_term(t: Term) -> str:
    return str(t)


def _fmt(f: Formula) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(map(format_term, f.args))})", _ATOM
    if isinstance(f, Eq):
        return f"{format_term(f.left)} = {format_term(f.right)}", _ATOM
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"{format_term(f.body.left)} != {format_term(f.body.right)}", _ATOM
        return "~" + _wrap(f.body, _NOT), _NOT
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        body, _ = _fmt(f.body)
        return f"{kw} {f.var.name}:{f.var.sort}. {body}", _QUANT
    if isinstance(f, Iff):
        return f"{_wrap(f.left, _IFF + 1)} <-> {_wrap(f.right, _IFF)}", _IFF
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _IMP + 1)} -> {_wrap(f.right, _IMP)}", _IMP
    if isinstance(f, Or):
        return f"{_wrap(f.left, _OR)} | {_wrap(f.right, _OR + 1)}", _OR
    if isinstance(f, And):
        return f"{_wrap(f.left, _AND)} & {_wrap(f.right, _AND + 1)}", _AND
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, min_prec: int) -> str:
    text, prec = _fmt(f)
    if prec == _QUANT or prec < min_prec:
        return f"({text})"
    return text


def format_formula(f: Formula) -> str:
    return _fmt(f)[0]
