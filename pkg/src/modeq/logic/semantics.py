"""Finite models, satisfaction, model isomorphism.

Formulas are compiled once per model into closures over a slot array. The
compiled form is semantically the plain inductive definition; it only adds
three shortcuts that never change a verdict:

* a quantifier whose body starts with a relational guard (``forall v. A -> B``
  or ``exists v. A & B`` with ``v`` an argument of an atom in ``A``) only visits
  the values the relation allows, when the relation can list them;
* conjuncts and disjuncts are tried cheapest first;
* expensive quantified subformulas are memoized on the values of their free
  variables.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .syntax import (
    App, And, Atom, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or,
    Signature, Term, Var, free_variables, is_sentence, term_vars,
)


class MissingAssignment(ValueError):
    pass


class ModelError(ValueError):
    pass


# ---- relations -------------------------------------------------------------

class TupleRelation:
    """A relation stored as a set of tuples, with lazily built lookup indexes."""

    def __init__(self, tuples: Iterable[Sequence[int]]):
        self.tuples = frozenset(tuple(t) for t in tuples)
        self._index: dict = {}

    def __contains__(self, t) -> bool:
        return t in self.tuples

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __len__(self):
        return len(self.tuples)

    def candidates(self, pos: int, args: tuple) -> list[int] | None:
        key = pos
        idx = self._index.get(key)
        if idx is None:
            idx = defaultdict(list)
            for t in sorted(self.tuples):
                idx[t[:pos] + t[pos + 1:]].append(t[pos])
            idx = dict(idx)
            self._index[key] = idx
        return idx.get(args[:pos] + args[pos + 1:], [])


class FunctionTable:
    """A total function given by a nested table or a callable."""

    def __init__(self, arity: int, table=None, func: Callable | None = None):
        if table is None and func is None:
            raise ModelError("function needs a table or a callable")
        self.arity = arity
        if table is not None and not isinstance(table, list):
            table = _to_nested_list(table)
        self.table = table
        if func is None:
            if arity == 1:
                func = table.__getitem__
            elif arity == 2:
                func = lambda a, b, _t=table: _t[a][b]
            else:
                def func(*args, _t=table):
                    x = _t
                    for a in args:
                        x = x[a]
                    return x
        self.func = func

    def __call__(self, *args) -> int:
        return self.func(*args)


def _to_nested_list(table):
    if hasattr(table, "tolist"):
        return table.tolist()
    return [(_to_nested_list(row) if isinstance(row, (list, tuple)) or hasattr(row, "tolist") else int(row))
            for row in table]


@dataclass
class FiniteModel:
    signature: Signature
    carriers: dict[str, int]
    functions: dict[str, FunctionTable]
    relations: dict[str, object]
    constants: dict[str, int]
    name: str = ""

    def __post_init__(self):
        sig = self.signature
        for s in sig.sorts:
            if self.carriers.get(s, 0) < 1:
                raise ModelError(f"carrier of sort {s} must be nonempty")
        for f in sig.functions:
            if f not in self.functions:
                raise ModelError(f"missing interpretation of function {f}")
            ft = self.functions[f]
            if not isinstance(ft, FunctionTable):
                self.functions[f] = FunctionTable(len(sig.functions[f][0]), table=ft)
        for p in sig.predicates:
            if p not in self.relations:
                raise ModelError(f"missing interpretation of predicate {p}")
            r = self.relations[p]
            if not hasattr(r, "__contains__") or isinstance(r, (set, frozenset, list)):
                self.relations[p] = TupleRelation(r)
        for c, s in sig.constants.items():
            if c not in self.constants:
                raise ModelError(f"missing interpretation of constant {c}")
            if not 0 <= self.constants[c] < self.carriers[s]:
                raise ModelError(f"constant {c} outside the carrier of {s}")
        self._compiled: dict = {}

    def size(self, sort: str) -> int:
        return self.carriers[sort]

    def check_tables(self) -> None:
        """Totality and sort-correctness of every table (exhaustive)."""
        sig = self.signature
        for f, (args, res) in sig.functions.items():
            ft = self.functions[f]
            top = self.carriers[res]
            for t in itertools.product(*(range(self.carriers[s]) for s in args)):
                v = ft(*t)
                if not (isinstance(v, int) and 0 <= v < top):
                    raise ModelError(f"{f}{t} = {v!r} is outside sort {res}")
        for p, args in sig.predicates.items():
            rel = self.relations[p]
            if isinstance(rel, TupleRelation):
                for t in rel.tuples:
                    if len(t) != len(args) or any(not 0 <= x < self.carriers[s] for x, s in zip(t, args)):
                        raise ModelError(f"{p}{t} is not sort-correct")

    def relation_tuples(self, pred: str) -> frozenset:
        rel = self.relations[pred]
        if isinstance(rel, TupleRelation):
            return rel.tuples
        args = self.signature.predicates[pred]
        return frozenset(t for t in itertools.product(*(range(self.carriers[s]) for s in args)) if t in rel)


# ---- compilation -----------------------------------------------------------

_MEMO_MIN_COST = 40.0
_MEMO_MAX_ENTRIES = 2_000_000


class _Compiler:
    def __init__(self, model: FiniteModel):
        self.m = model
        self.nslots = 0
        self.placed: set[int] = set()

    def new_slot(self) -> int:
        self.nslots += 1
        return self.nslots - 1

    # terms
    def term(self, t: Term, slots: Mapping[Var, int]):
        m = self.m
        if isinstance(t, Var):
            s = slots[t]
            return lambda env: env[s]
        if isinstance(t, Const):
            c = m.constants[t.name]
            return lambda env: c
        ft = m.functions[t.func]
        args = t.args
        table = ft.table
        if len(args) == 2 and table is not None:
            a, b = args
            if isinstance(a, Var) and isinstance(b, Var):
                sa, sb = slots[a], slots[b]
                return lambda env: table[env[sa]][env[sb]]
            fa, fb = self.term(a, slots), self.term(b, slots)
            return lambda env: table[fa(env)][fb(env)]
        if len(args) == 1 and table is not None:
            fa = self.term(args[0], slots)
            return lambda env: table[fa(env)]
        fs = [self.term(a, slots) for a in args]
        fn = ft.func
        return lambda env: fn(*[f(env) for f in fs])

    # formulas: returns (closure, cost estimate)
    def formula(self, f: Formula, slots: Mapping[Var, int]):
        if isinstance(f, Atom):
            rel = self.m.relations[f.pred]
            ts = [self.term(a, slots) for a in f.args]
            if len(ts) == 3:
                a, b, c = ts
                return (lambda env: (a(env), b(env), c(env)) in rel), 1.0
            if len(ts) == 2:
                a, b = ts
                return (lambda env: (a(env), b(env)) in rel), 1.0
            if len(ts) == 1:
                a = ts[0]
                return (lambda env: (a(env),) in rel), 1.0
            return (lambda env: tuple(t(env) for t in ts) in rel), 1.0
        if isinstance(f, Eq):
            a, b = self.term(f.left, slots), self.term(f.right, slots)
            return (lambda env: a(env) == b(env)), 0.5
        if isinstance(f, Not):
            g, c = self.formula(f.body, slots)
            return (lambda env: not g(env)), c
        if isinstance(f, And):
            return self.junction(_flatten(f, And), slots, conj=True)
        if isinstance(f, Or):
            return self.junction(_flatten(f, Or), slots, conj=False)
        if isinstance(f, Implies):
            a, ca = self.formula(f.left, slots)
            b, cb = self.formula(f.right, slots)
            if ca <= cb:
                return (lambda env: (not a(env)) or b(env)), ca + cb
            return (lambda env: b(env) or not a(env)), ca + cb
        if isinstance(f, Iff):
            a, ca = self.formula(f.left, slots)
            b, cb = self.formula(f.right, slots)
            return (lambda env: a(env) == b(env)), ca + cb
        if isinstance(f, (Forall, Exists)):
            return self.quantifier(f, slots)
        raise TypeError(f"not a formula: {f!r}")

    def junction(self, parts, slots, conj: bool):
        compiled = sorted((self.formula(p, slots) for p in parts), key=lambda x: x[1])
        fns = [fn for fn, _ in compiled]
        cost = sum(c for _, c in compiled)
        if len(fns) == 2:
            a, b = fns
            if conj:
                return (lambda env: a(env) and b(env)), cost
            return (lambda env: a(env) or b(env)), cost
        if conj:
            def run(env):
                for g in fns:
                    if not g(env):
                        return False
                return True
        else:
            def run(env):
                for g in fns:
                    if g(env):
                        return True
                return False
        return run, cost

    def guards(self, f, slot: int, slots: Mapping[Var, int]):
        """Candidate generators for the quantified variable, from the guard conjuncts."""
        v = f.var
        body = f.body
        if isinstance(f, Forall):
            if not isinstance(body, Implies):
                return []
            conjuncts = _flatten(body.left, And)
        else:
            conjuncts = _flatten(body, And)
        inner = dict(slots)
        inner[v] = slot
        eq_gens, rel_gens = [], []
        for c in conjuncts:
            if isinstance(c, Eq):
                for side, other in ((c.left, c.right), (c.right, c.left)):
                    ov = set(term_vars(other))
                    if side == v and v not in ov and ov <= inner.keys():
                        t = self.term(other, inner)
                        eq_gens.append(lambda env, t=t: (t(env),))
                        break
            elif isinstance(c, Atom):
                rel = self.m.relations[c.pred]
                if not hasattr(rel, "candidates"):
                    continue
                for pos, a in enumerate(c.args):
                    others = [b for i, b in enumerate(c.args) if i != pos]
                    if a == v and all(v not in set(term_vars(b)) and set(term_vars(b)) <= inner.keys()
                                      for b in others):
                        ts = [None if i == pos else self.term(b, inner) for i, b in enumerate(c.args)]
                        cost = rel.candidate_cost(pos) if hasattr(rel, "candidate_cost") else 1
                        rel_gens.append((cost, len(rel_gens), _rel_gen(rel, pos, ts)))
                        break
        # cheap generators first: `values` stops at the first singleton
        return eq_gens + [g for _, _, g in sorted(rel_gens, key=lambda x: x[:2])]

    def quantifier(self, f, slots: Mapping[Var, int]):
        if isinstance(f, Exists) and id(f) not in self.placed:
            block, body = [], f
            while isinstance(body, Exists) and body.var not in block:
                block.append(body.var)
                body = body.body
            if len(block) >= 2 and isinstance(body, And):
                g = self.reorder_block(block, _flatten(body, And))
                return self.formula(g, slots)
        slot = self.new_slot()
        inner = dict(slots)
        inner[f.var] = slot
        body, cbody = self.formula(f.body, inner)
        size = self.m.carriers[f.var.sort]
        gens = self.guards(f, slot, slots)
        domain = range(size)
        universal = isinstance(f, Forall)
        est = (min(size, 8) if gens else size) * cbody + 1.0

        if gens:
            first = gens[0] if len(gens) == 1 else None

            def values(env):
                if first is not None:
                    c = first(env)
                    return domain if c is None else c
                best = None
                for g in gens:
                    c = g(env)
                    if c is not None and (best is None or len(c) < len(best)):
                        best = c
                        if len(c) <= 1:
                            break
                return domain if best is None else best
        else:
            values = None

        if universal:
            if values is None:
                def run(env):
                    for x in domain:
                        env[slot] = x
                        if not body(env):
                            return False
                    return True
            else:
                def run(env):
                    for x in values(env):
                        env[slot] = x
                        if not body(env):
                            return False
                    return True
        else:
            if values is None:
                def run(env):
                    for x in domain:
                        env[slot] = x
                        if body(env):
                            return True
                    return False
            else:
                def run(env):
                    for x in values(env):
                        env[slot] = x
                        if body(env):
                            return True
                    return False

        if est < _MEMO_MIN_COST:
            return run, est
        fvs = free_variables(f)
        fslots = tuple(sorted(slots[v] for v in fvs))
        memo: dict = {}
        # memoized: at most one evaluation per key, so few keys make it cheap on average
        keys = 1
        for v in fvs:
            keys *= self.m.carriers[v.sort]
        est = min(est, 1.0 + keys)

        if not fslots:
            def cached(env):
                r = memo.get(())
                if r is None:
                    r = memo[()] = run(env)
                return r
        elif len(fslots) == 1:
            (s0,) = fslots

            def cached(env):
                k = env[s0]
                r = memo.get(k)
                if r is None:
                    r = run(env)
                    if len(memo) > _MEMO_MAX_ENTRIES:
                        memo.clear()
                    memo[k] = r
                return r
        else:
            def cached(env):
                k = tuple([env[s] for s in fslots])
                r = memo.get(k)
                if r is None:
                    r = run(env)
                    if len(memo) > _MEMO_MAX_ENTRIES:
                        memo.clear()
                    memo[k] = r
                return r
        return cached, est


    def reorder_block(self, block: list[Var], conjuncts: list[Formula]) -> Formula:
        """Reorder an existential block and hang each conjunct at the innermost
        quantifier it needs, so that definable variables become guarded."""
        bset = set(block)
        needs = [free_variables(c) & bset for c in conjuncts]
        chosen: list[Var] = []
        rest = list(block)

        def definable(v, have):
            for c, nd in zip(conjuncts, needs):
                if isinstance(c, Eq) and v in nd and nd - {v} <= have:
                    for side, other in ((c.left, c.right), (c.right, c.left)):
                        if side == v and v not in set(term_vars(other)):
                            return True
            return False

        while rest:
            have = set(chosen)
            best, key = None, None
            for i, v in enumerate(rest):
                closed = sum(1 for nd in needs if v in nd and nd <= have | {v})
                k = (definable(v, have), closed, -i)
                if key is None or k > key:
                    best, key = v, k
            chosen.append(best)
            rest.remove(best)
        level = {v: i for i, v in enumerate(chosen)}
        hung: list[list[Formula]] = [[] for _ in chosen]
        for c, nd in zip(conjuncts, needs):
            hung[max((level[v] for v in nd), default=0)].append(c)
        out = None
        for i in range(len(chosen) - 1, -1, -1):
            parts = list(hung[i])
            if out is not None:
                parts.append(out)
            if not parts:
                # nothing mentions this variable: drop the vacuous quantifier (carriers are nonempty)
                continue
            body = parts[0] if len(parts) == 1 else _balanced_and(parts)
            out = Exists(chosen[i], body)
            self.placed.add(id(out))
        self._keep = getattr(self, "_keep", [])
        self._keep.append(out)
        return out


def _balanced_and(parts):
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return And(_balanced_and(parts[:mid]), _balanced_and(parts[mid:]))


def _rel_gen(rel, pos, ts):
    cand = rel.candidates
    if len(ts) == 3:
        a, b, c = ts
        if pos == 0:
            return lambda env: cand(0, (None, b(env), c(env)))
        if pos == 1:
            return lambda env: cand(1, (a(env), None, c(env)))
        return lambda env: cand(2, (a(env), b(env), None))
    return lambda env: cand(pos, tuple(None if t is None else t(env) for t in ts))


def _flatten(f, kind) -> list:
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, kind):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


@dataclass
class _Compiled:
    fn: Callable
    order: tuple[Var, ...]
    nslots: int


def compile_formula(m: FiniteModel, phi: Formula) -> _Compiled:
    hit = m._compiled.get(phi)
    if hit is not None:
        return hit
    order = tuple(sorted(free_variables(phi), key=lambda v: (v.name, v.sort)))
    comp = _Compiler(m)
    slots = {v: comp.new_slot() for v in order}
    fn, _ = comp.formula(phi, slots)
    out = _Compiled(fn, order, comp.nslots)
    m._compiled[phi] = out
    return out


def _lookup(assignment: Mapping, v: Var):
    if v in assignment:
        return assignment[v]
    if (v.name, v.sort) in assignment:
        return assignment[(v.name, v.sort)]
    if v.name in assignment:
        return assignment[v.name]
    raise MissingAssignment(f"no value for free variable {v.name}:{v.sort}")


def evaluate(m: FiniteModel, phi: Formula, assignment: Mapping | None = None) -> bool:
    """Truth of phi in m under the assignment (keys: Var, (name, sort) or name)."""
    c = compile_formula(m, phi)
    env = [0] * max(c.nslots, 1)
    assignment = assignment or {}
    for i, v in enumerate(c.order):
        x = _lookup(assignment, v)
        if not 0 <= x < m.carriers[v.sort]:
            raise ModelError(f"value {x} for {v.name} outside the carrier of {v.sort}")
        env[i] = x
    return bool(c.fn(env))


def evaluate_term(m: FiniteModel, t: Term, assignment: Mapping | None = None) -> int:
    assignment = assignment or {}
    if isinstance(t, Var):
        return _lookup(assignment, t)
    if isinstance(t, Const):
        return m.constants[t.name]
    return m.functions[t.func](*(evaluate_term(m, a, assignment) for a in t.args))


def evaluate_naive(m: FiniteModel, phi: Formula, assignment: Mapping | None = None) -> bool:
    """Direct transcription of the inductive satisfaction clauses; the reference for tests."""
    env = {}
    for v in free_variables(phi):
        env[v] = _lookup(assignment or {}, v)

    def go(f) -> bool:
        if isinstance(f, Atom):
            return tuple(evaluate_term(m, a, env) for a in f.args) in m.relations[f.pred]
        if isinstance(f, Eq):
            return evaluate_term(m, f.left, env) == evaluate_term(m, f.right, env)
        if isinstance(f, Not):
            return not go(f.body)
        if isinstance(f, Implies):
            return (not go(f.left)) or go(f.right)
        if isinstance(f, And):
            return go(f.left) and go(f.right)
        if isinstance(f, Or):
            return go(f.left) or go(f.right)
        if isinstance(f, Iff):
            return go(f.left) == go(f.right)
        saved = env.get(f.var)
        results = []
        for x in range(m.carriers[f.var.sort]):
            env[f.var] = x
            results.append(go(f.body))
        if saved is None:
            env.pop(f.var, None)
        else:
            env[f.var] = saved
        return all(results) if isinstance(f, Forall) else any(results)

    return go(phi)


# ---- isomorphism -----------------------------------------------------------

def _element_invariants(m: FiniteModel) -> dict[str, list]:
    sig = m.signature
    inv = {s: [[] for _ in range(m.carriers[s])] for s in sig.sorts}
    for c, s in sorted(sig.constants.items()):
        for x in range(m.carriers[s]):
            inv[s][x].append(("const", c, m.constants[c] == x))
    for f, (args, res) in sorted(sig.functions.items()):
        ft = m.functions[f]
        pre = [0] * m.carriers[res]
        fixed = [[0] * len(args) for _ in range(m.carriers[res])] if all(a == res for a in args) else None
        for t in itertools.product(*(range(m.carriers[s]) for s in args)):
            y = ft(*t)
            pre[y] += 1
            if fixed is not None:
                for i, x in enumerate(t):
                    if x == y:
                        fixed[y][i] += 1
        for y in range(m.carriers[res]):
            inv[res][y].append(("pre", f, pre[y]))
            if fixed is not None:
                inv[res][y].append(("fix", f, tuple(fixed[y])))
        if len(args) == 1 and args[0] == res:
            # length of the forward orbit under a unary map
            for x in range(m.carriers[res]):
                seen, y = set(), x
                while y not in seen:
                    seen.add(y)
                    y = ft(y)
                inv[res][x].append(("orbit", f, len(seen)))
        if len(args) == 2 and args[0] == args[1] == res:
            for x in range(m.carriers[res]):
                seen, y = [], x
                while y not in seen:
                    seen.append(y)
                    y = ft(y, x)
                inv[res][x].append(("pow", f, len(seen), seen.index(y)))
    for p, args in sorted(sig.predicates.items()):
        counts = {s: [[0] * len(args) for _ in range(m.carriers[s])] for s in set(args)}
        for t in m.relation_tuples(p):
            for i, (x, s) in enumerate(zip(t, args)):
                counts[s][x][i] += 1
        for s in set(args):
            for x in range(m.carriers[s]):
                inv[s][x].append(("rel", p, tuple(counts[s][x])))
    return {s: [tuple(v) for v in inv[s]] for s in sig.sorts}


def models_isomorphic(m1: FiniteModel, m2: FiniteModel) -> dict[str, list[int]] | None:
    """A sort-indexed family of bijections preserving every symbol, or None."""
    sig = m1.signature
    if m2.signature != sig:
        raise ModelError("models over different signatures")
    if any(m1.carriers[s] != m2.carriers[s] for s in sig.sorts):
        return None
    inv1, inv2 = _element_invariants(m1), _element_invariants(m2)
    for s in sig.sorts:
        if sorted(inv1[s]) != sorted(inv2[s]):
            return None
    by_inv2 = {s: defaultdict(list) for s in sig.sorts}
    for s in sig.sorts:
        for y, key in enumerate(inv2[s]):
            by_inv2[s][key].append(y)
    funcs = sorted(sig.functions.items())
    rels = sorted(sig.predicates.items())
    rel2 = {p: m2.relation_tuples(p) for p, _ in rels}
    rel1 = {p: m1.relation_tuples(p) for p, _ in rels}

    fwd = {s: [-1] * m1.carriers[s] for s in sig.sorts}
    bwd = {s: [-1] * m2.carriers[s] for s in sig.sorts}

    def assign(s, x, y, trail) -> bool:
        cur = fwd[s][x]
        if cur != -1:
            return cur == y
        if bwd[s][y] != -1:
            return False
        fwd[s][x] = y
        bwd[s][y] = x
        trail.append((s, x, y))
        return True

    def propagate(trail, start) -> bool:
        i = start
        while i < len(trail):
            s, x, _ = trail[i]
            i += 1
            for f, (args, res) in funcs:
                if s not in args:
                    continue
                pools = []
                for a in args:
                    pools.append([z for z in range(m1.carriers[a]) if fwd[a][z] != -1])
                f1, f2 = m1.functions[f], m2.functions[f]
                for t in itertools.product(*pools):
                    if not any(a == s and z == x for a, z in zip(args, t)):
                        continue
                    y1 = f1(*t)
                    y2 = f2(*(fwd[a][z] for a, z in zip(args, t)))
                    if not assign(res, y1, y2, trail):
                        return False
        return True

    def undo(trail, upto):
        while len(trail) > upto:
            s, x, y = trail.pop()
            fwd[s][x] = -1
            bwd[s][y] = -1

    def verify() -> bool:
        for f, (args, res) in funcs:
            f1, f2 = m1.functions[f], m2.functions[f]
            for t in itertools.product(*(range(m1.carriers[a]) for a in args)):
                if fwd[res][f1(*t)] != f2(*(fwd[a][z] for a, z in zip(args, t))):
                    return False
        for p, args in rels:
            mapped = {tuple(fwd[a][z] for a, z in zip(args, t)) for t in rel1[p]}
            if mapped != rel2[p]:
                return False
        return True

    trail: list = []
    for c, s in sorted(sig.constants.items()):
        if not assign(s, m1.constants[c], m2.constants[c], trail):
            return None
    if not propagate(trail, 0):
        return None

    order = [(s, x) for s in sig.sorts for x in range(m1.carriers[s])]

    def search() -> bool:
        nxt = next(((s, x) for s, x in order if fwd[s][x] == -1), None)
        if nxt is None:
            return verify()
        s, x = nxt
        for y in by_inv2[s][inv1[s][x]]:
            if bwd[s][y] != -1:
                continue
            mark = len(trail)
            if assign(s, x, y, trail) and propagate(trail, mark) and search():
                return True
            undo(trail, mark)
        return False

    if search():
        return {s: list(fwd[s]) for s in sig.sorts}
    return None


@dataclass(frozen=True)
class EquivalenceReport:
    rows: tuple[tuple[Formula, bool, bool], ...]

    @property
    def agree(self) -> bool:
        return all(a == b for _, a, b in self.rows)

    @property
    def disagreements(self) -> list[Formula]:
        return [f for f, a, b in self.rows if a != b]


def sampled_equivalence(m1: FiniteModel, m2: FiniteModel, sentences: Sequence[Formula]) -> EquivalenceReport:
    rows = []
    for phi in sentences:
        if not is_sentence(phi):
            raise ValueError("sampled equivalence takes sentences only")
        rows.append((phi, evaluate(m1, phi), evaluate(m2, phi)))
    return EquivalenceReport(tuple(rows))
