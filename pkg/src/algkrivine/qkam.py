"""The quantitative Krivine machine.

The machine is a matrix indexed by pairs (algebraic state, resource state).
:class:`QKAM` computes single entries by memoised structural recursion; the
recursion measure is (resource-state size, algebraic-state size), see
:func:`res_state_measure` and :func:`alg_state_measure`.

:func:`enumerate_support` goes the other way: it runs the algebraic machine
forward and builds, for every successful path, the resource term recording
which closures were used, so the non-zero column entries of ``K(M)`` are
produced without guessing candidate annotations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any

from ._lexer import fresh_name
from .combination import Combination
from .head_machine import AlgClosure, AlgEnv, AlgState, NotClosed, EMPTY_ENV
from .lambda_syntax import Abs, App, C0, Scale, Sum, Term, Var, Zero, print_alg, size as alg_size, subst
from .resource_syntax import Bag, RAbs, RApp, RC0, RVar, SimpleTerm, bag_splittings, bag_union, print_res, res_subst
from .scalar import RATIONAL, Semiring

# --------------------------------------------------------------------------
# resource closures, environments and states


@dataclass(frozen=True)
class ResEnv:
    """Total map name -> closure; only non-empty closures are stored."""

    entries: tuple = ()

    @classmethod
    def of(cls, mapping) -> "ResEnv":
        return cls(tuple(sorted((x, c) for x, c in dict(mapping).items() if not c.is_empty)))

    def get(self, name: str) -> "ResClosure":
        for k, v in self.entries:
            if k == name:
                return v
        return EMPTY_CLOSURE

    def set(self, name: str, closure: "ResClosure") -> "ResEnv":
        items = dict(self.entries)
        items[name] = closure
        return ResEnv.of(items)

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, _ in self.entries)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def __iter__(self):
        return iter(self.entries)

    @cached_property
    def _hash(self):
        return hash(self.entries)

    def __hash__(self):
        return self._hash


E0 = ResEnv()


@dataclass(frozen=True)
class ResClosure:
    bag: Bag = Bag()
    env: ResEnv = E0

    @property
    def is_empty(self) -> bool:
        return not self.bag and self.env.is_empty

    @property
    def is_elementary(self) -> bool:
        return len(self.bag) == 1 and self.bag.cardinality == 1

    @cached_property
    def _hash(self):
        return hash((self.bag, self.env))

    def __hash__(self):
        return self._hash


EMPTY_CLOSURE = ResClosure()


@dataclass(frozen=True)
class ResState:
    term: SimpleTerm
    env: ResEnv = E0
    stack: tuple = ()

    @cached_property
    def _hash(self):
        return hash((self.term, self.env, self.stack))

    def __hash__(self):
        return self._hash


@dataclass(frozen=True)
class PairedConfig:
    """An algebraic closure and stack against a resource closure and stack.

    The resource head may carry any bag; only a singleton bag denotes a
    resource state, every other configuration has coefficient zero.
    """

    alg_head: AlgClosure
    alg_stack: tuple
    res_head: ResClosure
    res_stack: tuple

    @classmethod
    def of_states(cls, a: AlgState, r: ResState) -> "PairedConfig":
        return cls(a.head, a.stack, ResClosure(Bag([r.term]), r.env), r.stack)


def closure_concat(c1: ResClosure, c2: ResClosure) -> ResClosure:
    return ResClosure(bag_union(c1.bag, c2.bag), env_concat(c1.env, c2.env))


def env_concat(e1: ResEnv, e2: ResEnv) -> ResEnv:
    names = e1.support | e2.support
    return ResEnv.of({x: closure_concat(e1.get(x), e2.get(x)) for x in names})


def _dead(c: ResClosure) -> bool:
    # an empty bag can never be consumed, so anything in its environment is stranded
    return not c.bag and not c.env.is_empty


@lru_cache(maxsize=100_000)
def closure_splittings(c: ResClosure, prune: bool = True) -> tuple:
    out = []
    for b1, b2 in bag_splittings(c.bag):
        for f1, f2 in env_splittings(c.env, prune):
            c1, c2 = ResClosure(b1, f1), ResClosure(b2, f2)
            if prune and (_dead(c1) or _dead(c2)):
                continue
            out.append((c1, c2))
    return tuple(out)


@lru_cache(maxsize=100_000)
def env_splittings(e: ResEnv, prune: bool = True) -> tuple:
    """Every ordered ``(e1, e2)`` with ``env_concat(e1, e2) == e``, each once."""
    names = [x for x, _ in e]
    choices = [closure_splittings(c, prune) for _, c in e]
    out = []
    for combo in itertools.product(*choices):
        left = ResEnv.of({x: pair[0] for x, pair in zip(names, combo)})
        right = ResEnv.of({x: pair[1] for x, pair in zip(names, combo)})
        out.append((left, right))
    return tuple(out)


# --------------------------------------------------------------------------
# recursion measure


def _closure_weight(c: ResClosure) -> int:
    return sum(n * u.size for u, n in c.bag.pairs()) + _env_weight(c.env)


def _env_weight(e: ResEnv) -> int:
    return sum(_closure_weight(c) for _, c in e)


def res_state_measure(r: ResState) -> int:
    return r.term.size + _env_weight(r.env) + sum(_closure_weight(c) for c in r.stack)


def alg_state_measure(a: AlgState) -> int:
    return alg_size(a.term)


# --------------------------------------------------------------------------
# the coefficient matrix


class QKAM:
    """Entries of the quantitative machine over one semiring.

    ``prune`` skips environment decompositions that strand a non-empty
    environment under an empty bag; results are unchanged (such closures are
    never consumed) but far fewer terms are visited.
    """

    def __init__(self, semiring: Semiring = RATIONAL, prune: bool = True, check_measure: bool = False):
        self.semiring = semiring
        self.prune = prune
        self.check_measure = check_measure
        self.memo: dict = {}

    def k_hat(self, M: Term, t: SimpleTerm):
        if M.fv:
            raise NotClosed(f"term has free variables {sorted(M.fv)}")
        return self.coefficient(AlgState.initial(M), ResState(t))

    def coefficient_config(self, cfg: PairedConfig):
        rc = cfg.res_head
        if not rc.is_elementary:
            return self.semiring.zero
        (u,) = rc.bag.elements()
        a = AlgState(cfg.alg_head.term, cfg.alg_head.env, tuple(cfg.alg_stack))
        return self.coefficient(a, ResState(u, rc.env, tuple(cfg.res_stack)))

    def coefficient(self, a: AlgState, r: ResState):
        key = (a, r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        S = self.semiring
        step = self.expand(a, r)
        if not isinstance(step, list):
            value = step
        else:
            value = S.zero
            for factor, a2, r2 in step:
                if self.check_measure:
                    self._assert_decrease(a, r, a2, r2)
                sub = self.coefficient(a2, r2)
                if not S.is_zero(sub):
                    value = S.add(value, S.mul(factor, sub))
        self.memo[key] = value
        return value

    def expand(self, a: AlgState, r: ResState):
        """One unfolding: a scalar for leaves, else ``[(factor, a', r'), ...]``."""
        S = self.semiring
        t, E, stack = a.term, a.env, a.stack
        if isinstance(t, Scale):
            return [(S.check(t.scalar), AlgState(t.body, E, stack), r)]
        if isinstance(t, Sum):
            return [(S.one, AlgState(t.left, E, stack), r), (S.one, AlgState(t.right, E, stack), r)]
        u = r.term
        if isinstance(t, C0):
            ok = not stack and isinstance(u, RC0) and r.env.is_empty and not r.stack
            return S.one if ok else S.zero
        if isinstance(t, Var):
            g = E.get(t.name)
            if g is None or not isinstance(u, RVar) or u.name != t.name:
                return S.zero
            if not r.env.support <= {t.name}:
                return S.zero
            c = r.env.get(t.name)
            if not c.is_elementary:
                return S.zero
            (v,) = c.bag.elements()
            return [(S.one, AlgState(g.term, g.env, stack), ResState(v, c.env, r.stack))]
        if isinstance(t, Abs):
            if not stack or not r.stack or not isinstance(u, RAbs):
                return S.zero
            x, body, ubody = t.var, t.body, u.body
            if u.var != x:
                if x in u.fv:
                    z = fresh_name(x, t.fv | u.fv | E.domain | r.env.support)
                    body = subst(body, x, Var(z))
                    x = z
                ubody = res_subst(ubody, {u.var: RVar(x)})
            if not r.env.get(x).is_empty:
                return S.zero
            return [(S.one,
                     AlgState(body, E.extend(x, stack[0]), stack[1:]),
                     ResState(ubody, r.env.set(x, r.stack[0]), r.stack[1:]))]
        if isinstance(t, App):
            if not isinstance(u, RApp):
                return S.zero
            a2 = AlgState(t.fun, E, (AlgClosure(t.arg, E),) + stack)
            return [(S.one, a2, ResState(u.fun, e1, (ResClosure(u.bag, e2),) + r.stack))
                    for e1, e2 in env_splittings(r.env, self.prune)]
        if isinstance(t, Zero):
            return S.zero
        raise TypeError(f"not an algebraic term: {t!r}")

    @staticmethod
    def _assert_decrease(a, r, a2, r2):
        before = (res_state_measure(r), alg_state_measure(a))
        after = (res_state_measure(r2), alg_state_measure(a2))
        assert after < before, f"measure did not decrease: {before} -> {after}"

    def trace(self, a: AlgState, r: ResState) -> list[tuple[AlgState, ResState, Any]]:
        """Pairs with a non-zero coefficient, in the order the recursion visits them."""
        S = self.semiring
        rows: list = []

        def visit(a, r):
            value = self.coefficient(a, r)
            if S.is_zero(value):
                return
            rows.append((a, r, value))
            step = self.expand(a, r)
            if isinstance(step, list):
                for _, a2, r2 in step:
                    visit(a2, r2)

        visit(a, r)
        return rows


def k_hat(M: Term, t: SimpleTerm, semiring: Semiring = RATIONAL, prune: bool = True):
    return QKAM(semiring, prune).k_hat(M, t)


def coefficient(cfg: PairedConfig, semiring: Semiring = RATIONAL, prune: bool = True):
    return QKAM(semiring, prune).coefficient_config(cfg)


def trace_pair(M: Term, t: SimpleTerm, semiring: Semiring = RATIONAL, prune: bool = True):
    if M.fv:
        raise NotClosed(f"term has free variables {sorted(M.fv)}")
    return QKAM(semiring, prune).trace(AlgState.initial(M), ResState(t))


# --------------------------------------------------------------------------
# forward enumeration of the support


@dataclass(frozen=True)
class _Store:
    """Partial annotation built along one execution path.

    ``nodes`` maps a hole to what filled it; ``uses`` maps a closure id to the
    holes opened each time that closure was looked up.
    """

    nodes: tuple = ()
    uses: tuple = ()
    closures: tuple = ()  # closure id -> (term, env)
    size: int = 0

    def fill(self, hole: int, node: tuple, cost: int) -> "_Store":
        nodes = list(self.nodes)
        nodes[hole] = node
        return _Store(tuple(nodes), self.uses, self.closures, self.size + cost)

    def new_hole(self) -> tuple[int, "_Store"]:
        return len(self.nodes), _Store(self.nodes + (None,), self.uses, self.closures, self.size)

    def new_closure(self, term, env) -> tuple[int, "_Store"]:
        return len(self.closures), _Store(self.nodes, self.uses + ((),), self.closures + ((term, env),), self.size)

    def add_use(self, cid: int, hole: int) -> "_Store":
        uses = list(self.uses)
        uses[cid] = uses[cid] + (hole,)
        return _Store(self.nodes, tuple(uses), self.closures, self.size)

    def assemble(self, hole: int) -> SimpleTerm:
        node = self.nodes[hole]
        kind = node[0]
        if kind == "var":
            return RVar(node[1])
        if kind == "c0":
            return RC0()
        if kind == "abs":
            return RAbs(node[1], self.assemble(node[2]))
        if kind == "app":
            return RApp(self.assemble(node[1]), Bag(self.assemble(h) for h in self.uses[node[2]]))
        raise AssertionError(f"unfilled hole {hole}")


def enumerate_support(M: Term, max_size: int, semiring: Semiring = RATIONAL) -> Combination:
    """All ``t`` with ``size(t) <= max_size`` and ``k_hat(M, t) != 0``."""
    if M.fv:
        raise NotClosed(f"term has free variables {sorted(M.fv)}")
    S = semiring
    found: list = []
    hole, store = _Store().new_hole()
    # env: tuple of (name, closure id); stack: tuple of closure ids
    todo = [(S.one, M, (), (), hole, store)]
    while todo:
        w, t, env, stack, hole, store = todo.pop()
        if store.size > max_size:
            continue
        if isinstance(t, Scale):
            w2 = S.mul(w, S.check(t.scalar))
            if not S.is_zero(w2):
                todo.append((w2, t.body, env, stack, hole, store))
        elif isinstance(t, Sum):
            todo.append((w, t.right, env, stack, hole, store))
            todo.append((w, t.left, env, stack, hole, store))
        elif isinstance(t, C0):
            if not stack:
                store = store.fill(hole, ("c0",), 1)
                if store.size <= max_size:
                    found.append((store.assemble(0), w))
        elif isinstance(t, Var):
            cid = dict(env).get(t.name)
            if cid is None:
                continue
            store = store.fill(hole, ("var", t.name), 1)
            h2, store = store.new_hole()
            store = store.add_use(cid, h2)
            term, cenv = store.closures[cid]
            todo.append((w, term, cenv, stack, h2, store))
        elif isinstance(t, Abs):
            if not stack:
                continue
            h2, store = store.new_hole()
            store = store.fill(hole, ("abs", t.var, h2), 1)
            env2 = tuple((k, v) for k, v in env if k != t.var) + ((t.var, stack[0]),)
            todo.append((w, t.body, env2, stack[1:], h2, store))
        elif isinstance(t, App):
            cid, store = store.new_closure(t.arg, env)
            h2, store = store.new_hole()
            store = store.fill(hole, ("app", h2, cid), 2)
            todo.append((w, t.fun, env, (cid,) + stack, h2, store))
        # Zero: the path contributes nothing
    return Combination(S, found)


# --------------------------------------------------------------------------
# rendering


def format_res_env(e: ResEnv) -> str:
    if e.is_empty:
        return "e0"
    return "{" + ", ".join(f"{x} -> {format_res_closure(c)}" for x, c in e) + "}"


def format_res_closure(c: ResClosure) -> str:
    if c.is_empty:
        return "1"
    return f"({print_res(c.bag)}, {format_res_env(c.env)})"


def format_res_stack(stack) -> str:
    return "[" + "; ".join(format_res_closure(c) for c in stack) + "]"


def res_env_json(e: ResEnv) -> dict:
    return {x: res_closure_json(c) for x, c in e}


def res_closure_json(c: ResClosure) -> dict:
    return {"bag": print_res(c.bag), "env": res_env_json(c.env)}


def res_state_json(r: ResState) -> dict:
    return {"term": print_res(r.term), "env": res_env_json(r.env), "stack": [res_closure_json(c) for c in r.stack]}
