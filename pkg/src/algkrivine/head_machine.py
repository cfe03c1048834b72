"""Algebraic Krivine machine with explicit fuel.

``K_n`` is computed for a user-chosen ``n``; the limit machine is only
approximated.  States with no applicable rule (an abstraction facing an empty
stack, ``c0`` facing a non-empty one, an unbound variable) are worth zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator

from .lambda_syntax import Abs, App, C0, Scale, Sum, Term, Var, Zero, print_alg, subst
from .scalar import RATIONAL, Semiring


class UnboundVariable(KeyError):
    pass


class NotClosed(ValueError):
    pass


@dataclass(frozen=True)
class AlgEnv:
    """Finite partial map from names to closures, stored sorted by name."""

    entries: tuple = ()

    @classmethod
    def of(cls, mapping) -> "AlgEnv":
        return cls(tuple(sorted(dict(mapping).items())))

    def get(self, name: str):
        for k, v in self.entries:
            if k == name:
                return v
        return None

    def __contains__(self, name):
        return any(k == name for k, _ in self.entries)

    def extend(self, name: str, closure: "AlgClosure") -> "AlgEnv":
        items = dict(self.entries)
        items[name] = closure
        return AlgEnv.of(items)

    @property
    def domain(self) -> frozenset:
        return frozenset(k for k, _ in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @cached_property
    def _hash(self):
        return hash(self.entries)

    def __hash__(self):
        return self._hash


EMPTY_ENV = AlgEnv()


@dataclass(frozen=True)
class AlgClosure:
    term: Term
    env: AlgEnv = EMPTY_ENV

    @cached_property
    def _hash(self):
        return hash((self.term, self.env))

    def __hash__(self):
        return self._hash


@dataclass(frozen=True)
class AlgState:
    term: Term
    env: AlgEnv = EMPTY_ENV
    stack: tuple = ()

    @classmethod
    def initial(cls, term: Term) -> "AlgState":
        return cls(term, EMPTY_ENV, ())

    @property
    def head(self) -> AlgClosure:
        return AlgClosure(self.term, self.env)

    @cached_property
    def _hash(self):
        return hash((self.term, self.env, self.stack))

    def __hash__(self):
        return self._hash


def readback_closure(c: AlgClosure) -> Term:
    missing = c.term.fv - c.env.domain
    if missing:
        raise UnboundVariable(f"free variables {sorted(missing)} not bound by the environment")
    mapping = {x: readback_closure(g) for x, g in c.env if x in c.term.fv}
    return subst(c.term, mapping)


def readback_T(s: AlgState) -> Term:
    """The algebraic term a state stands for."""
    t = readback_closure(s.head)
    for g in s.stack:
        t = App(t, readback_closure(g))
    return t


# --------------------------------------------------------------------------
# one step


@dataclass(frozen=True)
class Done:
    pass


@dataclass(frozen=True)
class Fuel0:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


@dataclass(frozen=True)
class Next:
    state: AlgState
    fuel: int


@dataclass(frozen=True)
class Branch:
    branches: tuple  # of (scalar, AlgState, fuel)


def machine_step(fuel: int, s: AlgState, semiring: Semiring = RATIONAL):
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if fuel == 0:
        return Fuel0()
    t, E, stack = s.term, s.env, s.stack
    if isinstance(t, C0):
        return Done() if not stack else Stuck("c0 applied to arguments")
    if isinstance(t, Var):
        g = E.get(t.name)
        if g is None:
            return Stuck(f"unbound variable {t.name}")
        return Next(AlgState(g.term, g.env, stack), fuel - 1)
    if isinstance(t, Abs):
        if not stack:
            return Stuck("abstraction with an empty stack")
        return Next(AlgState(t.body, E.extend(t.var, stack[0]), stack[1:]), fuel - 1)
    if isinstance(t, App):
        return Next(AlgState(t.fun, E, (AlgClosure(t.arg, E),) + stack), fuel - 1)
    if isinstance(t, Scale):
        return Branch(((semiring.check(t.scalar), AlgState(t.body, E, stack), fuel),))
    if isinstance(t, Sum):
        one = semiring.one
        return Branch(((one, AlgState(t.left, E, stack), fuel), (one, AlgState(t.right, E, stack), fuel)))
    if isinstance(t, Zero):
        return Branch(())
    raise TypeError(f"not an algebraic term: {t!r}")


# --------------------------------------------------------------------------
# running


@dataclass
class HeadRun:
    value: Any
    approximants: list = field(default_factory=list)  # K_0 .. K_fuel

    @property
    def stable(self) -> bool:
        """Whether ``K_fuel == K_{fuel-1}`` (a hint, not a convergence proof)."""
        a = self.approximants
        return len(a) < 2 or a[-1] == a[-2]

    @property
    def last_change(self) -> int:
        """Largest ``n`` with ``K_n != K_{n-1}``; 0 if the value never moved."""
        a = self.approximants
        for n in range(len(a) - 1, 0, -1):
            if a[n] != a[n - 1]:
                return n
        return 0


def _check_closed(M: Term):
    if M.fv:
        raise NotClosed(f"term has free variables {sorted(M.fv)}")


def _walk(M: Term, fuel: int, semiring: Semiring) -> Iterator[tuple]:
    """Depth-first walk of the branch tree: yields (weight, state, outcome, steps)."""
    todo = [(semiring.one, AlgState.initial(M), fuel)]
    while todo:
        w, s, f = todo.pop()
        out = machine_step(f, s, semiring)
        yield w, s, out, fuel - f
        if isinstance(out, Next):
            todo.append((w, out.state, out.fuel))
        elif isinstance(out, Branch):
            for a, s2, f2 in reversed(out.branches):
                w2 = semiring.mul(w, a)
                if not semiring.is_zero(w2):
                    todo.append((w2, s2, f2))


def run_K_detailed(M: Term, fuel: int, semiring: Semiring = RATIONAL) -> HeadRun:
    _check_closed(M)
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    S = semiring
    increments = [S.zero] * (fuel + 1)
    for w, _, out, steps in _walk(M, fuel, S):
        if isinstance(out, Done):
            increments[steps + 1] = S.add(increments[steps + 1], w)
    approx = []
    acc = S.zero
    for inc in increments:
        acc = S.add(acc, inc)
        approx.append(acc)
    return HeadRun(approx[-1], approx)


def run_K(M: Term, fuel: int, semiring: Semiring = RATIONAL):
    """The scalar ``a`` with ``K_fuel(M, {}, []) = a * c0``."""
    return run_K_detailed(M, fuel, semiring).value


def trace_K(M: Term, fuel: int, semiring: Semiring = RATIONAL) -> list[tuple[Any, AlgState]]:
    """Every visited state with the weight of the path reaching it, depth first."""
    _check_closed(M)
    return [(w, s) for w, s, _, _ in _walk(M, fuel, semiring)]


# --------------------------------------------------------------------------
# rendering


def format_alg_env(E: AlgEnv) -> str:
    if not len(E):
        return "{}"
    return "{" + ", ".join(f"{x} -> {format_alg_closure(g)}" for x, g in E) + "}"


def format_alg_closure(g: AlgClosure) -> str:
    return f"({print_alg(g.term)}, {format_alg_env(g.env)})"


def format_alg_stack(stack: Iterable[AlgClosure]) -> str:
    return "[" + "; ".join(format_alg_closure(g) for g in stack) + "]"


def alg_env_json(E: AlgEnv) -> dict:
    return {x: alg_closure_json(g) for x, g in E}


def alg_closure_json(g: AlgClosure) -> dict:
    return {"term": print_alg(g.term), "env": alg_env_json(g.env)}


def alg_state_json(s: AlgState) -> dict:
    return {
        "term": print_alg(s.term),
        "env": alg_env_json(s.env),
        "stack": [alg_closure_json(g) for g in s.stack],
    }
