"""Resource lambda-terms: simple terms, bags (finite multisets) and sums.

Concrete syntax::

    t    := id | 'c0' | '\\' id '.' t | '<' t '>' BAG+ | '(' t ')'
    BAG  := '{' [ITEM (',' ITEM)*] '}'
    ITEM := t ['^' nat]

``<t>{a}{b}`` abbreviates ``<<t>{a}>{b}`` and ``{}`` is the empty bag.  As with
algebraic terms, equality and hashing are up to alpha-conversion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from ._lexer import ParseError, TokenStream, fresh_name

__all__ = [
    "SimpleTerm", "RVar", "RC0", "RAbs", "RApp", "Bag", "ParseError",
    "parse_res", "parse_bag", "print_res", "degree", "multiplicity_m", "bag_union",
    "bag_splittings", "res_size", "res_subst",
]


class SimpleTerm:
    @cached_property
    def key(self) -> str:
        return _key(self, {}, 0)

    def __eq__(self, other):
        if not isinstance(other, SimpleTerm):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    @cached_property
    def fv(self) -> frozenset:
        return _free_vars(self)

    @cached_property
    def size(self) -> int:
        return res_size(self)

    def __str__(self):
        return print_res(self)


@dataclass(frozen=True, eq=False)
class RVar(SimpleTerm):
    name: str


@dataclass(frozen=True, eq=False)
class RC0(SimpleTerm):
    pass


@dataclass(frozen=True, eq=False)
class RAbs(SimpleTerm):
    var: str
    body: SimpleTerm


@dataclass(frozen=True, eq=False)
class RApp(SimpleTerm):
    fun: SimpleTerm
    bag: "Bag"


class Bag(Mapping):
    """A finite multiset of simple terms (a simple poly-term).

    Items are kept sorted by their nameless key, so iteration order is
    deterministic and independent of binder names.
    """

    def __init__(self, items: Iterable[SimpleTerm] | Mapping[SimpleTerm, int] = ()):
        counts: dict = {}
        if isinstance(items, Mapping):
            pairs = items.items()
        else:
            pairs = ((t, 1) for t in items)
        for t, n in pairs:
            if not isinstance(t, SimpleTerm):
                raise TypeError(f"bag items must be simple terms, got {t!r}")
            if n < 0:
                raise ValueError("negative multiplicity")
            if n:
                counts[t] = counts.get(t, 0) + n
        self._items = tuple(sorted(counts.items(), key=lambda kv: kv[0].key))
        self._counts = dict(self._items)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[SimpleTerm, int]]) -> "Bag":
        counts: dict = {}
        for t, n in pairs:
            counts[t] = counts.get(t, 0) + n
        return cls(counts)

    def __getitem__(self, t):
        return self._counts[t]

    def __iter__(self) -> Iterator[SimpleTerm]:
        return (t for t, _ in self._items)

    def __len__(self):
        return len(self._items)

    def count(self, t) -> int:
        return self._counts.get(t, 0)

    def pairs(self) -> tuple:
        return self._items

    @property
    def cardinality(self) -> int:
        return sum(n for _, n in self._items)

    def elements(self) -> list:
        """Items with repetition, in the bag's fixed order."""
        return [t for t, n in self._items for _ in range(n)]

    @cached_property
    def key(self) -> str:
        return _bag_key(self, {}, 0)

    @cached_property
    def size(self) -> int:
        return 1 + sum(n * t.size for t, n in self._items)

    @cached_property
    def fv(self) -> frozenset:
        return frozenset().union(*(t.fv for t, _ in self._items))

    def __eq__(self, other):
        if not isinstance(other, Bag):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __mul__(self, other: "Bag") -> "Bag":
        return bag_union(self, other)

    def __bool__(self):
        return bool(self._items)

    def __str__(self):
        return _p_bag(self)

    def __repr__(self):
        return f"Bag({_p_bag(self)})"


def _key(t, env, depth) -> str:
    if isinstance(t, RVar):
        level = env.get(t.name)
        return t.name if level is None else f"#{depth - level - 1}"
    if isinstance(t, RC0):
        return "c0"
    if isinstance(t, RAbs):
        inner = dict(env)
        inner[t.var] = depth
        return f"L({_key(t.body, inner, depth + 1)})"
    if isinstance(t, RApp):
        return f"A({_key(t.fun, env, depth)},{_bag_key(t.bag, env, depth)})"
    raise TypeError(f"not a simple resource term: {t!r}")


def _bag_key(bag, env, depth) -> str:
    entries = sorted(f"{_key(t, env, depth)}^{n}" for t, n in bag.pairs())
    return "{" + ";".join(entries) + "}"


def _free_vars(t) -> frozenset:
    if isinstance(t, RVar):
        return frozenset([t.name])
    if isinstance(t, RC0):
        return frozenset()
    if isinstance(t, RAbs):
        return t.body.fv - {t.var}
    if isinstance(t, RApp):
        return t.fun.fv | t.bag.fv
    raise TypeError(f"not a simple resource term: {t!r}")


def res_size(t) -> int:
    """Symbol count; an application costs one symbol and its bag one more."""
    if isinstance(t, Bag):
        return t.size
    if isinstance(t, (RVar, RC0)):
        return 1
    if isinstance(t, RAbs):
        return 1 + t.body.size
    if isinstance(t, RApp):
        return 1 + t.fun.size + t.bag.size
    raise TypeError(f"not a resource term: {t!r}")


def bag_union(a: Bag, b: Bag) -> Bag:
    counts = dict(a.pairs())
    for t, n in b.pairs():
        counts[t] = counts.get(t, 0) + n
    return Bag(counts)


def bag_splittings(bag: Bag) -> list[tuple[Bag, Bag]]:
    """All ordered pairs ``(B1, B2)`` with ``B1 * B2 == bag``, each once."""
    pairs = bag.pairs()
    out = []
    for ks in itertools.product(*(range(n + 1) for _, n in pairs)):
        left = Bag({t: k for (t, _), k in zip(pairs, ks)})
        right = Bag({t: n - k for (t, n), k in zip(pairs, ks)})
        out.append((left, right))
    return out


def degree(x: str, t) -> int:
    """Number of free occurrences of ``x`` in a simple term or a bag."""
    if isinstance(t, Bag):
        return sum(n * degree(x, u) for u, n in t.pairs())
    if isinstance(t, RVar):
        return 1 if t.name == x else 0
    if isinstance(t, RC0):
        return 0
    if isinstance(t, RAbs):
        return 0 if t.var == x else degree(x, t.body)
    if isinstance(t, RApp):
        return degree(x, t.fun) + degree(x, t.bag)
    raise TypeError(f"not a resource term: {t!r}")


def multiplicity_m(t) -> int:
    """Size of the automorphism group of ``t`` (the Taylor denominator)."""
    if isinstance(t, Bag):
        out = 1
        for u, n in t.pairs():
            out *= math.factorial(n) * multiplicity_m(u) ** n
        return out
    if isinstance(t, (RVar, RC0)):
        return 1
    if isinstance(t, RAbs):
        return multiplicity_m(t.body)
    if isinstance(t, RApp):
        return multiplicity_m(t.fun) * multiplicity_m(t.bag)
    raise TypeError(f"not a resource term: {t!r}")


def res_subst(t, mapping: Mapping[str, SimpleTerm]):
    """Capture-avoiding simultaneous (ordinary, non-linear) substitution."""
    if not mapping:
        return t
    if isinstance(t, Bag):
        return Bag.from_pairs((res_subst(u, mapping), n) for u, n in t.pairs())
    if isinstance(t, RVar):
        return mapping.get(t.name, t)
    if isinstance(t, RC0):
        return t
    if isinstance(t, RAbs):
        inner = {k: v for k, v in mapping.items() if k != t.var and k in t.body.fv}
        if not inner:
            return t
        incoming = frozenset().union(*(v.fv for v in inner.values()))
        var, body = t.var, t.body
        if var in incoming:
            new = fresh_name(var, incoming | body.fv | set(inner))
            body = res_subst(body, {var: RVar(new)})
            var = new
        return RAbs(var, res_subst(body, inner))
    if isinstance(t, RApp):
        return RApp(res_subst(t.fun, mapping), res_subst(t.bag, mapping))
    raise TypeError(f"not a resource term: {t!r}")


# --------------------------------------------------------------------------
# printing and parsing


def print_res(t) -> str:
    if isinstance(t, Bag):
        return _p_bag(t)
    if isinstance(t, RVar):
        return t.name
    if isinstance(t, RC0):
        return "c0"
    if isinstance(t, RAbs):
        return f"\\{t.var}.{print_res(t.body)}"
    if isinstance(t, RApp):
        return f"<{print_res(t.fun)}>{_p_bag(t.bag)}"
    raise TypeError(f"not a resource term: {t!r}")


def _p_bag(bag: Bag) -> str:
    items = []
    for u, n in bag.pairs():
        text = print_res(u)
        if n > 1:
            items.append(f"({text})^{n}" if isinstance(u, RAbs) else f"{text}^{n}")
        else:
            items.append(text)
    return "{" + ", ".join(items) + "}"


def parse_res(text: str) -> SimpleTerm:
    ts = TokenStream(text)
    t = _parse_term(ts)
    ts.expect_eof()
    return t


def parse_bag(text: str) -> Bag:
    ts = TokenStream(text)
    b = _parse_bag(ts)
    ts.expect_eof()
    return b


def _parse_term(ts: TokenStream) -> SimpleTerm:
    tok = ts.peek()
    if ts.at("\\"):
        ts.next()
        var = ts.expect_id()
        ts.expect(".")
        return RAbs(var, _parse_term(ts))
    if ts.at("<"):
        ts.next()
        fun = _parse_term(ts)
        ts.expect(">")
        if not ts.at("{"):
            ts.error("an application needs at least one bag")
        while ts.at("{"):
            fun = RApp(fun, _parse_bag(ts))
        return fun
    if ts.at("("):
        ts.next()
        t = _parse_term(ts)
        ts.expect(")")
        return t
    if tok.kind == "id":
        ts.next()
        return RC0() if tok.text == "c0" else RVar(tok.text)
    ts.error(f"unexpected {tok.text or 'end of input'!r}", tok)


def _parse_bag(ts: TokenStream) -> Bag:
    ts.expect("{")
    counts: dict = {}
    if not ts.at("}"):
        while True:
            item = _parse_term(ts)
            n = 1
            if ts.at("^"):
                ts.next()
                tok = ts.next()
                if tok.kind != "num" or int(tok.text) == 0:
                    ts.error("expected a positive multiplicity", tok)
                n = int(tok.text)
            counts[item] = counts.get(item, 0) + n
            if ts.at(","):
                ts.next()
                continue
            break
    ts.expect("}")
    return Bag(counts)
