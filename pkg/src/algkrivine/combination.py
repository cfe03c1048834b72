"""Finite formal sums of hashable terms with coefficients in a semiring."""

from __future__ import annotations

from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

from .scalar import Semiring


def format_scalar(a) -> str:
    if isinstance(a, bool):
        return "true" if a else "false"
    return str(a)


class Combination(Mapping):
    """An immutable map ``term -> coefficient`` with no zero coefficients.

    Equal keys are merged on construction, so terms whose ``__eq__`` is
    alpha-equivalence collapse automatically.
    """

    __slots__ = ("semiring", "_items", "_hash")

    def __init__(self, semiring: Semiring, items: Iterable[tuple[Hashable, Any]] | Mapping = ()):
        self.semiring = semiring
        if isinstance(items, Mapping):
            items = items.items()
        acc: dict = {}
        for term, c in items:
            if term in acc:
                acc[term] = semiring.add(acc[term], c)
            else:
                acc[term] = semiring.check(c)
        self._items = {t: c for t, c in acc.items() if not semiring.is_zero(c)}
        self._hash = None

    @classmethod
    def unit(cls, semiring: Semiring, term) -> "Combination":
        return cls(semiring, [(term, semiring.one)])

    def __getitem__(self, term):
        return self._items[term]

    def __iter__(self) -> Iterator:
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def coeff(self, term):
        return self._items.get(term, self.semiring.zero)

    def __add__(self, other: "Combination") -> "Combination":
        return Combination(self.semiring, list(self._items.items()) + list(other._items.items()))

    def scale(self, a) -> "Combination":
        S = self.semiring
        return Combination(S, [(t, S.mul(a, c)) for t, c in self._items.items()])

    def map_terms(self, fn: Callable) -> "Combination":
        """Apply ``fn`` to every term, merging any collisions."""
        return Combination(self.semiring, [(fn(t), c) for t, c in self._items.items()])

    def bind(self, fn: Callable[[Any], "Combination"]) -> "Combination":
        """Linear extension of ``fn: term -> Combination``."""
        S = self.semiring
        out = []
        for t, c in self._items.items():
            for u, d in fn(t).items():
                out.append((u, S.mul(c, d)))
        return Combination(S, out)

    def with_semiring(self, target: Semiring) -> "Combination":
        """Re-embed natural-number coefficients into ``target``."""
        return Combination(target, [(t, target.nat(c)) for t, c in self._items.items()])

    @staticmethod
    def sum(semiring: Semiring, combos: Iterable["Combination"]) -> "Combination":
        out = []
        for c in combos:
            out.extend(c.items())
        return Combination(semiring, out)

    def __eq__(self, other):
        if not isinstance(other, Combination):
            return NotImplemented
        if self._items.keys() != other._items.keys():
            return False
        return all(self.semiring.eq(c, other._items[t]) for t, c in self._items.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def sorted_items(self, key=str) -> list:
        return sorted(self._items.items(), key=lambda kv: key(kv[0]))

    def __repr__(self):
        body = ", ".join(f"{format_scalar(c)}: {t}" for t, c in self.sorted_items())
        return f"Combination({{{body}}})"
