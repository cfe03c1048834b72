"""Commutative semirings used as coefficient domains.

Every coefficient in the package lives in one :class:`Semiring` instance.
Values are plain immutable Python objects (``int``, ``Fraction``, ``bool`` or
:class:`Poly`); the instance supplies the arithmetic, so code that is generic
over the coefficient domain always goes through it.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Mapping


class SemiringMismatch(TypeError):
    """A value does not belong to the semiring it was handed to."""


class NotDivisible(ArithmeticError):
    """``div_by_nat`` has no solution in the active semiring."""


class ScalarSyntaxError(ValueError):
    pass


class Semiring:
    name = "abstract"
    zero: Any = None
    one: Any = None

    def check(self, a):
        if not self.contains(a):
            raise SemiringMismatch(f"{a!r} is not an element of the {self.name} semiring")
        return a

    def contains(self, a) -> bool:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.check(a) == self.check(b)

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero)

    def nat(self, n: int):
        """Image of the natural number ``n`` (the unique homomorphism from N)."""
        raise NotImplementedError

    def div_by_nat(self, a, n: int):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(self.check(a))

    def sum(self, xs: Iterable):
        return reduce(self.add, xs, self.zero)

    def prod(self, xs: Iterable):
        return reduce(self.mul, xs, self.one)

    def pow(self, a, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def __repr__(self):
        return f"<{self.name} semiring>"

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self), self.name))


def _check_divisor(n):
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"divisor must be a positive integer, got {n!r}")


class NatSemiring(Semiring):
    name = "nat"
    zero = 0
    one = 1

    def contains(self, a):
        return type(a) is int and a >= 0

    def add(self, a, b):
        return self.check(a) + self.check(b)

    def mul(self, a, b):
        return self.check(a) * self.check(b)

    def nat(self, n):
        return int(n)

    def div_by_nat(self, a, n):
        _check_divisor(n)
        q, r = divmod(self.check(a), n)
        if r:
            raise NotDivisible(f"{a} is not divisible by {n} in N")
        return q

    def parse(self, text):
        text = text.strip()
        if not re.fullmatch(r"\d+", text):
            raise ScalarSyntaxError(f"not a natural number: {text!r}")
        return int(text)


class RationalSemiring(Semiring):
    """Exact non-negative rationals."""

    name = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def contains(self, a):
        return isinstance(a, Fraction) and a.numerator >= 0

    def add(self, a, b):
        return self.check(a) + self.check(b)

    def mul(self, a, b):
        return self.check(a) * self.check(b)

    def is_zero(self, a):
        return self.check(a).numerator == 0

    def nat(self, n):
        return Fraction(n)

    def div_by_nat(self, a, n):
        _check_divisor(n)
        return self.check(a) / n

    def parse(self, text):
        text = text.strip()
        m = re.fullmatch(r"(\d+)\s*(?:/\s*(\d+))?", text)
        if not m:
            raise ScalarSyntaxError(f"not a non-negative rational: {text!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ScalarSyntaxError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)


class BoolSemiring(Semiring):
    """The boolean semiring (or, and); only useful for reachability."""

    name = "bool"
    zero = False
    one = True

    def contains(self, a):
        return type(a) is bool

    def add(self, a, b):
        return self.check(a) or self.check(b)

    def mul(self, a, b):
        return self.check(a) and self.check(b)

    def nat(self, n):
        return n > 0

    def div_by_nat(self, a, n):
        # n embeds as true and true*a = a, so a itself is the quotient.
        _check_divisor(n)
        return self.check(a)

    def parse(self, text):
        text = text.strip()
        if text not in ("true", "false"):
            raise ScalarSyntaxError(f"not a boolean: {text!r}")
        return text == "true"

    def format(self, a):
        return "true" if self.check(a) else "false"


class Poly:
    """Multivariate polynomial with non-negative rational coefficients.

    Stored as a map from monomials to coefficients; a monomial is a sorted
    tuple of ``(variable, exponent)`` pairs, the empty tuple being the
    constant monomial.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Fraction] = ()):
        clean = {}
        for mono, c in dict(terms).items():
            c = Fraction(c)
            if c < 0:
                raise ValueError("polynomial coefficients must be non-negative")
            if c:
                clean[tuple(sorted(mono))] = clean.get(tuple(sorted(mono)), Fraction(0)) + c
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        return cls({((name, exp),) if exp else (): Fraction(1)})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Poly(out)

    def scale(self, c) -> "Poly":
        return Poly({m: v * c for m, v in self.terms.items()})

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in mono:
                term *= Fraction(values[v]) ** e
            total += term
        return total

    def variables(self) -> set:
        return {v for mono in self.terms for v, _ in mono}

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_mono_order):
            c = self.terms[mono]
            factors = [f"{v}^{e}" if e > 1 else v for v, e in mono]
            if c != 1 or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _mono_mul(m1, m2):
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _mono_order(mono):
    # higher total degree first, then lexicographic on variables
    return (-sum(e for _, e in mono), mono)


class PolySemiring(Semiring):
    name = "poly"

    def __init__(self, variables: Iterable[str] = ("p", "q")):
        self.variables = tuple(variables)
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v) or v in ("c0", "true", "false"):
                raise ValueError(f"invalid indeterminate name {v!r}")
        self.zero = Poly()
        self.one = Poly.const(1)

    def contains(self, a):
        return isinstance(a, Poly) and a.variables() <= set(self.variables)

    def add(self, a, b):
        return self.check(a) + self.check(b)

    def mul(self, a, b):
        return self.check(a) * self.check(b)

    def nat(self, n):
        return Poly.const(n)

    def div_by_nat(self, a, n):
        _check_divisor(n)
        return self.check(a).scale(Fraction(1, n))

    def parse(self, text):
        text = text.strip()
        if not text:
            raise ScalarSyntaxError("empty polynomial literal")
        total = Poly()
        for summand in text.split("+"):
            factors = summand.split("*")
            term = Poly.const(1)
            for f in factors:
                term = term * self._parse_factor(f.strip(), text)
            total = total + term
        return total

    def _parse_factor(self, f, whole):
        m = re.fullmatch(r"(\d+)\s*(?:/\s*(\d+))?", f)
        if m:
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                raise ScalarSyntaxError(f"zero denominator in {whole!r}")
            return Poly.const(Fraction(int(m.group(1)), den))
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*(?:\^\s*(\d+))?", f)
        if m and m.group(1) in self.variables:
            return Poly.var(m.group(1), int(m.group(2) or 1))
        if m:
            raise ScalarSyntaxError(
                f"undeclared indeterminate {m.group(1)!r} (declared: {', '.join(self.variables) or 'none'})")
        raise ScalarSyntaxError(f"bad polynomial factor {f!r} in {whole!r}")

    def __hash__(self):
        return hash((PolySemiring, self.variables))


NAT = NatSemiring()
RATIONAL = RationalSemiring()
BOOL = BoolSemiring()

SEMIRING_NAMES = ("nat", "rational", "bool", "poly")


def get_semiring(name: str, variables: Iterable[str] = ("p", "q")) -> Semiring:
    if name == "nat":
        return NAT
    if name == "rational":
        return RATIONAL
    if name == "bool":
        return BOOL
    if name == "poly":
        return PolySemiring(variables)
    raise ValueError(f"unknown semiring {name!r}; choose from {', '.join(SEMIRING_NAMES)}")
