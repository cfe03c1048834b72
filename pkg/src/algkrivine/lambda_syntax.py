"""Algebraic lambda-terms: syntax, parsing, printing and canonical forms.

Terms compare and hash up to alpha-conversion: every node carries a cached
nameless key (de Bruijn indices for bound variables, names for free ones),
so they can be used directly as dictionary keys in a :class:`Combination`.

Concrete syntax (lowest precedence first)::

    M      := S ('+' S)*
    S      := lit '*' S | A
    A      := '\\' id '.' S | HEAD ARG*
    HEAD   := id | 'c0' | '0' | '(' M ')'
    ARG    := HEAD | '\\' id '.' S

``(M) N`` is Krivine-style application; a parenthesised group not followed by
an argument is plain grouping.  An abstraction body stops at ``+``, so
``p*\\x.x + q*\\y.y`` is a sum of two scaled abstractions and a summed body is
written ``\\x.(M + N)``.  Scalar literals are numbers (``3``, ``1/2``),
declared indeterminates (``p``, ``q^2``), ``true``/``false``, or any literal of
the active semiring wrapped in parentheses (``(1/2*p^2 + q)*M``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Mapping

from ._lexer import ParseError, TokenStream, fresh_name
from .combination import Combination, format_scalar
from .scalar import RATIONAL, Semiring

__all__ = [
    "Term", "Var", "C0", "Zero", "Abs", "App", "Scale", "Sum", "CApp",
    "ParseError", "parse_alg", "print_alg", "free_vars", "alpha_eq", "subst",
    "canonicalize", "embed", "print_canonical", "size",
]


class Term:
    """Base of all algebraic term nodes; equality is alpha-equivalence."""

    @cached_property
    def key(self) -> str:
        return _key(self, {}, 0)

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    @cached_property
    def fv(self) -> frozenset:
        return _free_vars(self)

    def __str__(self):
        return print_alg(self)


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str


@dataclass(frozen=True, eq=False)
class C0(Term):
    pass


@dataclass(frozen=True, eq=False)
class Zero(Term):
    pass


@dataclass(frozen=True, eq=False)
class Abs(Term):
    var: str
    body: Term


@dataclass(frozen=True, eq=False)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, eq=False)
class Scale(Term):
    scalar: Any
    body: Term


@dataclass(frozen=True, eq=False)
class Sum(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class CApp(Term):
    """Application node of a canonical base term; ``arg`` is a whole Combination."""

    fun: Term
    arg: Combination


def _key(t, env: dict, depth: int) -> str:
    if isinstance(t, Var):
        level = env.get(t.name)
        return t.name if level is None else f"#{depth - level - 1}"
    if isinstance(t, C0):
        return "c0"
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Abs):
        inner = dict(env)
        inner[t.var] = depth
        return f"L({_key(t.body, inner, depth + 1)})"
    if isinstance(t, App):
        return f"A({_key(t.fun, env, depth)},{_key(t.arg, env, depth)})"
    if isinstance(t, Scale):
        return f"S({format_scalar(t.scalar)},{_key(t.body, env, depth)})"
    if isinstance(t, Sum):
        return f"P({_key(t.left, env, depth)},{_key(t.right, env, depth)})"
    if isinstance(t, CApp):
        return f"A({_key(t.fun, env, depth)},{_canon_key(t.arg, env, depth)})"
    raise TypeError(f"not an algebraic term: {t!r}")


def _canon_key(c: Combination, env, depth) -> str:
    entries = sorted(f"{_key(b, env, depth)}:{format_scalar(a)}" for b, a in c.items())
    return "{" + ";".join(entries) + "}"


def _free_vars(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, (C0, Zero)):
        return frozenset()
    if isinstance(t, Abs):
        return t.body.fv - {t.var}
    if isinstance(t, (App, Sum)):
        a, b = (t.fun, t.arg) if isinstance(t, App) else (t.left, t.right)
        return a.fv | b.fv
    if isinstance(t, Scale):
        return t.body.fv
    if isinstance(t, CApp):
        out = set(t.fun.fv)
        for b in t.arg:
            out |= b.fv
        return frozenset(out)
    raise TypeError(f"not an algebraic term: {t!r}")


def free_vars(t: Term) -> frozenset:
    return t.fv


def alpha_eq(a: Term, b: Term) -> bool:
    return a.key == b.key


def size(t: Term) -> int:
    """Number of symbols: one per node."""
    if isinstance(t, (Var, C0, Zero)):
        return 1
    if isinstance(t, (Abs, Scale)):
        return 1 + size(t.body)
    if isinstance(t, App):
        return 1 + size(t.fun) + size(t.arg)
    if isinstance(t, Sum):
        return 1 + size(t.left) + size(t.right)
    raise TypeError(f"size is defined on raw algebraic terms, got {t!r}")


def subst(t: Term, x: str | Mapping[str, Term], u: Term | None = None) -> Term:
    """Capture-avoiding substitution ``t[u/x]``, or simultaneous with a mapping."""
    mapping = {x: u} if isinstance(x, str) else dict(x)
    return _subst(t, mapping)


def _subst(t, mapping):
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (C0, Zero)):
        return t
    if isinstance(t, Abs):
        inner = {k: v for k, v in mapping.items() if k != t.var}
        if not inner:
            return t
        incoming = set()
        for k, v in inner.items():
            if k in t.body.fv:
                incoming |= v.fv
        var, body = t.var, t.body
        if var in incoming:
            new = fresh_name(var, incoming | body.fv | set(inner))
            body = _subst(body, {var: Var(new)})
            var = new
        return Abs(var, _subst(body, inner))
    if isinstance(t, App):
        return App(_subst(t.fun, mapping), _subst(t.arg, mapping))
    if isinstance(t, Scale):
        return Scale(t.scalar, _subst(t.body, mapping))
    if isinstance(t, Sum):
        return Sum(_subst(t.left, mapping), _subst(t.right, mapping))
    raise TypeError(f"cannot substitute in {t!r}")


# --------------------------------------------------------------------------
# canonical forms


def canonicalize(t: Term, semiring: Semiring = RATIONAL) -> Combination:
    """Normal form modulo the algebraic equalities.

    The result maps base terms (``Var``, ``C0``, ``Abs`` over a base term and
    ``CApp`` whose argument is again canonical) to non-zero coefficients.
    Abstraction and the function position of an application are linear; the
    argument position is not, so it keeps a whole combination.
    """
    S = semiring
    if isinstance(t, (Var, C0)):
        return Combination.unit(S, t)
    if isinstance(t, Zero):
        return Combination(S)
    if isinstance(t, Scale):
        return canonicalize(t.body, S).scale(S.check(t.scalar))
    if isinstance(t, Sum):
        return canonicalize(t.left, S) + canonicalize(t.right, S)
    if isinstance(t, Abs):
        return canonicalize(t.body, S).map_terms(lambda b: Abs(t.var, b))
    if isinstance(t, App):
        arg = canonicalize(t.arg, S)
        return canonicalize(t.fun, S).map_terms(lambda b: CApp(b, arg))
    if isinstance(t, CApp):
        return Combination.unit(S, CApp(t.fun, t.arg))
    raise TypeError(f"not an algebraic term: {t!r}")


def embed(c: Combination) -> Term:
    """Rebuild a raw term from a canonical combination."""
    S = c.semiring
    parts = []
    for b, a in c.sorted_items(key=lambda b: b.key):
        raw = _embed_base(b)
        parts.append(raw if S.eq(a, S.one) else Scale(a, raw))
    if not parts:
        return Zero()
    out = parts[0]
    for p in parts[1:]:
        out = Sum(out, p)
    return out


def _embed_base(b):
    if isinstance(b, (Var, C0)):
        return b
    if isinstance(b, Abs):
        return Abs(b.var, _embed_base(b.body))
    if isinstance(b, CApp):
        return App(_embed_base(b.fun), embed(b.arg))
    raise TypeError(f"not a base term: {b!r}")


def print_canonical(c: Combination) -> str:
    return print_alg(embed(c))


# --------------------------------------------------------------------------
# printing


def print_alg(t: Term) -> str:
    if isinstance(t, CApp):
        t = _embed_base(t)
    return _p_sum(t)


def _p_sum(t):
    if isinstance(t, Sum):
        return f"{_p_sum(t.left)} + {_p_scaled(t.right)}"
    return _p_scaled(t)


def _p_scaled(t):
    if isinstance(t, Scale):
        return f"{_p_scalar(t.scalar)}*{_p_scaled(t.body)}"
    if isinstance(t, Sum):
        return f"({_p_sum(t)})"
    return _p_atom(t)


def _p_scalar(a):
    text = format_scalar(a)
    if any(ch in text for ch in " +*"):
        return f"({text})"
    return text


def _p_atom(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, C0):
        return "c0"
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Abs):
        return f"\\{t.var}.{_p_scaled(t.body)}"
    if isinstance(t, App):
        head = f"({_p_sum(t.fun)})"
        arg = t.arg
        if isinstance(arg, Var):
            return f"{head}{arg.name}"
        if isinstance(arg, (C0, Zero, Abs)):
            return f"{head} {_p_atom(arg)}"
        return f"{head} ({_p_sum(arg)})"
    if isinstance(t, (Scale, Sum)):
        return f"({_p_sum(t)})"
    raise TypeError(f"cannot print {t!r}")


# --------------------------------------------------------------------------
# parsing


def parse_alg(text: str, semiring: Semiring = RATIONAL) -> Term:
    p = _AlgParser(text, semiring)
    t = p.parse_sum()
    p.ts.expect_eof()
    return t


class _AlgParser:
    def __init__(self, text, semiring):
        self.ts = TokenStream(text)
        self.semiring = semiring

    def parse_sum(self):
        t = self.parse_scaled()
        while self.ts.at("+"):
            self.ts.next()
            t = Sum(t, self.parse_scaled())
        return t

    def parse_scaled(self):
        if self._scalar_ahead():
            lit = self.parse_literal()
            self.ts.expect("*")
            return Scale(lit, self.parse_scaled())
        return self.parse_atom()

    def _scalar_ahead(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "num":
            return not (tok.text == "0" and not (ts.at("*", 1) or ts.at("/", 1)))
        if tok.kind == "id" and tok.text != "c0":
            return ts.at("*", 1) or ts.at("^", 1)
        if ts.at("("):
            close = ts.matching_paren()
            return close > 0 and ts.at("*", close + 1)
        return False

    def parse_literal(self):
        ts = self.ts
        tok = ts.peek()
        if ts.at("("):
            close = ts.matching_paren()
            start = ts.peek(1).pos
            end = ts.peek(close).pos
            ts.i += close + 1
            return self._scalar(ts.text[start:end], tok)
        ts.next()
        text = tok.text
        if tok.kind == "num" and ts.at("/"):
            ts.next()
            den = ts.next()
            if den.kind != "num":
                ts.error("expected a denominator", den)
            text = f"{text}/{den.text}"
        elif tok.kind == "id" and ts.at("^"):
            ts.next()
            exp = ts.next()
            if exp.kind != "num":
                ts.error("expected an exponent", exp)
            text = f"{text}^{exp.text}"
        return self._scalar(text, tok)

    def _scalar(self, text, tok):
        try:
            return self.semiring.parse(text)
        except ValueError as exc:
            raise ParseError(f"bad scalar literal {text!r} ({exc})", tok.pos, self.ts.text) from None

    def parse_atom(self):
        ts = self.ts
        if ts.at("\\"):
            ts.next()
            var = ts.expect_id()
            ts.expect(".")
            return Abs(var, self.parse_scaled())
        t = self.parse_head()
        while self._arg_ahead():
            if ts.at("\\"):
                ts.next()
                var = ts.expect_id()
                ts.expect(".")
                t = App(t, Abs(var, self.parse_scaled()))
            else:
                t = App(t, self.parse_head())
        return t

    def _arg_ahead(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "id":
            return not (ts.at("*", 1) or ts.at("^", 1))
        if tok.kind == "num":
            return tok.text == "0" and not (ts.at("*", 1) or ts.at("/", 1))
        return ts.at("(") or ts.at("\\")

    def parse_head(self):
        ts = self.ts
        tok = ts.next()
        if tok.kind == "id":
            return C0() if tok.text == "c0" else Var(tok.text)
        if tok.kind == "num" and tok.text == "0":
            return Zero()
        if tok.kind == "sym" and tok.text == "(":
            t = self.parse_sum()
            ts.expect(")")
            return t
        ts.error(f"unexpected {tok.text or 'end of input'!r}", tok)
