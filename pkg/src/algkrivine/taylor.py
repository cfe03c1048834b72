"""Taylor coefficients of algebraic terms and the machine/Taylor cross-check.

The coefficient of a resource term ``t`` in the expansion of ``M`` is
``w(t, M) / m(t)``.  :func:`taylor_expand` computes the same expansion the
other way round, by expanding every application as
``sum_n 1/n! <P*> (Q*)^n`` over ordered argument sequences, and is kept as an
independent check of the weights.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

from ._lexer import fresh_name
from .combination import Combination, format_scalar
from .lambda_syntax import Abs, App, C0, Scale, Sum, Term, Var, Zero, print_alg, subst
from .qkam import QKAM
from .resource_reduction import coeff_c0, normal_form
from .resource_syntax import Bag, RAbs, RApp, RC0, RVar, SimpleTerm, multiplicity_m, print_res, res_subst
from .scalar import BOOL, NAT, RATIONAL, PolySemiring, Poly, Semiring


def _align_binders(t: RAbs, M: Abs) -> tuple[SimpleTerm, Term]:
    """Bodies of ``t`` and ``M`` with both binders renamed to one common name."""
    if t.var == M.var:
        return t.body, M.body
    x, mbody = M.var, M.body
    if x in t.fv:
        x = fresh_name(x, t.fv | M.fv)
        mbody = subst(mbody, M.var, Var(x))
    return res_subst(t.body, {t.var: RVar(x)}), mbody


def weight_w(t: SimpleTerm, M: Term, semiring: Semiring = RATIONAL):
    """Number of ways (weighted by scalars) to read ``t`` off ``M``."""
    S = semiring
    if isinstance(M, Scale):
        return S.mul(S.check(M.scalar), weight_w(t, M.body, S))
    if isinstance(M, Sum):
        return S.add(weight_w(t, M.left, S), weight_w(t, M.right, S))
    if isinstance(M, Zero):
        return S.zero
    if isinstance(t, RVar) and isinstance(M, Var):
        return S.one if t.name == M.name else S.zero
    if isinstance(t, RC0) and isinstance(M, C0):
        return S.one
    if isinstance(t, RAbs) and isinstance(M, Abs):
        tb, mb = _align_binders(t, M)
        return weight_w(tb, mb, S)
    if isinstance(t, RApp) and isinstance(M, App):
        out = weight_w(t.fun, M.fun, S)
        for u, n in t.bag.pairs():
            if S.is_zero(out):
                break
            out = S.mul(out, S.pow(weight_w(u, M.arg, S), n))
        return out
    return S.zero


def taylor_coeff(M: Term, t: SimpleTerm, semiring: Semiring = RATIONAL):
    return semiring.div_by_nat(weight_w(t, M, semiring), multiplicity_m(t))


# --------------------------------------------------------------------------
# bounded supports


def _bags(items: list, budget: int):
    """Multisets over ``items`` whose element sizes sum to at most ``budget``."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    k = 0
    while k * first.size <= budget:
        for tail in _bags(rest, budget - k * first.size):
            yield ((first, k),) + tail if k else tail
        k += 1


@lru_cache(maxsize=50_000)
def _candidates(M: Term, budget: int) -> frozenset:
    """Resource terms of size <= budget with the shape of some branch of ``M``."""
    if budget < 1:
        return frozenset()
    if isinstance(M, Var):
        return frozenset([RVar(M.name)])
    if isinstance(M, C0):
        return frozenset([RC0()])
    if isinstance(M, Zero):
        return frozenset()
    if isinstance(M, Scale):
        return _candidates(M.body, budget)
    if isinstance(M, Sum):
        return _candidates(M.left, budget) | _candidates(M.right, budget)
    if isinstance(M, Abs):
        return frozenset(RAbs(M.var, b) for b in _candidates(M.body, budget - 1))
    if isinstance(M, App):
        out = set()
        args = sorted(_candidates(M.arg, budget - 3), key=lambda u: u.key)
        for f in _candidates(M.fun, budget - 2):
            room = budget - 2 - f.size
            usable = [u for u in args if u.size <= room]
            for pairs in _bags(usable, room):
                out.add(RApp(f, Bag.from_pairs(pairs)))
        return frozenset(out)
    raise TypeError(f"not an algebraic term: {M!r}")


def taylor_support(M: Term, max_size: int, semiring: Semiring = RATIONAL) -> Combination:
    """Every ``t`` of size <= max_size with a non-zero Taylor coefficient in ``M``."""
    S = semiring
    return Combination(S, [(t, taylor_coeff(M, t, S)) for t in _candidates(M, max_size)])


def taylor_expand(M: Term, max_size: int, semiring: Semiring = RATIONAL) -> Combination:
    """Size-truncated expansion computed structurally, applications by width.

    Arguments are expanded as ordered sequences ``(u_1, ..., u_n)`` that are
    collapsed into bags afterwards, so the multiset coefficients are never
    written down explicitly.
    """
    S = semiring
    if max_size < 1:
        return Combination(S)
    if isinstance(M, Var):
        return Combination.unit(S, RVar(M.name))
    if isinstance(M, C0):
        return Combination.unit(S, RC0())
    if isinstance(M, Zero):
        return Combination(S)
    if isinstance(M, Scale):
        return taylor_expand(M.body, max_size, S).scale(S.check(M.scalar))
    if isinstance(M, Sum):
        return taylor_expand(M.left, max_size, S) + taylor_expand(M.right, max_size, S)
    if isinstance(M, Abs):
        return taylor_expand(M.body, max_size - 1, S).map_terms(lambda b: RAbs(M.var, b))
    if isinstance(M, App):
        fun = taylor_expand(M.fun, max_size - 2, S)
        arg = list(taylor_expand(M.arg, max_size - 3, S).items())
        out = []
        for f, cf in fun.items():
            room = max_size - 2 - f.size
            for n in itertools.count():
                if n > room:
                    break
                layer = []
                for seq in itertools.product(arg, repeat=n):
                    if sum(u.size for u, _ in seq) > room:
                        continue
                    coeff = S.prod(c for _, c in seq)
                    layer.append((RApp(f, Bag(u for u, _ in seq)), S.mul(cf, coeff)))
                for t, c in Combination(S, layer).items():
                    out.append((t, S.div_by_nat(c, math.factorial(n))))
        return Combination(S, out)
    raise TypeError(f"not an algebraic term: {M!r}")


# --------------------------------------------------------------------------
# the identity K(M)_t = M*_t . NF(t)_c0


@dataclass
class CoefficientReport:
    M: Term
    t: SimpleTerm
    lhs: Any
    taylor: Any
    nf_c0: Any
    rhs: Any
    semiring: Semiring

    @property
    def equal(self) -> bool:
        return self.semiring.eq(self.lhs, self.rhs)

    def to_json(self) -> dict:
        return {
            "M": print_alg(self.M),
            "t": print_res(self.t),
            "lhs": format_scalar(self.lhs),
            "taylor": format_scalar(self.taylor),
            "nf_c0": format_scalar(self.nf_c0),
            "rhs": format_scalar(self.rhs),
            "equal": self.equal,
        }


def verify_theorem(M: Term, t: SimpleTerm, semiring: Semiring = RATIONAL,
                   prune: bool = True, machine: QKAM | None = None) -> CoefficientReport:
    S = semiring
    machine = machine or QKAM(S, prune)
    lhs = machine.k_hat(M, t)
    taylor = taylor_coeff(M, t, S)
    nf_c0 = S.nat(coeff_c0(normal_form(t)))
    return CoefficientReport(M, t, lhs, taylor, nf_c0, S.mul(taylor, nf_c0), S)


# --------------------------------------------------------------------------
# random closed terms


def _default_scalars(semiring: Semiring) -> list:
    if isinstance(semiring, PolySemiring):
        return [Poly.var(v) for v in semiring.variables] or [semiring.nat(2)]
    if semiring is NAT:
        return [2, 3]
    if semiring is BOOL:
        return [True]
    return [Fraction(1, 2), Fraction(1, 3), Fraction(2)]


_BINDERS = ("x", "y", "z")
O = "o"
_ARG_TYPES = (O, (O, O))


def _gen(rng: random.Random, scope: tuple, budget: int, scalars: list) -> Term:
    """Untyped closed term: may get stuck or diverge, which is part of the point."""
    def leaf():
        if scope and rng.random() < 0.8:
            return Var(rng.choice(scope))
        return C0()

    if budget <= 1:
        return leaf()
    options = [("leaf", 1), ("abs", 3), ("scale", 1)]
    if budget >= 3:
        options += [("app", 2), ("sum", 2)]
    if budget >= 4:
        options += [("redex", 4)]
    kind = rng.choices([k for k, _ in options], weights=[w for _, w in options])[0]
    if kind == "leaf":
        return leaf()
    if kind == "abs":
        x = rng.choice(_BINDERS)
        return Abs(x, _gen(rng, scope + (x,), budget - 1, scalars))
    if kind == "scale":
        return Scale(rng.choice(scalars), _gen(rng, scope, budget - 1, scalars))
    if kind == "redex":
        x = rng.choice(_BINDERS)
        left = rng.randint(1, budget - 3)
        body = _gen(rng, scope + (x,), left, scalars)
        return App(Abs(x, body), _gen(rng, scope, budget - 2 - left, scalars))
    left = rng.randint(1, budget - 2)
    a = _gen(rng, scope, left, scalars)
    b = _gen(rng, scope, budget - 1 - left, scalars)
    return App(a, b) if kind == "app" else Sum(a, b)


def _min_size(ty) -> int:
    return 1 if ty == O else 1 + _min_size(ty[1])


def _gen_typed(rng: random.Random, ty, ctx: tuple, budget: int, scalars: list) -> Term:
    """Simply typed term over the base type ``o`` of c0; ``ctx`` is ((name, type), ...).

    Closed terms of type ``o`` head-reduce to (sums of multiples of) c0, so the
    machine and the Taylor side both have something non-trivial to agree on.
    """
    local = [x for x, t in ctx if t == ty]
    options = []
    if local or ty == O:
        options.append(("leaf", 2))
    if ty != O and budget >= _min_size(ty):
        options.append(("abs", 5))
    for a in _ARG_TYPES:
        if budget >= 1 + _min_size((a, ty)) + _min_size(a):
            options.append(("app", 3))
            break
    if budget >= 1 + 2 * _min_size(ty):
        options.append(("sum", 1))
    if budget >= 1 + _min_size(ty):
        options.append(("scale", 1))
    kind = rng.choices([k for k, _ in options], weights=[w for _, w in options])[0]
    if kind == "leaf":
        return Var(rng.choice(local)) if local and (ty != O or rng.random() < 0.7) else C0()
    if kind == "abs":
        x = rng.choice(_BINDERS)
        inner = tuple((n, t) for n, t in ctx if n != x) + ((x, ty[0]),)
        return Abs(x, _gen_typed(rng, ty[1], inner, budget - 1, scalars))
    if kind == "scale":
        return Scale(rng.choice(scalars), _gen_typed(rng, ty, ctx, budget - 1, scalars))
    if kind == "sum":
        left = rng.randint(_min_size(ty), budget - 1 - _min_size(ty))
        return Sum(_gen_typed(rng, ty, ctx, left, scalars),
                   _gen_typed(rng, ty, ctx, budget - 1 - left, scalars))
    a = rng.choice([a for a in _ARG_TYPES if budget >= 1 + _min_size((a, ty)) + _min_size(a)])
    fun_budget = rng.randint(_min_size((a, ty)), budget - 1 - _min_size(a))
    fun = _gen_typed(rng, (a, ty), ctx, fun_budget, scalars)
    return App(fun, _gen_typed(rng, a, ctx, budget - 1 - fun_budget, scalars))


def generate_corpus(seed: int, count: int, size_bound: int,
                    semiring: Semiring = RATIONAL, scalars: list | None = None,
                    untyped_share: float = 0.25) -> list[Term]:
    """Reproducible closed terms of size <= size_bound, each applied to c0.

    Most terms are simply typed (so they reduce to c0); a share of them is
    drawn without types to exercise stuck and diverging runs.
    """
    rng = random.Random(seed)
    scalars = scalars or _default_scalars(semiring)
    body_budget = max(size_bound - 2, 1)
    out = []
    for _ in range(count):
        budget = rng.randint(1, body_budget)
        if budget >= 2 and rng.random() >= untyped_share:
            body = _gen_typed(rng, (O, O), (), budget, scalars)
        else:
            body = _gen(rng, (), budget, scalars)
        out.append(App(body, C0()))
    return out
