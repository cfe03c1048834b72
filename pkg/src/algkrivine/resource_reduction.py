"""Linear substitution, beta-reduction and normal forms of resource terms.

Reduction is computed over the naturals and only embedded into another
semiring at the end (``normal_form`` scales by the input coefficients).
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterator, Sequence

from ._lexer import fresh_name
from .combination import Combination
from .resource_syntax import Bag, RAbs, RApp, RC0, RVar, SimpleTerm, degree, res_subst
from .scalar import NAT, Semiring

STRATEGIES = ("leftmost-outermost", "rightmost-innermost")


class DuplicateVariable(ValueError):
    pass


def rename_occurrences(s: SimpleTerm, x: str) -> tuple[SimpleTerm, list[str]]:
    """Give each free occurrence of ``x`` its own fresh name.

    Occurrences are numbered leftmost-outermost: the function part of an
    application before its bag, bag items in the bag's order, one copy at a
    time.
    """
    avoid = set(s.fv) | _all_binders(s)
    names: list[str] = []

    def go(t):
        if isinstance(t, RVar):
            if t.name != x:
                return t
            name = fresh_name(x, avoid)
            avoid.add(name)
            names.append(name)
            return RVar(name)
        if isinstance(t, RC0):
            return t
        if isinstance(t, RAbs):
            return t if t.var == x else RAbs(t.var, go(t.body))
        if isinstance(t, RApp):
            fun = go(t.fun)
            pairs = []
            for u, n in t.bag.pairs():
                if x in u.fv:
                    pairs.extend((go(u), 1) for _ in range(n))
                else:
                    pairs.append((u, n))
            return RApp(fun, Bag.from_pairs(pairs))
        raise TypeError(f"not a simple resource term: {t!r}")

    return go(s), names


def _all_binders(t) -> set:
    if isinstance(t, RAbs):
        return {t.var} | _all_binders(t.body)
    if isinstance(t, RApp):
        out = _all_binders(t.fun)
        for u in t.bag:
            out |= _all_binders(u)
        return out
    return set()


def _multiset_permutations(pairs: Sequence[tuple[SimpleTerm, int]]) -> Iterator[tuple]:
    """Distinct orderings of a multiset given as ``(item, count)`` pairs."""
    counts = [n for _, n in pairs]
    total = sum(counts)
    out: list = []

    def rec():
        if len(out) == total:
            yield tuple(out)
            return
        for i, (item, _) in enumerate(pairs):
            if counts[i]:
                counts[i] -= 1
                out.append(item)
                yield from rec()
                out.pop()
                counts[i] += 1

    yield from rec()


def linear_subst(s: SimpleTerm, x: str, bag: Bag, semiring: Semiring = NAT) -> Combination:
    """Sum over all bijections between the occurrences of ``x`` and the bag.

    Equal bag elements are grouped: each distinct assignment stands for
    ``prod(bag(u)!)`` permutations.
    """
    n = degree(x, s)
    if n != bag.cardinality:
        return Combination(semiring)
    hat, names = rename_occurrences(s, x)
    weight = math.prod(math.factorial(k) for _, k in bag.pairs())
    acc: dict = {}
    for assignment in _multiset_permutations(bag.pairs()):
        u = res_subst(hat, dict(zip(names, assignment)))
        acc[u] = acc.get(u, 0) + weight
    return Combination(NAT, acc.items()).with_semiring(semiring)


def linear_subst_naive(s: SimpleTerm, x: str, bag: Bag) -> Combination:
    """Literal n!-permutation version of :func:`linear_subst` (test oracle)."""
    elems = bag.elements()
    if degree(x, s) != len(elems):
        return Combination(NAT)
    hat, names = rename_occurrences(s, x)
    acc: dict = {}
    for perm in itertools.permutations(range(len(elems))):
        u = res_subst(hat, {names[i]: elems[perm[i]] for i in range(len(elems))})
        acc[u] = acc.get(u, 0) + 1
    return Combination(NAT, acc.items())


def multi_subst(s: SimpleTerm, subs: Sequence[tuple[str, Bag]], semiring: Semiring = NAT) -> Combination:
    names = [x for x, _ in subs]
    if len(set(names)) != len(names):
        raise DuplicateVariable(f"repeated variable in {names}")
    result = Combination(NAT, [(s, 1)])
    for x, bag in subs:
        result = result.bind(lambda t, x=x, bag=bag: linear_subst(t, x, bag))
    return result.with_semiring(semiring)


# --------------------------------------------------------------------------
# reduction


def _replace_one(bag: Bag, old: SimpleTerm, new: SimpleTerm) -> Bag:
    pairs = [(u, n - 1 if u == old else n) for u, n in bag.pairs()]
    pairs.append((new, 1))
    return Bag.from_pairs(pairs)


def _step(t: SimpleTerm, innermost: bool) -> Combination | None:
    if isinstance(t, RAbs):
        r = _step(t.body, innermost)
        return None if r is None else r.map_terms(lambda b: RAbs(t.var, b))
    if not isinstance(t, RApp):
        return None
    root = isinstance(t.fun, RAbs)
    if root and not innermost:
        return linear_subst(t.fun.body, t.fun.var, t.bag)
    items = list(t.bag)
    if innermost:
        items.reverse()
        for u in items:
            r = _step(u, innermost)
            if r is not None:
                return r.map_terms(lambda v, u=u: RApp(t.fun, _replace_one(t.bag, u, v)))
    r = _step(t.fun, innermost)
    if r is not None:
        return r.map_terms(lambda f: RApp(f, t.bag))
    if innermost:
        return linear_subst(t.fun.body, t.fun.var, t.bag) if root else None
    for u in items:
        r = _step(u, innermost)
        if r is not None:
            return r.map_terms(lambda v, u=u: RApp(t.fun, _replace_one(t.bag, u, v)))
    return None


def beta_step(t: SimpleTerm, strategy: str = "leftmost-outermost") -> Combination | None:
    """One reduction step, or ``None`` when ``t`` is normal."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return _step(t, strategy == "rightmost-innermost")


def is_normal(t: SimpleTerm) -> bool:
    return _step(t, False) is None


@lru_cache(maxsize=200_000)
def _nf(t: SimpleTerm, strategy: str) -> Combination:
    r = beta_step(t, strategy)
    if r is None:
        return Combination(NAT, [(t, 1)])
    return r.bind(lambda u: _nf(u, strategy))


def normal_form(c: Combination | SimpleTerm, strategy: str = "leftmost-outermost") -> Combination:
    """NF, extended linearly; coefficients stay in the input's semiring."""
    if isinstance(c, SimpleTerm):
        return _nf(c, strategy)
    S = c.semiring
    return c.bind(lambda t: _nf(t, strategy).with_semiring(S))


def coeff_c0(c: Combination):
    return c.coeff(RC0())
