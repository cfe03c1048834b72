import itertools
import math
import random

import pytest
from hypothesis import given, settings

from algkrivine._lexer import ParseError
from algkrivine.resource_syntax import (Bag, RAbs, RApp, RC0, RVar, bag_splittings, bag_union, degree,
                                        multiplicity_m, parse_bag, parse_res, print_res, res_subst)
from termgen import rand_res, res_terms

I = RAbs("x", RVar("x"))


def test_parse_annotation():
    t = parse_res(r"<<\x.<x>{x}>{(\x.x)^2}>{c0}")
    expected = RApp(RApp(RAbs("x", RApp(RVar("x"), Bag([RVar("x")]))), Bag([I, I])), Bag([RC0()]))
    assert t == expected
    assert print_res(t) == r"<<\x.<x>{x}>{(\x.x)^2}>{c0}"


def test_empty_bag_and_chains():
    assert parse_res("<x>{}") == RApp(RVar("x"), Bag())
    assert parse_res("<x>{y}{z}") == RApp(RApp(RVar("x"), Bag([RVar("y")])), Bag([RVar("z")]))


@pytest.mark.parametrize("text", ["<x>", "<x>{y", r"\x", "{x}", "<x>{y^0}"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_res(text)


@settings(max_examples=400, deadline=None)
@given(res_terms(14))
def test_round_trip(t):
    assert parse_res(print_res(t)) == t


def test_alpha_equivalent_bag_items_merge():
    b = parse_bag(r"{\x.x, \y.y}")
    assert b.count(I) == 2 and len(b) == 1


def test_degree():
    assert degree("x", parse_res("<x>{x,x}")) == 3
    assert degree("x", parse_res(r"\x.x")) == 0
    assert degree("x", parse_res("<y>{z^3}")) == 0
    assert degree("x", parse_bag("{x^2, <x>{x}}")) == 4


def test_size():
    assert parse_res("x").size == 1
    assert parse_res(r"<\z.z>{c0^2}").size == 6
    assert parse_res(r"<<\x.<x>{x}>{(\x.x)^2}>{c0}").size == 14


def test_multiplicity_examples():
    assert multiplicity_m(parse_res(r"<\x.x>{(<y>{z^3})^2}")) == 72
    assert multiplicity_m(parse_res("x")) == 1
    assert multiplicity_m(parse_res("<x>{x^2}")) == 2
    assert multiplicity_m(parse_res("c0")) == 1
    assert multiplicity_m(parse_res("<c0>{c0^3}")) == 6


def _occurrence_leaves(t, bound=()):
    """Rebuild ``t`` with every leaf renamed o0, o1, ... and return the labels."""
    labels = []

    def go(s, bound):
        if isinstance(s, (RVar, RC0)):
            if isinstance(s, RC0):
                label = ("c0",)
            else:
                owner = next((ident for name, ident in reversed(bound) if name == s.name), None)
                label = ("bound", owner) if owner is not None else ("free", s.name)
            labels.append(label)
            return RVar(f"o{len(labels) - 1}")
        if isinstance(s, RAbs):
            return RAbs(f"b{id(s)}", go(s.body, bound + ((s.var, id(s)),)))
        fun = go(s.fun, bound)
        return RApp(fun, Bag([go(u, bound) for u in s.bag.elements()]))

    return go(t, bound), labels


def brute_force_m(t):
    """Permutations of leaf occurrences (respecting what each leaf is) that fix t."""
    hat, labels = _occurrence_leaves(t)
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    classes = list(groups.values())
    count = 0
    for perms in itertools.product(*(itertools.permutations(c) for c in classes)):
        mapping = {}
        for cls, perm in zip(classes, perms):
            for a, b in zip(cls, perm):
                mapping[f"o{a}"] = RVar(f"o{b}")
        if res_subst(hat, mapping) == hat:
            count += 1
    return count


@pytest.mark.parametrize("seed", range(6))
def test_multiplicity_matches_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(80):
        t = rand_res(rng, 8, names=("x", "y"))
        assert multiplicity_m(t) == brute_force_m(t), print_res(t)


def test_brute_force_oracle_on_examples():
    assert brute_force_m(parse_res(r"<\x.x>{(<y>{z^3})^2}")) == 72
    assert brute_force_m(parse_res("<x>{x^2}")) == 2


def test_splitting_examples():
    assert len(bag_splittings(parse_bag(r"{(\x.x)^2}"))) == 3
    assert bag_splittings(Bag()) == [(Bag(), Bag())]
    assert len(bag_splittings(parse_bag("{a, b}"))) == 4


@settings(max_examples=200, deadline=None)
@given(res_terms(14), res_terms(14))
def test_splittings_and_union(s, t):
    for u in (s, t):
        if isinstance(u, RApp):
            bag = u.bag
            splits = bag_splittings(bag)
            assert len(splits) == math.prod(n + 1 for _, n in bag.pairs())
            assert len(set(splits)) == len(splits)
            assert all(bag_union(a, b) == bag for a, b in splits)
    a, b = Bag([s]), Bag([t, s])
    assert degree("x", bag_union(a, b)) == degree("x", a) + degree("x", b)


def test_capture_avoiding_substitution():
    out = res_subst(parse_res(r"\y.<x>{y}"), {"x": RVar("y")})
    assert isinstance(out, RAbs) and out.var != "y"
    assert out.fv == {"y"}
