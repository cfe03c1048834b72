import math
import random

import pytest
from hypothesis import given, settings

from algkrivine.combination import Combination
from algkrivine.resource_reduction import (DuplicateVariable, beta_step, coeff_c0, is_normal, linear_subst,
                                           linear_subst_naive, multi_subst, normal_form, rename_occurrences)
from algkrivine.resource_syntax import Bag, RApp, RC0, RVar, degree, parse_bag, parse_res
from algkrivine.scalar import NAT, RATIONAL, Poly, PolySemiring
from termgen import rand_res, res_terms

I = parse_res(r"\x.x")


def test_rename_occurrences():
    hat, names = rename_occurrences(parse_res("<x>{x}"), "x")
    assert len(names) == 2 and len(set(names)) == 2
    assert hat == parse_res(f"<{names[0]}>{{{names[1]}}}")
    assert rename_occurrences(parse_res("y"), "x") == (parse_res("y"), [])
    assert rename_occurrences(I, "x") == (I, [])


def test_rename_splits_bag_copies():
    hat, names = rename_occurrences(parse_res("<y>{x^3}"), "x")
    assert len(names) == 3
    assert all(degree(n, hat) == 1 for n in names)


def test_linear_subst_examples():
    assert linear_subst(parse_res("<x>{x}"), "x", Bag([I, I])) == Combination(NAT, [(parse_res(r"<\x.x>{\x.x}"), 2)])
    t = parse_res("<a>{b}")
    assert linear_subst(RVar("x"), "x", Bag([t])) == Combination(NAT, [(t, 1)])
    assert linear_subst(RVar("y"), "x", Bag([t])) == Combination(NAT)


def test_linear_subst_into_semiring():
    out = linear_subst(parse_res("<x>{x}"), "x", Bag([I, I]), RATIONAL)
    assert out.semiring is RATIONAL and out.coeff(parse_res(r"<\x.x>{\x.x}")) == 2


@pytest.mark.parametrize("seed", range(10))
def test_grouped_matches_naive_permutations(seed):
    rng = random.Random(seed)
    for n in range(7):
        pool = [RVar("a"), RVar("b"), RC0(), parse_res("<a>{b}")]
        bag = Bag([rng.choice(pool) for _ in range(n)])
        holes = [RVar("x")] * n + [RVar("y")] * rng.randint(0, 2)
        rng.shuffle(holes)
        s = RApp(RVar("f"), Bag(holes))
        assert linear_subst(s, "x", bag) == linear_subst_naive(s, "x", bag)
        total = sum(linear_subst_naive(s, "x", bag).values())
        assert total == (math.factorial(n) if degree("x", s) == n else 0)


def test_multi_subst():
    s = parse_res("<x>{y}")
    a, b = RVar("a"), RVar("b")
    expected = Combination(NAT, [(parse_res("<a>{b}"), 1)])
    assert multi_subst(s, [("x", Bag([a])), ("y", Bag([b]))]) == expected
    assert multi_subst(s, [("y", Bag([b])), ("x", Bag([a]))]) == expected
    assert multi_subst(s, []) == Combination(NAT, [(s, 1)])
    assert multi_subst(s, [("x", Bag([a])), ("y", Bag())]) == Combination(NAT)
    with pytest.raises(DuplicateVariable):
        multi_subst(s, [("x", Bag([a])), ("x", Bag())])


def test_beta_step_examples():
    assert beta_step(parse_res(r"<\x.x>{c0}")) == Combination(NAT, [(RC0(), 1)])
    step = beta_step(parse_res(r"<\x.<x>{}>{\x.\y.y}"))
    assert step == Combination(NAT, [(parse_res(r"<\x.\y.y>{}"), 1)])
    assert beta_step(RC0()) is None
    with pytest.raises(ValueError):
        beta_step(RC0(), "random")


def test_normal_form_examples():
    assert normal_form(parse_res(r"<<\x.<x>{x}>{(\x.x)^2}>{c0}")) == Combination(NAT, [(RC0(), 2)])
    assert normal_form(RC0()) == Combination(NAT, [(RC0(), 1)])
    assert normal_form(parse_res(r"<<\x.<x>{}>{\x.\y.y}>{c0}")) == Combination(NAT, [(RC0(), 1)])


def test_coeff_c0():
    assert coeff_c0(Combination(NAT, [(RC0(), 2)])) == 2
    assert coeff_c0(Combination(NAT, [(I, 1)])) == 0
    assert coeff_c0(Combination(NAT)) == 0


def test_normal_form_is_linear():
    P = PolySemiring(["p", "q"])
    p, q = Poly.var("p"), Poly.var("q")
    t1 = parse_res(r"<<\x.<x>{x}>{(\x.x)^2}>{c0}")
    t2 = parse_res(r"<\x.x>{c0}")
    c = Combination(P, [(t1, p), (t2, q)])
    assert normal_form(c) == Combination(P, [(RC0(), p.scale(2) + q)])


@settings(max_examples=300, deadline=None)
@given(res_terms(12))
def test_normal_forms_are_normal_and_idempotent(t):
    nf = normal_form(t)
    assert all(is_normal(u) for u in nf)
    assert normal_form(nf) == nf


@settings(max_examples=300, deadline=None)
@given(res_terms(12))
def test_strategies_agree(t):
    assert normal_form(t, "leftmost-outermost") == normal_form(t, "rightmost-innermost")


def test_strategies_agree_on_a_tricky_term():
    t = parse_res(r"<\x.<x>{<\y.y>{x}}>{<\z.z>{c0}, \w.w}")
    assert normal_form(t) == normal_form(t, "rightmost-innermost")
