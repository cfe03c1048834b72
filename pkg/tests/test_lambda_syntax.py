import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from algkrivine._lexer import ParseError
from algkrivine.combination import Combination
from algkrivine.lambda_syntax import (Abs, App, C0, CApp, Scale, Sum, Var, Zero, alpha_eq, canonicalize, embed,
                                      free_vars, parse_alg, print_alg, print_canonical, size, subst)
from algkrivine.scalar import RATIONAL, Poly, PolySemiring
from termgen import alg_terms, rand_alg, equality_instances

P = PolySemiring(["p", "q"])
I = Abs("x", Var("x"))
F = Abs("x", Abs("y", Var("y")))


def test_parse_first_example():
    t = parse_alg(r"((\x.(x)x) \x.x) c0")
    assert t == App(App(Abs("x", App(Var("x"), Var("x"))), I), C0())
    assert print_alg(t) == r"((\x.(x)x) \x.x) c0"


def test_parse_weighted_argument():
    t = parse_alg(r"(\x.(x)x) (p*\x.x + q*\x.\y.y)", P)
    assert t == App(Abs("x", App(Var("x"), Var("x"))), Sum(Scale(Poly.var("p"), I), Scale(Poly.var("q"), F)))


def test_small_parses():
    assert parse_alg("0") == Zero()
    assert parse_alg("c0") == C0()
    assert parse_alg("λx.x") == I
    assert parse_alg("(x) y z") == App(App(Var("x"), Var("y")), Var("z"))
    assert parse_alg("1/2*x") == Scale(Fraction(1, 2), Var("x"))
    assert parse_alg("(p + q)*x", P) == Scale(Poly.var("p") + Poly.var("q"), Var("x"))


def test_lambda_body_stops_at_plus():
    assert parse_alg(r"\x.x + y") == Sum(I, Var("y"))
    assert parse_alg(r"\x.(x + y)") == Abs("x", Sum(Var("x"), Var("y")))


def test_printing():
    assert print_alg(Zero()) == "0"
    assert print_alg(Scale(Fraction(1, 2), Var("x"))) == "1/2*x"
    assert print_alg(Scale(Poly.var("p") + Poly.var("q"), Var("x"))) == "(p + q)*x"


@pytest.mark.parametrize("text", ["(x", r"\c0.x", "x +", "1/2", "x )", "*x"])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as info:
        parse_alg(text)
    assert info.value.pos is not None


@settings(max_examples=400, deadline=None)
@given(alg_terms(10))
def test_print_parse_round_trip(t):
    assert alpha_eq(parse_alg(print_alg(t)), t)


def test_free_vars():
    assert free_vars(parse_alg(r"\x.(x)y")) == {"y"}
    assert free_vars(C0()) == frozenset()
    assert free_vars(parse_alg("1/2*x + y")) == {"x", "y"}


def test_alpha():
    assert alpha_eq(parse_alg(r"\x.x"), parse_alg(r"\y.y"))
    assert not alpha_eq(parse_alg(r"\x.\y.x"), parse_alg(r"\y.\x.x"))
    assert hash(parse_alg(r"\x.\y.(x)y")) == hash(parse_alg(r"\a.\b.(a)b"))


def test_subst():
    assert subst(parse_alg("(x)x"), "x", parse_alg(r"\z.z")) == parse_alg(r"(\z.z) \z.z")
    # capture is avoided by renaming the binder
    out = subst(parse_alg(r"\y.(x)y"), "x", Var("y"))
    assert isinstance(out, Abs) and out.var != "y"
    assert out.fv == {"y"}


def test_size():
    assert size(parse_alg(r"((\x.(x)x) \x.x) c0")) == 9
    assert size(parse_alg("1/2*x + 0")) == 4


def test_canonical_examples():
    c = canonicalize(parse_alg(r"(p*\x.x + q*\x.\y.y) z", P), P)
    assert c == Combination(P, [(CApp(I, canonicalize(Var("z"), P)), Poly.var("p")),
                                (CApp(F, canonicalize(Var("z"), P)), Poly.var("q"))])
    assert canonicalize(parse_alg(r"\x.0")) == Combination(RATIONAL)
    assert canonicalize(parse_alg("2*x + 3*x")) == Combination(RATIONAL, [(Var("x"), Fraction(5))])
    assert print_canonical(canonicalize(parse_alg("2*x + 3*x"))) == "5*x"


def test_argument_is_not_linear():
    lhs = canonicalize(parse_alg("(f)(x + y)"))
    rhs = canonicalize(parse_alg("(f)x + (f)y"))
    assert lhs != rhs
    assert len(lhs) == 1


@pytest.mark.parametrize("seed", range(8))
def test_equality_rules(seed):
    rng = random.Random(seed)
    for _ in range(15):
        for name, lhs, rhs in equality_instances(rng):
            assert canonicalize(lhs) == canonicalize(rhs), name


@settings(max_examples=300, deadline=None)
@given(alg_terms(10))
def test_canonicalize_is_idempotent(t):
    c = canonicalize(t)
    assert canonicalize(embed(c)) == c


def _contexts(rng, hole):
    x = rng.choice("xyz")
    other = rand_alg(rng, 3)
    return [Abs(x, hole), App(hole, other), App(other, hole), Sum(other, hole),
            Scale(Fraction(1, 2), hole), Abs(x, App(hole, hole))]


@pytest.mark.parametrize("seed", range(5))
def test_congruence(seed):
    rng = random.Random(seed)
    for _ in range(20):
        for _, lhs, rhs in equality_instances(rng):
            for ctx_l, ctx_r in zip(_contexts(random.Random(seed), lhs), _contexts(random.Random(seed), rhs)):
                assert canonicalize(ctx_l) == canonicalize(ctx_r)
