import random
from fractions import Fraction

import pytest

from algkrivine.combination import Combination
from algkrivine.head_machine import EMPTY_ENV, AlgClosure, AlgState, NotClosed, run_K
from algkrivine.lambda_syntax import Scale, Sum, parse_alg
from algkrivine.qkam import (E0, EMPTY_CLOSURE, QKAM, PairedConfig, ResClosure, ResEnv, ResState, closure_concat,
                             coefficient, enumerate_support, env_concat, env_splittings, format_res_closure,
                             format_res_env, k_hat, trace_pair)
from algkrivine.resource_syntax import parse_bag, parse_res
from algkrivine.scalar import RATIONAL, Poly, PolySemiring
from algkrivine.taylor import generate_corpus, taylor_support
from trace_rows import EX1_M, EX1_T, expected_rows

P = PolySemiring(["p", "q"])
p, q = Poly.var("p"), Poly.var("q")
EX1 = parse_alg(EX1_M)
T1 = parse_res(EX1_T)
EX2 = parse_alg(r"(\x.(x)x) (p*\x.x + q*\x.\y.y) c0", P)
T_I = parse_res(r"<<\x.<x>{x}>{(\x.x)^2}>{c0}")
T_F = parse_res(r"<<\x.<x>{}>{\x.\y.y}>{c0}")
I_CL = ResClosure(parse_bag(r"{\x.x}"))


def test_concatenation():
    c = ResClosure(parse_bag("{c0}"), ResEnv.of({"y": I_CL}))
    assert closure_concat(EMPTY_CLOSURE, c) == c
    e = ResEnv.of({"x": I_CL})
    assert env_concat(e, e) == ResEnv.of({"x": ResClosure(parse_bag(r"{(\x.x)^2}"))})
    assert env_concat(e, E0) == e


def test_splitting_counts():
    e = ResEnv.of({"x": ResClosure(parse_bag(r"{(\x.x)^2}"))})
    assert len(env_splittings(e)) == 3
    assert env_splittings(E0) == ((E0, E0),)
    assert len(env_splittings(ResEnv.of({"x": I_CL, "y": I_CL}))) == 4


def test_splittings_reassemble():
    inner = ResEnv.of({"z": ResClosure(parse_bag("{c0, a}"))})
    e = ResEnv.of({"x": ResClosure(parse_bag(r"{(\x.x)^2}"), inner), "y": I_CL})
    for prune in (True, False):
        splits = env_splittings(e, prune)
        assert len(set(splits)) == len(splits)
        assert all(env_concat(a, b) == e for a, b in splits)
    assert len(env_splittings(e, False)) > len(env_splittings(e, True))


def test_k_hat_examples():
    assert k_hat(EX1, T1) == 1
    assert k_hat(EX2, T_I, P) == p * p
    assert k_hat(EX2, T_F, P) == q
    assert k_hat(EX2, parse_res("c0"), P) == P.zero
    with pytest.raises(NotClosed):
        k_hat(parse_alg("x"), parse_res("x"))


def test_coefficient_base_and_mismatch():
    base = PairedConfig(AlgClosure(parse_alg("c0")), (), ResClosure(parse_bag("{c0}")), ())
    assert coefficient(base) == 1
    mismatch = PairedConfig(AlgClosure(parse_alg("(m)n")), (), ResClosure(parse_bag("{x}")), ())
    assert coefficient(mismatch) == 0
    two = PairedConfig(AlgClosure(parse_alg("c0")), (), ResClosure(parse_bag("{c0^2}")), ())
    assert coefficient(two) == 0


def test_variable_rule_needs_empty_closures_elsewhere():
    a = AlgState(parse_alg("x"), EMPTY_ENV.extend("x", AlgClosure(parse_alg("c0"))))
    ok = ResState(parse_res("x"), ResEnv.of({"x": ResClosure(parse_bag("{c0}"))}))
    assert QKAM().coefficient(a, ok) == 1
    extra = ResState(parse_res("x"), ResEnv.of({"x": ResClosure(parse_bag("{c0}")), "y": I_CL}))
    assert QKAM().coefficient(a, extra) == 0
    stranded = ResState(parse_res("x"), ResEnv.of({"x": ResClosure(parse_bag("{c0}")),
                                                  "y": ResClosure(parse_bag("{}"), ResEnv.of({"z": I_CL}))}))
    assert QKAM().coefficient(a, stranded) == 0


def test_trace_rows_all_have_coefficient_one():
    for a, r in expected_rows():
        assert QKAM().coefficient(a, r) == 1


def test_trace_matches_rows():
    rows = trace_pair(EX1, T1)
    assert [(a, r) for a, r, _ in rows] == expected_rows()
    assert all(v == 1 for _, _, v in rows)
    assert len(trace_pair(parse_alg("c0"), parse_res("c0"))) == 1
    assert trace_pair(EX1, parse_res("c0")) == []


def test_rendering():
    assert format_res_env(E0) == "e0"
    assert format_res_closure(EMPTY_CLOSURE) == "1"
    assert format_res_env(ResEnv.of({"x": I_CL})) == r"{x -> ({\x.x}, e0)}"


def test_enumerate_examples():
    assert enumerate_support(EX1, 20) == Combination(RATIONAL, [(T1, Fraction(1))])
    assert enumerate_support(EX2, 20, P) == Combination(P, [(T_I, p * p), (T_F, q)])
    for bound in (1, 5):
        assert enumerate_support(parse_alg("c0"), bound) == Combination(RATIONAL, [(parse_res("c0"), Fraction(1))])


@pytest.mark.parametrize("M", generate_corpus(11, 25, 8), ids=str)
def test_enumeration_agrees_with_pointwise_coefficients(M):
    machine = QKAM()
    found = enumerate_support(M, 12)
    for t, c in found.items():
        assert machine.k_hat(M, t) == c
    # every annotation of size <= 12 with a non-zero entry was found
    for t in taylor_support(M, 12):
        if machine.k_hat(M, t) != 0:
            assert t in found


@pytest.mark.parametrize("M", generate_corpus(5, 25, 8), ids=str)
def test_enumeration_sums_to_machine_value(M):
    total = sum(enumerate_support(M, 30).values(), Fraction(0))
    if run_K(M, 40) == run_K(M, 60):
        assert total == run_K(M, 60)


@pytest.mark.parametrize("M", generate_corpus(13, 30, 8), ids=str)
def test_measure_decreases(M):
    machine = QKAM(check_measure=True, prune=False)
    for t in taylor_support(M, 12):
        machine.k_hat(M, t)


@pytest.mark.parametrize("M", generate_corpus(17, 30, 8), ids=str)
def test_pruning_is_conservative(M):
    pruned, full = QKAM(prune=True), QKAM(prune=False)
    for t in taylor_support(M, 12):
        assert pruned.k_hat(M, t) == full.k_hat(M, t)
    for (a, r), v in list(full.memo.items()):
        assert pruned.coefficient(a, r) == v


def test_linearity_in_the_algebraic_term():
    rng = random.Random(2)
    corpus = generate_corpus(2, 20, 8)
    for M, N in zip(corpus, corpus[1:]):
        a = rng.choice([Fraction(1, 3), Fraction(2)])
        for t in taylor_support(Sum(M, N), 10):
            assert k_hat(Scale(a, M), t) == a * k_hat(M, t)
            assert k_hat(Sum(M, N), t) == k_hat(M, t) + k_hat(N, t)
