"""Command-line interface: ``algkrivine <command> ...``.

Exit status is 0 on success, 1 when ``verify`` finds an unequal pair and 2 on
usage, parse or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

from ._lexer import ParseError
from .combination import Combination, format_scalar
from .head_machine import NotClosed, UnboundVariable, alg_state_json, format_alg_env, format_alg_stack, run_K_detailed
from .lambda_syntax import canonicalize, parse_alg, print_alg, print_canonical
from .qkam import QKAM, enumerate_support, format_res_env, format_res_stack, res_state_json, trace_pair
from .resource_reduction import STRATEGIES, normal_form
from .resource_syntax import multiplicity_m, parse_res, print_res
from .scalar import NotDivisible, SEMIRING_NAMES, ScalarSyntaxError, get_semiring
from .taylor import generate_corpus, taylor_coeff, taylor_support, verify_theorem, weight_w

EXIT_OK, EXIT_UNEQUAL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    semiring: str = "rational"
    vars: tuple = ("p", "q")
    fuel: int = 100
    max_size: int = 12
    seed: int = 42
    count: int = 50
    size_bound: int = 8
    t_size: int = 12
    jobs: int = 1
    format: str = "text"
    prune: bool = True
    strategy: str = "leftmost-outermost"

    def validate(self) -> "RunConfig":
        if self.semiring not in SEMIRING_NAMES:
            raise ConfigError(f"unknown semiring {self.semiring!r}")
        if self.fuel < 0:
            raise ConfigError("fuel must be >= 0")
        if self.max_size < 1 or self.t_size < 1:
            raise ConfigError("size bounds must be >= 1")
        if self.count < 0 or self.jobs < 1:
            raise ConfigError("count must be >= 0 and jobs >= 1")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        return self

    @property
    def S(self):
        return get_semiring(self.semiring, self.vars)


def _split_vars(text: str) -> tuple:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(data.get("vars"), str):
            data["vars"] = _split_vars(data["vars"])
        elif "vars" in data:
            data["vars"] = tuple(data["vars"])
        cfg = replace(cfg, **data)
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = _split_vars(value) if f.name == "vars" else value
    if getattr(args, "no_prune", False):
        overrides["prune"] = False
    return replace(cfg, **overrides).validate()


# --------------------------------------------------------------------------
# output helpers


def res_combination_text(c: Combination) -> str:
    S = c.semiring
    if not c:
        return "0"
    parts = []
    for t, a in c.sorted_items(key=print_res):
        text = print_res(t)
        parts.append(text if S.eq(a, S.one) else f"{_scalar_text(a)}*{text}")
    return " + ".join(parts)


def _scalar_text(a) -> str:
    s = format_scalar(a)
    return f"({s})" if any(ch in s for ch in " +*") else s


def support_json(c: Combination) -> list:
    return [{"term": print_res(t), "coefficient": format_scalar(a)} for t, a in c.sorted_items(key=print_res)]


def _emit(cfg: RunConfig, text: str, data) -> None:
    if cfg.format == "json":
        print(json.dumps(data))
    else:
        print(text)


# --------------------------------------------------------------------------
# commands


def cmd_canon(args, cfg):
    c = canonicalize(parse_alg(args.term, cfg.S), cfg.S)
    out = print_canonical(c)
    _emit(cfg, out, {"canonical": out})


def cmd_khead(args, cfg):
    run = run_K_detailed(parse_alg(args.term, cfg.S), cfg.fuel, cfg.S)
    value = format_scalar(run.value)
    note = "stable" if run.stable else "still changing"
    _emit(cfg, f"{value}\n# fuel {cfg.fuel}: {note}, last change at n={run.last_change}",
          {"value": value, "fuel": cfg.fuel, "stable": run.stable, "last_change": run.last_change,
           "approximants": [format_scalar(a) for a in run.approximants]})


def cmd_nf(args, cfg):
    c = normal_form(parse_res(args.term), cfg.strategy).with_semiring(cfg.S)
    _emit(cfg, res_combination_text(c), support_json(c))


def cmd_m(args, cfg):
    m = multiplicity_m(parse_res(args.term))
    _emit(cfg, str(m), {"m": m})


def cmd_w(args, cfg):
    w = weight_w(parse_res(args.t), parse_alg(args.M, cfg.S), cfg.S)
    _emit(cfg, format_scalar(w), {"w": format_scalar(w)})


def cmd_coeff(args, cfg):
    value = QKAM(cfg.S, cfg.prune).k_hat(parse_alg(args.M, cfg.S), parse_res(args.t))
    _emit(cfg, format_scalar(value), {"coefficient": format_scalar(value)})


def cmd_taylor(args, cfg):
    M = parse_alg(args.M, cfg.S)
    if args.t is not None:
        value = taylor_coeff(M, parse_res(args.t), cfg.S)
        _emit(cfg, format_scalar(value), {"coefficient": format_scalar(value)})
        return
    c = taylor_support(M, cfg.max_size, cfg.S)
    _emit(cfg, _support_text(c), support_json(c))


def _support_text(c: Combination) -> str:
    return "\n".join(f"{format_scalar(a)}\t{print_res(t)}" for t, a in c.sorted_items(key=print_res))


def cmd_enumerate(args, cfg):
    c = enumerate_support(parse_alg(args.term, cfg.S), cfg.max_size, cfg.S)
    _emit(cfg, _support_text(c), support_json(c))


def cmd_trace(args, cfg):
    rows = trace_pair(parse_alg(args.M, cfg.S), parse_res(args.t), cfg.S, cfg.prune)
    if cfg.format == "json":
        print(json.dumps([{"alg": alg_state_json(a), "res": res_state_json(r), "coefficient": format_scalar(v)}
                          for a, r, v in rows]))
        return
    for i, (a, r, v) in enumerate(rows, 1):
        print(f"{i}. {print_alg(a.term)} | {format_alg_env(a.env)} | {format_alg_stack(a.stack)}"
              f"  ||  {print_res(r.term)} | {format_res_env(r.env)} | {format_res_stack(r.stack)}"
              f"  :: {format_scalar(v)}")


def _verify_one(job):
    """Worker: check every support element of one corpus term."""
    M_text, semiring, variables, t_size, prune = job
    S = get_semiring(semiring, variables)
    M = parse_alg(M_text, S)
    machine = QKAM(S, prune)
    return [verify_theorem(M, t, S, machine=machine).to_json() for t in taylor_support(M, t_size, S)]


def cmd_verify(args, cfg):
    S = cfg.S
    if args.M is not None:
        if args.t is None:
            raise ConfigError("verify with a term also needs an annotation")
        reports = [verify_theorem(parse_alg(args.M, S), parse_res(args.t), S, cfg.prune).to_json()]
    else:
        corpus = generate_corpus(cfg.seed, cfg.count, cfg.size_bound, S)
        jobs = [(print_alg(M), cfg.semiring, cfg.vars, cfg.t_size, cfg.prune) for M in corpus]
        start = time.perf_counter()
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                batches = list(pool.map(_verify_one, jobs))
        else:
            batches = [_verify_one(j) for j in jobs]
        reports = [r for batch in batches for r in batch]
        elapsed = time.perf_counter() - start
    bad = [r for r in reports if not r["equal"]]
    if cfg.format == "json":
        for r in reports:
            print(json.dumps(r))
    else:
        for r in reports:
            mark = "ok " if r["equal"] else "BAD"
            print(f"{mark} {r['M']}  |  {r['t']}  lhs={r['lhs']} taylor={r['taylor']} "
                  f"nf_c0={r['nf_c0']} rhs={r['rhs']}")
        summary = f"{len(reports)} pairs, {len(bad)} unequal"
        if args.M is None:
            summary += f" ({cfg.count} terms, seed {cfg.seed}, {elapsed:.2f}s)"
        print(summary)
    return EXIT_UNEQUAL if bad else EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--format", choices=["text", "json"])
    p.add_argument("--semiring", choices=SEMIRING_NAMES)
    p.add_argument("--vars", help="comma separated indeterminates for the poly semiring")
    p.add_argument("--no-prune", action="store_true", help="disable splitting pruning in the quantitative machine")
    p.add_argument("--config", help="JSON file with default options")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="algkrivine", parents=[common],
                                     description="Algebraic Krivine machines and Taylor expansion.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, *positionals):
        p = sub.add_parser(name, parents=[common], help=help_text, argument_default=argparse.SUPPRESS)
        for pos in positionals:
            p.add_argument(pos)
        p.set_defaults(func=fn)
        return p

    add("canon", cmd_canon, "canonical form of an algebraic term", "term")
    add("khead", cmd_khead, "run the algebraic head machine with fuel", "term").add_argument("--fuel", type=int)
    add("nf", cmd_nf, "normal form of a resource term", "term").add_argument("--strategy", choices=STRATEGIES)
    add("m", cmd_m, "multiplicity m(t) of a resource term", "term")
    add("w", cmd_w, "weight w(t, M)", "t", "M")
    add("coeff", cmd_coeff, "quantitative machine coefficient K(M)_t", "M", "t")
    p = add("taylor", cmd_taylor, "Taylor coefficient of t in M, or the bounded Taylor support", "M")
    p.add_argument("t", nargs="?", default=None)
    p.add_argument("--max-size", type=int)
    add("enumerate", cmd_enumerate, "non-zero entries of K(M) up to a size bound", "term").add_argument(
        "--max-size", type=int)
    p = add("verify", cmd_verify, "check K(M)_t = M*_t NF(t)_c0 on a random corpus or one pair")
    p.add_argument("M", nargs="?", default=None)
    p.add_argument("t", nargs="?", default=None)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--size-bound", type=int)
    p.add_argument("--t-size", type=int, help="size bound for annotations taken from the Taylor support")
    p.add_argument("--jobs", type=int)
    add("trace", cmd_trace, "paired trace of the quantitative machine", "M", "t")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        status = args.func(args, cfg)
    except (ParseError, ScalarSyntaxError, ConfigError, NotClosed, UnboundVariable, NotDivisible, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return status or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
