"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 budget exceeded,
4 mathematical precondition violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import geom, sieve, taylor
from .errors import BudgetExceeded, ConfigError, PreconditionError, TaylorSieveError
from .gf import field_create, format_element
from .mpoly import format_poly

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_PRECONDITION = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    scheme_path: str | None = None
    condition_path: str | None = None
    d_range: list = field(default_factory=list)
    s: int | None = None
    e: int | None = None
    E: int | None = None
    mode: str | None = None
    trials: int | None = None
    seed: int | None = None
    threads: int = 1
    budget: int | None = None
    output_path: str | None = None
    extra: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v not in (None, [], {})}
        out["config_hash"] = sieve.config_hash(out)
        return out


# --------------------------------------------------------------------------
# parsing helpers


def parse_range(text: str) -> list[int]:
    """'5', '1..5', '1-5' or '1,3,5'."""
    text = text.strip()
    try:
        m = re.fullmatch(r"(\d+)\s*(?:\.\.|-)\s*(\d+)", text)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"empty degree range {text!r}")
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot read degree range {text!r}") from exc


def _prime_power(q: int):
    try:
        return sieve._prime_power(q)
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_scheme(arg: str) -> geom.Subscheme:
    """A JSON file, or a shorthand: 'P<n>/<q>', 'L/<q>' (the line x0 = 0),
    'U/<q>' (that line minus the four points cut by lines through the
    standard four points)."""
    m = re.fullmatch(r"(P(\d+)|L|U)/(\d+)", arg.strip())
    if m:
        p, k = _prime_power(int(m.group(3)))
        base = field_create(p, k)
        if m.group(1) == "L":
            return geom.Subscheme(2, base, equations=(geom.parse("x0", 3, base),), dim=1, name="L")
        if m.group(1) == "U":
            return taylor.conic_family(base)[1]
        return geom.projective_space(int(m.group(2)), base)
    if not Path(arg).exists():
        raise ConfigError(f"{arg}: no such scheme file (or shorthand like P2/2, U/3)")
    return geom.load_scheme(arg)


def resolve_condition(arg: str | None, X: geom.Subscheme) -> taylor.TaylorCondition:
    if arg in (None, "smoothness"):
        if X.dim is None:
            raise ConfigError("the smoothness condition needs \"dim\" in the scheme file")
        return taylor.TaylorCondition((taylor.smoothness_condition(X),), name="smoothness")
    if arg == "conic":
        return taylor.TaylorCondition((taylor.conic_condition(taylor.CONIC_Y, X),), name="conic")
    if not Path(arg).exists():
        raise ConfigError(f"{arg}: no such condition file (or 'smoothness', 'conic')")
    return taylor.load_condition(arg, X)


def fmt_rational(v: Fraction) -> str:
    num, den = geom.format_big_int(v.numerator), geom.format_big_int(v.denominator)
    if num and den:
        return f"{num}/{den} ({float(v):.10f})"
    return f"({float(v):.10f}, exact value too long to print)"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _print_config(cfg: RunConfig):
    print("# config " + json.dumps(cfg.resolved(), sort_keys=True, default=str))


# --------------------------------------------------------------------------
# commands


def cmd_zeta(args) -> int:
    X = resolve_scheme(args.scheme)
    cfg = RunConfig("zeta", args.scheme, s=args.s, E=args.E, budget=args.budget,
                    output_path=args.out)
    _print_config(cfg)
    kw = {"budget": args.budget} if args.budget else {}
    ztr = geom.zeta_inverse_truncated(X, args.s, args.E, **kw)
    if args.out:
        Path(args.out).write_text(geom.closed_point_table_csv(ztr))
    print(f"{'deg':>4} {'closed points':>14} {'Euler factor':>14} {'partial product':>16}")
    for r, c, v in ztr.per_degree:
        ftxt = f"{(1 - float(ztr.q) ** (-args.s * r)) ** c:.10f}"
        print(f"{r:>4} {c:>14} {ftxt:>14} {float(v):>16.10f}")
    print(f"zeta_X({args.s})^-1 truncated at E={args.E}: {fmt_rational(ztr.value)}")
    if ztr.tail_bound is not None:
        print(f"tail bound: {ztr.tail_bound:.3e}")
    if ztr.below_convergence:
        print("warning: s is at or below the abscissa of convergence; no limit")
    closed = geom.closed_form_zeta_inverse(X, args.s)
    if closed is not None:
        print(f"closed form: {fmt_rational(closed)}; difference "
              f"{abs(float(ztr.value) - float(closed)):.3e}")
    return EXIT_OK


def cmd_points(args) -> int:
    X = resolve_scheme(args.scheme)
    cfg = RunConfig("points", args.scheme, E=args.E, budget=args.budget, output_path=args.out)
    _print_config(cfg)
    kw = {"budget": args.budget} if args.budget else {}
    counts = geom.closed_point_counts_moebius(X, args.E, **kw)
    lines = ["degree,points,closed_points"]
    for r, c in counts:
        lines.append(f"{r},{geom.count_points(X, r, **kw)},{c}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.list:
        for x in geom.closed_points(X, args.E, **kw):
            print(f"# {x.degree} {x.rep!r}")
    return EXIT_OK


def cmd_sieve(args) -> int:
    X = resolve_scheme(args.scheme)
    cond = resolve_condition(args.condition, X)
    ds = parse_range(args.d)
    mode = args.mode
    cfg = RunConfig("sieve", args.scheme, args.condition or "smoothness", ds, e=args.e, E=args.E,
                    mode=mode, trials=args.trials if mode == "mc" else None,
                    seed=args.seed if mode == "mc" else None, threads=args.threads,
                    budget=args.budget, output_path=args.out)
    _print_config(cfg)
    prediction = sieve.predicted_probability(cond, args.E)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=sieve.SieveReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    reports = []
    for d in ds:
        if mode == "exact":
            kw = {"budget": args.budget} if args.budget else {}
            rep = sieve.exact_low_probability(sieve.build_evaluation_map(cond, d, args.e), **kw)
            rep.e = args.e
        elif mode == "exhaustive":
            kw = {"budget": args.budget} if args.budget else {}
            rep = sieve.exhaustive_probability(cond, d, args.E, e=args.e, threads=args.threads, **kw)
        else:
            rep = sieve.monte_carlo_probability(cond, d, args.E, args.trials, args.seed,
                                                e=args.e, threads=args.threads)
        rep.prediction = prediction
        rep.config = cfg.resolved()
        writer.writerow(rep.row())
        reports.append(rep)
    _emit(buf.getvalue(), args.out)
    print(f"# prediction (product of local probabilities, degree <= {args.E}): "
          f"{fmt_rational(prediction)}")
    for rep in reports:
        if rep.probability is not None:
            txt = fmt_rational(rep.probability)
        else:
            txt = f"{rep.estimate:.10f} +- {rep.stderr:.10f}"
        gap = rep.value - float(prediction)
        print(f"# d={rep.d}: {txt}; minus prediction {gap:+.6f}")
    return EXIT_OK


def cmd_diag(args) -> int:
    cfg = RunConfig("diag", E=args.E, budget=args.budget,
                    extra={"n": args.n, "q": args.q, "d_max": args.d_max})
    _print_config(cfg)
    kw = {"budget": args.budget} if args.budget else {}
    rep = sieve.diagonal_counterexample(args.n, args.q, args.d_max, E=args.E, **kw)
    empty = [d for d, ok in rep.empty.items() if ok]
    if len(empty) == len(rep.empty):
        print(f"P_d empty for d = 0..{args.d_max}; local product (E={args.E}) = "
              f"{fmt_rational(rep.local_product)}")
    else:
        print(f"P_d empty only for d in {empty}")
    print(f"sections enumerated: {rep.sections}; closed points used: {rep.points_used} "
          f"(max degree {rep.max_point_degree})")
    print(f"zeta_P{args.n}({args.n + 1})^-1 = {fmt_rational(rep.limit)}; "
          f"distance {rep.distance:.3e}")
    return EXIT_OK if len(empty) == len(rep.empty) else EXIT_PRECONDITION


def cmd_surjectivity(args) -> int:
    X = resolve_scheme(args.scheme)
    cond = resolve_condition(args.condition, X)
    ds = parse_range(args.d)
    cfg = RunConfig("surjectivity", args.scheme, args.condition or "smoothness", ds, e=args.e)
    _print_config(cfg)
    table = sieve.surjectivity_table(cond, args.e, ds)
    lines = ["d,rank,target_dim,surjective"]
    lines += [f"{d},{r},{t},{int(s)}" for d, r, t, s in table]
    _emit("\n".join(lines) + "\n", args.out)
    d0 = sieve.stability_threshold(table)
    print(f"# stability threshold d0 = {d0 if d0 is not None else 'not reached in range'}")
    return EXIT_OK


def cmd_conic_demo(args) -> int:
    p, k = _prime_power(args.q)
    base = field_create(p, k)
    cfg = RunConfig("conic-demo", extra={"q": args.q, "x": args.x})
    _print_config(cfg)
    Y, U = taylor.conic_family(base)
    coords = [int(c) for c in args.x.split(",")]
    x = geom.closed_point(coords, base)
    C = taylor.conic_through(Y, x)
    qd = taylor.conic_tangent_quotient(C, x)
    print(f"U = L minus {[repr(z.rep) for z in U.excluded]}")
    print(f"conic through Y and {x.rep!r}: {format_poly(C.poly)}")
    print(f"det(gram) = {format_element(C.gram_det())}; smooth = {C.smooth}")
    print("tangent direction: (" + ", ".join(format_element(c) for c in qd.matrix[0]) + ")")
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="taylorsieve",
                                 description="Taylor conditions, zeta products and sieve "
                                             "probabilities over finite fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--scheme", required=True,
                           help="scheme JSON or shorthand P<n>/<q>, L/<q>, U/<q>")
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--out", default=None, help="write CSV here instead of stdout")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("zeta", help="truncated Euler product for zeta_X(s)^-1")
    common(p)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--E", type=int, default=6)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("points", help="closed-point counts by degree")
    common(p)
    p.add_argument("--E", type=int, default=3)
    p.add_argument("--list", action="store_true", help="also list the closed points")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("sieve", help="probability that a random f satisfies the condition")
    common(p)
    p.add_argument("--condition", default=None,
                   help="condition JSON, or 'smoothness' (default) / 'conic'")
    p.add_argument("--d", required=True, help="degree or range, e.g. 1..5")
    p.add_argument("--e", type=int, default=2)
    p.add_argument("--E", type=int, default=1)
    p.add_argument("--mode", choices=("exact", "exhaustive", "mc"), default="exhaustive")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("diag", help="the diagonal counterexample")
    common(p, scheme=False)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--d-max", dest="d_max", type=int, default=4)
    p.add_argument("--E", type=int, default=8)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("surjectivity", help="rank of the evaluation map per d")
    common(p)
    p.add_argument("--condition", default=None)
    p.add_argument("--e", type=int, default=2)
    p.add_argument("--d", default="0..8")
    p.set_defaults(func=cmd_surjectivity)

    p = sub.add_parser("conic-demo", help="conic through four points and x")
    common(p, scheme=False)
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--x", default="0,1,2")
    p.set_defaults(func=cmd_conic_demo)
    return ap


def _validate(args):
    for name in ("E", "e", "s", "trials", "d_max", "n", "q", "threads"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "d_max" else 1):
            raise ConfigError(f"--{name.replace('_', '-')} must be positive")
    if getattr(args, "budget", None) is not None and args.budget < 1:
        raise ConfigError("--budget must be positive")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        _validate(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except TaylorSieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
