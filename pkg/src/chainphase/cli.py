"""Command-line interface.

Exit codes: 0 success, 1 usage or domain error, 2 validation failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import schemes, suites
from .chain import ci_optimal_taus, ci_xi
from .exceptions import DomainError
from .model import LossBudget
from .optimizer import OptimizerConfig, optimize_taus
from .reports import Family, SchemeSpec
from .sweep import FIGURES, SweepConfig, SweepScheme, fmt, make_figure, run_sweep, write_text

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _add_budget(p, eta_required=True):
    p.add_argument("--eta", type=_float, required=eta_required, help="sample transmissivity")
    p.add_argument("--eta-p", type=_float, default=1.0, help="preparation transmissivity")
    p.add_argument("--eta-rt", type=_float, default=1.0, help="round-trip transmissivity")
    p.add_argument("--eta-d", type=_float, default=1.0, help="detection transmissivity")


def _add_scheme_params(p):
    p.add_argument("--n", type=_int, help="NOON size")
    p.add_argument("--m", type=_int, help="passes or stages")
    p.add_argument("--nsq", type=_float, help="squeezing particle number (inf allowed)")


def _add_output(p):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=_int, default=1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chainphase", description="Dose efficiency of optical phase estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("efficiency", help="evaluate one scheme")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    _add_budget(p)
    _add_scheme_params(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("figure", help="write the data behind a figure")
    p.add_argument("name", help=f"one of {', '.join(FIGURES)}")
    _add_output(p)

    p = sub.add_parser("sweep", help="evaluate schemes over an eta grid")
    p.add_argument("--config", help="JSON sweep config (schema_version 1)")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--eta-grid", help="comma-separated, strictly increasing values in (0, 1)")
    p.add_argument("--eta-p", type=_float, default=1.0)
    p.add_argument("--eta-rt", type=_float, default=1.0)
    p.add_argument("--eta-d", type=_float, default=1.0)
    _add_scheme_params(p)
    _add_output(p)

    p = sub.add_parser("optimize", help="numerically optimize a chain schedule")
    _add_budget(p)
    p.add_argument("--m", type=_int, required=True)
    p.add_argument("--max-iters", type=_int, default=2000)
    p.add_argument("--rel-tol", type=_float, default=1e-13)
    p.add_argument("--restarts", type=_int, default=3)
    p.add_argument("--seed", type=_int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("validate", help="run the self-check suites")
    p.add_argument("--quick", action="store_true", help="single epsilon, short prescription list")
    p.add_argument("--mutate", choices=suites.MUTATIONS, help=argparse.SUPPRESS)
    return parser


def _emit(text, out):
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _record(fields: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps({k: (float(fmt(v)) if isinstance(v, float) else v)
                           for k, v in fields.items()}) + "\n"
    keys = list(fields)
    return ",".join(keys) + "\n" + ",".join(fmt(fields[k]) for k in keys) + "\n"


def cmd_efficiency(args) -> int:
    budget = LossBudget(args.eta, args.eta_p, args.eta_rt, args.eta_d)
    spec = SchemeSpec(args.family, budget, n=args.n, m=args.m, n_sq=args.nsq)
    rep = schemes.evaluate(spec)
    fields = {"family": spec.family.value, **rep.as_dict()}
    sys.stdout.write(_record(fields, args.format))
    return EXIT_OK


def cmd_figure(args) -> int:
    table = make_figure(args.name, jobs=args.jobs)
    _emit(table.render(args.format), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.config:
        config = SweepConfig.load(args.config)
    else:
        if not (args.family and args.eta_grid):
            raise UsageError("sweep: give --config, or both --family and --eta-grid")
        grid = [_float(x) for x in args.eta_grid.split(",") if x.strip()]
        scheme = SweepScheme(args.family, n=args.n, m=args.m, n_sq=args.nsq,
                             eta_p=args.eta_p, eta_rt=args.eta_rt, eta_d=args.eta_d)
        config = SweepConfig(tuple(grid), (scheme,))
    out = args.out or config.output_path
    fmt_name = args.format if args.config is None or args.format != "csv" else config.output_format
    table = run_sweep(config, jobs=args.jobs)
    _emit(table.render(fmt_name), out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    budget = LossBudget(args.eta, args.eta_p, args.eta_rt, args.eta_d)
    config = OptimizerConfig(args.max_iters, args.rel_tol, args.restarts, args.seed)
    res = optimize_taus(args.m, budget, config)
    presc = ci_xi(ci_optimal_taus(args.m, budget), budget).xi
    fields = {
        "m": args.m,
        "xi_optimized": res.best_xi,
        "xi_prescription": presc,
        "shortfall": max(0.0, (res.best_xi - presc) / presc),
        "converged": int(res.converged),
        "iterations": res.iterations_used,
        "taus_over_eps": " ".join(fmt(t / res.best_taus.epsilon) for t in res.best_taus.taus),
    }
    sys.stdout.write(_record(fields, args.format))
    if not res.converged:
        print("warning: optimizer did not converge within max_iters", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = suites.run_all(quick=args.quick, mutation=args.mutate)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


COMMANDS = {
    "efficiency": cmd_efficiency,
    "figure": cmd_figure,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
