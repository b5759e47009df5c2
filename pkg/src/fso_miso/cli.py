"""Command-line interface.

    fso-miso sweep    --config run.ini --out results.csv [--seed S]
                      [--trials T] [--workers W]
    fso-miso optimize --config run.ini --out history.csv [--seed S]
                      [--trials T] [--workers W] [--synthetic-objective]
    fso-miso validate [--quick] [--seed S] [--workers W]

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure,
3 validation-check failure. Every number printed or written comes from a
library call; the CLI only formats.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import load_config
from .errors import ConfigError, FsoMisoError
from .optimizer import optimize_beam_radius
from .sweeps import run_sweep, write_history_csv, write_sweep_csv
from .validation import run_all


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fso-miso",
        description="Free-space optical MISO link simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument(
            "--trials", type=int, default=None, help="override trials per point"
        )
        p.add_argument(
            "--workers", type=int, default=1, help="worker threads (results identical)"
        )

    p_sweep = sub.add_parser("sweep", help="run the configured parameter sweep")
    p_sweep.add_argument("--config", required=True, help="INI config file")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    add_common(p_sweep)

    p_opt = sub.add_parser("optimize", help="search the beam radius with the GA")
    p_opt.add_argument("--config", required=True, help="INI config file")
    p_opt.add_argument("--out", required=True, help="per-generation history CSV path")
    p_opt.add_argument(
        "--synthetic-objective",
        action="store_true",
        help="optimize (rho - 0.3)^2 instead of the link objective (test hook)",
    )
    add_common(p_opt)

    p_val = sub.add_parser("validate", help="run the self-check suites")
    p_val.add_argument("--quick", action="store_true", help="reduced sample sizes")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    spec = cfg.sweep
    base = spec.base
    if args.seed is not None:
        base = replace(base, seed=args.seed)
    if args.trials is not None:
        base = replace(base, trials=args.trials)
    spec = replace(spec, base=base)
    rows = run_sweep(spec, workers=args.workers)
    write_sweep_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if cfg.ga is None:
        raise ConfigError(f"{args.config}: optimize needs a [ga] section")
    ga = cfg.ga
    if args.seed is not None:
        ga = replace(ga, seed=args.seed)

    if args.synthetic_objective:
        result = optimize_beam_radius(ga, objective=lambda rho: (rho - 0.3) ** 2)
    else:
        base = cfg.base
        if cfg.ga_trials is not None:
            base = replace(base, trials=cfg.ga_trials)
        if args.trials is not None:
            base = replace(base, trials=args.trials)
        if args.seed is not None:
            base = replace(base, seed=args.seed)
        result = optimize_beam_radius(ga, base=base, workers=args.workers)

    write_history_csv(result.history, args.out)
    print("rho_star,pe_star")
    print(f"{result.rho_star:.17g},{result.pe_star:.17g}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    results = run_all(quick=args.quick, seed=args.seed, workers=args.workers)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "optimize":
            return _cmd_optimize(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FsoMisoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
