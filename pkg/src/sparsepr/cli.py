"""Command line front end.

Subcommands:
    trial    solve one freshly sampled instance, print the record as JSON
    grid     run an experiment grid from a JSON config, write CSV
    solve    recover a signal from an SPR1 instance file
    moments  print the truncated second/fourth Gaussian moments

Exit codes: 0 success, 2 parse/config error, 3 I/O error. The default
worker count for ``grid`` comes from the SPARSEPR_THREADS environment
variable (the --threads flag overrides it).

Heavy imports happen inside the handlers so cheap subcommands stay fast.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

THREADS_ENV = "SPARSEPR_THREADS"

_METHOD_ALIASES = {
    "spectral": "spectral",
    "modspec": "modified_spectral",
    "tp": "tp",
    "tpmr": "tp_mr",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsepr",
        description="Sparse phase retrieval solvers and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    trial = sub.add_parser("trial", help="run one Monte Carlo trial")
    trial.add_argument("--n", type=int, required=True)
    trial.add_argument("--s", type=int, required=True)
    trial.add_argument("--m", type=int, required=True)
    trial.add_argument("--method", required=True,
                       choices=sorted(_METHOD_ALIASES))
    trial.add_argument("--seed", type=int, required=True)
    trial.add_argument("--trial-index", type=int, default=0)
    trial.add_argument("--l", type=float, default=None)
    trial.add_argument("--u", type=float, default=None)
    trial.add_argument("--s-prime", type=int, default=None)
    trial.add_argument("--t-max", type=int, default=None)
    trial.add_argument("--mu", type=float, default=None)
    trial.add_argument("--max-iters", type=int, default=None)
    trial.add_argument("--b", type=int, default=None,
                       help="restart count for tpmr")

    grid = sub.add_parser("grid", help="run an experiment grid")
    grid.add_argument("--config", required=True, help="grid config JSON path")
    grid.add_argument("--threads", type=int, default=None)
    grid.add_argument("--out", default="results.csv", help="CSV output path")
    grid.add_argument("--no-timing", action="store_true",
                      help="record elapsed_ms as 0 (byte-reproducible CSV)")

    solve = sub.add_parser("solve", help="solve an SPR1 instance file")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--s", type=int, required=True)
    solve.add_argument("--method", required=True,
                       choices=sorted(_METHOD_ALIASES))

    moments = sub.add_parser("moments",
                             help="truncated Gaussian moments of a band")
    moments.add_argument("--l", type=float, required=True)
    moments.add_argument("--u", type=float, required=True)

    return parser


def _solver_configs(args):
    from .harness import SolverConfigs
    from .initializers import InitConfig
    from .refine import HtpConfig

    init_kwargs = {}
    for flag, name in (("l", "l"), ("u", "u"), ("s_prime", "s_prime"),
                       ("t_max", "t_max")):
        value = getattr(args, flag)
        if value is not None:
            init_kwargs[name] = value
    htp_kwargs = {}
    if args.mu is not None:
        htp_kwargs["mu"] = args.mu
    if args.max_iters is not None:
        htp_kwargs["max_iters"] = args.max_iters
    restarts = args.b if args.b is not None else 20
    return SolverConfigs(init=InitConfig(**init_kwargs),
                         htp=HtpConfig(**htp_kwargs), restarts=restarts)


def _cmd_trial(args) -> int:
    from dataclasses import asdict

    from .harness import run_trial

    record = run_trial(args.n, args.s, args.m, _METHOD_ALIASES[args.method],
                       args.trial_index, args.seed,
                       configs=_solver_configs(args))
    print(json.dumps(asdict(record)))
    return 0


def _resolve_threads(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer") from None


def _cmd_grid(args) -> int:
    from .harness import emit_csv, grid_from_dict, run_grid, summary_table

    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
    grid = grid_from_dict(data)
    threads = _resolve_threads(args.threads)
    result = run_grid(grid, parallelism=threads,
                      record_timing=not args.no_timing)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(emit_csv(result.records))
    print(summary_table(result.cells))
    print(f"{len(result.records)} records written to {args.out}")
    return 0


def _cmd_solve(args) -> int:
    from .harness import SolverConfigs
    from .instance_io import format_row, load_instance
    from .pipeline import solve_multi_restart, solve_two_stage

    ensemble, signal = load_instance(args.instance)
    method = _METHOD_ALIASES[args.method]
    configs = SolverConfigs()
    truth = signal.to_dense()
    if method == "tp_mr":
        report = solve_multi_restart(ensemble, args.s,
                                     configs.restart_config(), truth=truth)
    else:
        report = solve_two_stage(ensemble, args.s, method, configs.init,
                                 configs.htp, truth=truth)
    print(format_row(report.x))
    print(json.dumps({
        "method": report.method,
        "rel_error": report.rel_error,
        "init_dist": report.init_dist,
        "iterations": report.iterations,
        "chosen_restart": report.chosen_restart,
        "degenerate": report.degenerate,
        "init_elapsed_s": report.init_elapsed,
        "refine_elapsed_s": report.refine_elapsed,
    }))
    return 0


def _cmd_moments(args) -> int:
    from .model import truncated_gaussian_moment

    alpha = truncated_gaussian_moment(2, args.l, args.u)
    beta = truncated_gaussian_moment(4, args.l, args.u)
    print(f"alpha = {alpha:.17g}")
    print(f"beta = {beta:.17g}")
    return 0


_HANDLERS = {
    "trial": _cmd_trial,
    "grid": _cmd_grid,
    "solve": _cmd_solve,
    "moments": _cmd_moments,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits 2 on bad usage
    try:
        return _HANDLERS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
