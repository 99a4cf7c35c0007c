"""Command-line front end: solve, table1, security-compare, bounds, trace-dump.

Reports are written as JSON (machine consumption) or CSV (tables). Output
is deterministic for a fixed configuration and seed; timing is only
included on request since it varies between runs. Exit codes: 0 success,
2 configuration error, 3 solver/run error.

EXOTIC_THREADS caps the fan-out of repetition sweeps (default 1).
"""

from __future__ import annotations

import argparse
import csv
import importlib
import io
import json
import os
import sys
import time
from typing import Optional

import numpy as np

from .baselines import BaselineConfig, run_agp, run_gda, saddle_residual, sweep, sweep_csv
from .core import ExoticConfig, RunReport, run_exotic, solve_ncc
from .errors import ExoticError
from .inner_solver import InnerSolverConfig
from .oracles import GridSpec, grid_minmax, security_value_exact, worst_case_response
from .problems import (
    GameSpec,
    MinMaxProblem,
    bilinear_toy,
    handcrafted_optimum,
    handcrafted_problem,
    security_game_problem,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

#: tree depth used for a handcrafted run when none is given: one hundred
#: times the product of the two dimensions keeps the relative error well
#: under a tenth of a percent on the desk-scale instances
HMAX_PER_UNIT_DIM = 100

#: desk-scale guard for table emission
MAX_TABLE_DIM_PRODUCT = 9


class ConfigError(ExoticError):
    pass


def _threads() -> int:
    raw = os.environ.get("EXOTIC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"EXOTIC_THREADS must be an integer, got {raw!r}")


def _load_config_defaults(
    parsers: dict[str, argparse.ArgumentParser], argv: list[str]
) -> list[str]:
    """Apply --config FILE values as argument defaults; flags still win.

    Values are installed on the subcommand's parser (a configured value
    also satisfies a required argument). Unknown keys are rejected so
    typos fail loudly.
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise ConfigError("--config needs a file path")
    rest = [a for i, a in enumerate(argv) if i not in (idx, idx + 1)]
    command = next((a for a in rest if not a.startswith("-")), None)
    if command not in parsers:
        raise ConfigError("--config needs a subcommand to apply to")
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    sub = parsers[command]
    known = {a.dest for a in sub._actions}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for action in sub._actions:
        if action.dest in doc:
            action.default = doc[action.dest]
            action.required = False
    return rest


def _build_problem(args) -> MinMaxProblem:
    if args.problem == "handcrafted":
        c = args.c if args.c is not None else 3.0 * args.dy**2 / args.dx + 1.0
        return handcrafted_problem(args.dx, args.dy, c)
    if args.problem == "bilinear":
        return bilinear_toy()
    if args.problem == "security":
        if not args.game:
            raise ConfigError("--game FILE is required for the security problem")
        with open(args.game) as fh:
            return security_game_problem(GameSpec.from_json(fh.read()))
    if args.problem == "custom":
        if not args.custom:
            raise ConfigError("--custom module:callable is required for a custom problem")
        mod_name, _, func_name = args.custom.partition(":")
        if not func_name:
            raise ConfigError("--custom must look like package.module:factory")
        factory = getattr(importlib.import_module(mod_name), func_name)
        problem = factory()
        if not isinstance(problem, MinMaxProblem):
            raise ConfigError("custom factory must return a MinMaxProblem")
        return problem
    raise ConfigError(f"unknown problem {args.problem!r}")


def _exotic_config(args) -> ExoticConfig:
    inner = InnerSolverConfig(step_size=args.eta)
    if args.budget is not None and args.hmax is not None:
        raise ConfigError("give either --budget or --hmax, not both")
    if args.budget is None and args.hmax is None:
        raise ConfigError("give one of --budget or --hmax")
    return ExoticConfig(
        budget=args.budget,
        h_max=args.hmax,
        arity=args.arity,
        inner=inner,
        seed=args.seed,
    )


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _report_json(report: RunReport, include_time: bool) -> str:
    return json.dumps(report.to_json_obj(include_time=include_time),
                      indent=2, sort_keys=True) + "\n"


def _run_report_csv(report: RunReport, include_time: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["value", "iterations", "nodes_expanded", "h_max", "arity", "engine"]
    row = [repr(report.value), report.total_inner_iterations,
           report.nodes_expanded, report.h_max, report.arity, report.engine]
    if include_time:
        header.append("time_s")
        row.append(repr(report.wall_time_s))
    writer.writerow(header)
    writer.writerow(row)
    return buf.getvalue()


def cmd_solve(args) -> int:
    problem = _build_problem(args)
    if args.alg == "oracle":
        if args.problem == "security":
            with open(args.game) as fh:
                game = GameSpec.from_json(fh.read())
            value, strategy = security_value_exact(game)
            doc = {"value": value, "x": [float(v) for v in strategy]}
        else:
            value, x, y = grid_minmax(problem, GridSpec(args.grid))
            doc = {
                "value": value,
                "x": [float(v) for v in x],
                "y": [float(v) for v in y],
            }
        _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    if args.alg == "exotic":
        config = _exotic_config(args)
        solver = solve_ncc if args.ncc else run_exotic
        report = solver(problem, config)
        if args.format == "csv":
            _write_text(args.out, _run_report_csv(report, args.timing))
        else:
            _write_text(args.out, _report_json(report, args.timing))
        return EXIT_OK

    if args.alg in ("gda", "agp"):
        config = BaselineConfig(
            step_x=args.step_x,
            step_y=args.step_y,
            iterations=args.iters,
            seed=args.seed,
        )
        if args.repeat > 1:
            rows = sweep(problem, args.alg, args.repeat, config, max_workers=_threads())
            _write_text(args.out, sweep_csv(problem, rows))
            return EXIT_OK
        runner = run_gda if args.alg == "gda" else run_agp
        res = runner(problem, config)
        doc = {
            "x": [float(v) for v in res.x],
            "y": [float(v) for v in res.y],
            "f": float(res.value),
            "saddle_residual": saddle_residual(problem, res.x, res.y,
                                               args.step_x, args.step_y),
        }
        _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    raise ConfigError(f"unknown algorithm {args.alg!r}")


#: tree depths used for the benchmark table, matched to instance size
TABLE_HMAX = {
    (1, 1): 100, (1, 2): 200, (2, 1): 200, (3, 2): 400, (2, 3): 500,
    (3, 3): 600, (5, 5): 1600, (3, 10): 2000, (10, 3): 2000,
    (3, 20): 4000, (20, 3): 4000,
}


def cmd_table1(args) -> int:
    rows = []
    for token in args.rows.split(";"):
        token = token.strip()
        if not token:
            continue
        parts = token.split(",")
        if len(parts) != 2:
            raise ConfigError(f"bad row {token!r}; expected 'dx,dy'")
        rows.append((int(parts[0]), int(parts[1])))
    if not rows:
        raise ConfigError("no rows requested")
    for dx, dy in rows:
        if dx * dy > MAX_TABLE_DIM_PRODUCT and not args.force:
            raise ConfigError(
                f"row ({dx},{dy}) exceeds the desk-scale limit "
                f"dx*dy <= {MAX_TABLE_DIM_PRODUCT}; pass --force to run it"
            )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dx", "dy", "opt_true", "value", "pct_error", "h_max", "runtime_s"])
    for dx, dy in rows:
        c = 3.0 * dy**2 / dx + 1.0
        problem = handcrafted_problem(dx, dy, c)
        opt_true = handcrafted_optimum(dx, dy)[0]
        h_max = args.hmax or TABLE_HMAX.get((dx, dy), HMAX_PER_UNIT_DIM * dx * dy)
        start = time.perf_counter()
        report = run_exotic(problem, ExoticConfig(h_max=h_max, arity=args.arity))
        elapsed = time.perf_counter() - start
        pct = 100.0 * abs(opt_true - report.value) / abs(opt_true)
        writer.writerow([dx, dy, repr(opt_true), repr(report.value),
                         f"{pct:.6f}", h_max, f"{elapsed:.3f}"])
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_security_compare(args) -> int:
    with open(args.game) as fh:
        game = GameSpec.from_json(fh.read())
    problem = security_game_problem(game)
    report = run_exotic(problem, ExoticConfig(h_max=args.hmax, arity=args.arity))
    x_sec = report.x
    _, sec_value = worst_case_response(game, x_sec)

    adv_domain = problem.y_domain
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    dx = problem.dx
    writer.writerow(
        ["alg", "run", "seed"]
        + [f"x{i}" for i in range(dx)]
        + ["cost_tree_vs_alg_adversaries", "cost_alg_worst_case",
           "tree_value", "benign_ok", "secure_ok"]
    )
    violations = 0
    cfg = BaselineConfig(step_x=args.step_x, step_y=args.step_y,
                         iterations=args.iters, seed=args.seed)
    for alg, runner in (("gda", run_gda), ("agp", run_agp)):
        for r in range(args.runs):
            run_cfg = BaselineConfig(step_x=cfg.step_x, step_y=cfg.step_y,
                                     iterations=cfg.iterations, seed=cfg.seed + r)
            res = runner(problem, run_cfg)
            cost_vs_alg = problem.f(x_sec, res.y)
            _, cost_alg_worst = worst_case_response(game, res.x)
            benign_ok = cost_vs_alg <= sec_value + 1e-6
            secure_ok = sec_value <= cost_alg_worst + 1e-6
            violations += (not benign_ok) + (not secure_ok)
            writer.writerow(
                [alg, r, run_cfg.seed]
                + [repr(float(v)) for v in res.x]
                + [repr(float(cost_vs_alg)), repr(float(cost_alg_worst)),
                   repr(float(sec_value)), int(benign_ok), int(secure_ok)]
            )
    _write_text(args.out, buf.getvalue())
    if violations:
        print(f"{violations} ordering violation(s); see the emitted table",
              file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .problems import handcrafted_optimum as hopt
    from .theory import TheoryParams, gap_bound_linear, gap_bound_sublinear

    budgets = [int(float(tok)) for tok in args.budgets.split(",") if tok.strip()]
    if not budgets:
        raise ConfigError("no budgets given")
    problem = handcrafted_problem(args.dx, args.dy, 3.0 * args.dy**2 / args.dx + 1.0)
    opt_true = hopt(args.dx, args.dy)[0]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "empirical_gap", "sublinear_bound", "linear_bound"])
    for n in budgets:
        report = run_exotic(problem, ExoticConfig(budget=n, arity=args.arity))
        gap = abs(opt_true - report.value)
        params = TheoryParams(
            nu=args.nu, rho=args.rho, big_c=args.big_c, d=args.d,
            a1=args.a1, a2=args.a2, c2=args.c2, gamma=args.gamma,
            arity=args.arity, budget=n,
        )
        writer.writerow([n, repr(gap), repr(gap_bound_sublinear(params)),
                         repr(gap_bound_linear(params))])
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_trace_dump(args) -> int:
    problem = _build_problem(args)
    config = _exotic_config(args)
    report = run_exotic(problem, config)
    doc = {
        "problem": problem.name,
        "h_max": report.h_max,
        "arity": report.arity,
        "nodes": report.tree.to_json_obj(),
    }
    _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True,
                   choices=["handcrafted", "security", "bilinear", "custom"])
    p.add_argument("--dx", type=int, default=1)
    p.add_argument("--dy", type=int, default=1)
    p.add_argument("--c", type=float, default=None,
                   help="handcrafted box radius (default 3*dy^2/dx + 1)")
    p.add_argument("--game", type=str, default=None, help="game JSON file")
    p.add_argument("--custom", type=str, default=None,
                   help="module:factory returning a MinMaxProblem")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, default=None,
                   help="total inner-solver iteration budget")
    p.add_argument("--hmax", type=int, default=None, help="maximum tree depth")
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--eta", type=float, default=None,
                   help="inner solver base step (default diameter/10)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="exotic",
        description="Global solver for convex-non-concave min-max problems "
                    "with baselines, oracles and bound evaluators.",
    )
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file with argument defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm on one problem")
    _add_problem_flags(p)
    p.add_argument("--alg", required=True, choices=["exotic", "gda", "agp", "oracle"])
    p.add_argument("--ncc", action="store_true",
                   help="treat the problem as non-convex-concave (role swap)")
    _add_solver_flags(p)
    p.add_argument("--grid", type=int, default=101, help="oracle grid points/dim")
    p.add_argument("--iters", type=int, default=10_000, help="baseline iterations")
    p.add_argument("--step-x", type=float, default=0.05)
    p.add_argument("--step-y", type=float, default=0.05)
    p.add_argument("--repeat", type=int, default=1,
                   help="baseline repetitions; >1 emits a sweep CSV")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the report")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table1", help="benchmark table on the handcrafted family")
    p.add_argument("--rows", type=str, default="1,1;1,2;2,1;2,3;3,3")
    p.add_argument("--hmax", type=int, default=None,
                   help="override the per-row depth table")
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--force", action="store_true",
                   help="allow rows beyond the desk-scale limit")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("security-compare",
                       help="tree solver vs gradient baselines on a game")
    p.add_argument("--game", type=str, required=True)
    p.add_argument("--runs", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hmax", type=int, default=800)
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--step-x", type=float, default=0.05)
    p.add_argument("--step-y", type=float, default=0.05)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_security_compare)

    p = sub.add_parser("bounds", help="empirical gaps with theoretical envelopes")
    p.add_argument("--budgets", type=str, default="1e3,1e4,1e5")
    p.add_argument("--dx", type=int, default=1)
    p.add_argument("--dy", type=int, default=1)
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.7)
    p.add_argument("--big-c", dest="big_c", type=float, default=2.0)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--a1", type=float, default=1.0)
    p.add_argument("--a2", type=float, default=0.5)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("trace-dump", help="dump the search tree as JSON")
    _add_problem_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_trace_dump)

    return parser, {name: sp for name, sp in sub.choices.items()}


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        argv = _load_config_defaults(subparsers, argv)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExoticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
