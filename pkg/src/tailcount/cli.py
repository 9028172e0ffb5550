"""Command-line interface: ``tailcount <subcommand> [options]``."""

import argparse
import csv
import json
import logging
import os
import sys

from . import __version__
from .counting import sweep_thresholds, write_count_series
from .diagnostics import diagnose_panel
from .errors import IoFailureError, InvalidConfigError, TailCountError
from .panel import load_panel, write_panel
from .report import RunConfig, dumps, run_pipeline, score_interval
from .simulator import SimConfig, simulate_panel

logger = logging.getLogger("tailcount")

EXIT_OK = 0
EXIT_ERROR = 2

# flag dest -> RunConfig field
_RUN_FLAGS = {
    "input": "input_path",
    "task": "task",
    "m": "m",
    "temporal": "temporal",
    "u_target": "u_target",
    "grid_min": "grid_min",
    "grid_max": "grid_max",
    "grid_step": "grid_step",
    "replicates": "B",
    "seed": "seed",
    "ci_level": "ci_level",
    "out": "output_dir",
    "layout": "layout",
    "block_mode": "block_mode",
}


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoFailureError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _run_config(args):
    base = _read_json(args.config) if getattr(args, "config", None) else {}
    for flag, key in _RUN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            base[key] = value
    return RunConfig.from_dict(base)


def _add_input(p):
    p.add_argument("--input", help="panel CSV")
    p.add_argument("--layout", choices=["long", "wide"], default=None)
    p.add_argument("--config", help="JSON run configuration; flags override it")


def _add_task(p):
    p.add_argument("--task", choices=["task1", "task2", "task3", "custom"])
    p.add_argument("--m", type=int, help="number of sites that must exceed (custom task)")
    p.add_argument("--temporal", choices=["single_day", "run_at_least_two_days"])
    p.add_argument("--u-target", dest="u_target", type=float)
    p.add_argument("--grid-min", dest="grid_min", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-step", dest="grid_step", type=float)
    p.add_argument("--out", help="output directory")


def _add_bootstrap(p):
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ci-level", dest="ci_level", type=float)
    p.add_argument("--block-mode", dest="block_mode", choices=["per_run_pooled", "same_years_all_runs"])


def build_parser():
    parser = argparse.ArgumentParser(prog="tailcount", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tailcount {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load a panel and report its dimensions")
    _add_input(p)

    p = sub.add_parser("diagnose", help="GEV trend, runs, ADF and lag-1 chi diagnostics")
    _add_input(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--per-run", action="store_true", help="runs/ADF tests per run instead of pooled")
    p.add_argument("--lowess-fraction", type=float, default=0.1)

    p = sub.add_parser("count", help="empirical counts over a threshold grid")
    _add_input(p)
    _add_task(p)

    p = sub.add_parser("estimate", help="counts, power-law fit and point estimate")
    _add_input(p)
    _add_task(p)

    p = sub.add_parser("bootstrap", help="full pipeline with year-block bootstrap interval")
    _add_input(p)
    _add_task(p)
    _add_bootstrap(p)

    p = sub.add_parser("simulate", help="write a synthetic panel")
    p.add_argument("--config", help="JSON simulation configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--layout", choices=["long", "wide"], default="long")

    p = sub.add_parser("score", help="interval score of a confidence interval")
    p.add_argument("--low", type=float, required=True)
    p.add_argument("--high", type=float, required=True)
    p.add_argument("--truth", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    return parser


def _emit(obj):
    sys.stdout.write(dumps(obj))


def cmd_validate(args):
    cfg = _run_config(args)
    if cfg.input_path is None:
        raise InvalidConfigError("--input is required")
    panel = load_panel(cfg.input_path, cfg.layout)
    S, R, T1, T2 = panel.dims
    _emit({"status": "ok", "dims": {"sites": S, "runs": R, "years": T1, "days": T2}, "n_values": panel.values.size})


def cmd_diagnose(args):
    cfg = _run_config(args)
    if cfg.input_path is None:
        raise InvalidConfigError("--input is required")
    panel = load_panel(cfg.input_path, cfg.layout)
    report, slopes = diagnose_panel(panel, pooled=not args.per_run, lowess_fraction=args.lowess_fraction)
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "diagnostics.json"), "w") as fh:
        fh.write(dumps(report))
    with open(os.path.join(out, "slopes.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["site", "beta1", "ci_low", "ci_high"])
        for row in slopes:
            w.writerow([row["site"], repr(row["beta1"]), repr(row["ci_low"]), repr(row["ci_high"])])
    _emit({"status": "ok", "sites": len(report), "output_dir": out})


def cmd_count(args):
    cfg = _run_config(args).resolved()
    if cfg.input_path is None:
        raise InvalidConfigError("--input is required")
    panel = load_panel(cfg.input_path, cfg.layout)
    series = sweep_thresholds(panel, cfg.spec, cfg.grid)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, "counts.csv")
    write_count_series(series, path)
    _emit({"status": "ok", "n_thresholds": len(series), "path": path})


def cmd_estimate(args):
    report = run_pipeline(_run_config(args), with_bootstrap=False)
    sys.stdout.write(report.to_json())


def cmd_bootstrap(args):
    report = run_pipeline(_run_config(args), with_bootstrap=True)
    sys.stdout.write(report.to_json())


def cmd_simulate(args):
    cfg = SimConfig.from_json(json.dumps(_read_json(args.config))) if args.config else SimConfig()
    if args.seed is not None:
        cfg = SimConfig(**{**cfg.__dict__, "seed": args.seed})
    panel = simulate_panel(cfg)
    parent = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(parent, exist_ok=True)
    write_panel(panel, args.out, args.layout)
    _emit({"status": "ok", "dims": list(panel.dims), "path": args.out})


def cmd_score(args):
    _emit({"score": score_interval(args.low, args.high, args.truth, args.alpha)})


COMMANDS = {
    "validate": cmd_validate,
    "diagnose": cmd_diagnose,
    "count": cmd_count,
    "estimate": cmd_estimate,
    "bootstrap": cmd_bootstrap,
    "simulate": cmd_simulate,
    "score": cmd_score,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except TailCountError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
