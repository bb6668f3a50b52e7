"""Command-line entry point: ``fldabound <subcommand> [flags]``.

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime failures.
The resolved configuration is echoed to stderr for every run.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import harness
from .harness import ConfigError, ExperimentConfig
from .rmt import (
    MpLaw,
    extreme_singular_check,
    ks_distance,
    pooled_covariance_spectrum,
    quadratic_form_check,
    wishart_spectrum,
)

#: Directory used for outputs when ``--out`` is not given.
OUTPUT_DIR_ENV = "FLDABOUND_OUTPUT_DIR"

log = logging.getLogger("fldabound")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _class_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated class indices")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad class pair {text!r}")


def _label_column(text: str) -> int | str:
    try:
        return int(text)
    except ValueError:
        return text


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which is the config-error code.
    pass


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="fldabound", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-trial warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, trials=1000):
        p.add_argument("--trials", type=int, default=trials, help="number of random trials")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--workers", type=int, default=1, help="threads running trials")
        p.add_argument("--out", default=None, help="CSV output path (JSON summary goes next to it)")

    p = sub.add_parser("simulate-power", help="simulated discrimination-power experiment", formatter_class=fmt)
    p.add_argument("--dim", type=int, default=50, help="dimension D")
    p.add_argument("--n", type=int, default=100, help="training sample size N")
    p.add_argument("--classes", type=int, default=5, help="number of classes")
    p.add_argument("--mean-scale", type=float, default=1.0, help="std of random class means")
    common(p)

    p = sub.add_parser("simulate-error", help="simulated binary error experiment", formatter_class=fmt)
    p.add_argument("--dim", type=int, default=50, help="dimension D")
    p.add_argument("--n", type=int, default=100, help="training sample size N")
    p.add_argument("--mean-scale", type=float, default=1.0, help="std of random class means")
    common(p)

    p = sub.add_parser("rmt-check", help="random-matrix limit checks", formatter_class=fmt)
    p.add_argument("--dim", type=int, default=1000, help="dimension D")
    p.add_argument("--n", type=int, default=2000, help="sample size N")
    p.add_argument("--classes", type=int, default=2, help="classes in the pooled covariance")
    p.add_argument("--seed", type=int, default=0, help="seed")
    p.add_argument("--out", default=None, help="JSON output path")

    p = sub.add_parser("curves", help="bound curves over a lambda grid", formatter_class=fmt)
    p.add_argument("--gammas", type=_float_list, default="0.1,0.3,0.5,0.7,0.9", help="comma-separated ratios")
    p.add_argument("--lambda-max", type=float, default=10.0, help="largest lambda on the grid")
    p.add_argument("--lambda-points", type=int, default=100, help="grid size")
    p.add_argument("--out", default=None, help="CSV output path")

    for name, helptext in (
        ("dataset-power", "discrimination-power experiment on a CSV dataset"),
        ("dataset-error", "binary error experiment on a CSV dataset"),
    ):
        p = sub.add_parser(name, help=helptext, formatter_class=fmt)
        p.add_argument("--csv", required=True, help="input CSV path")
        p.add_argument("--label-column", type=_label_column, default=-1, help="label column name or index")
        p.add_argument("--delimiter", default=",", help="field delimiter")
        p.add_argument("--no-header", action="store_true", help="the first row is data")
        if name == "dataset-error":
            p.add_argument("--holdout", type=float, default=0.1, help="evaluation fraction per class")
            p.add_argument("--class-pair", type=_class_pair, default=None, help="fixed pair 'a,b'; random per trial if omitted")
        common(p)
    return parser


def _resolve_out(args) -> Path | None:
    if args.out:
        return Path(args.out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base:
        suffix = ".json" if args.command == "rmt-check" else ".csv"
        return Path(base) / f"{args.command}{suffix}"
    return None


def _echo_config(config: dict) -> None:
    print("config: " + json.dumps(config, sort_keys=True), file=sys.stderr)


def _emit(out: Path | None, columns, rows, summary: dict) -> None:
    text = harness.dump_json(summary)
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    if columns is not None:
        harness.write_csv(out, columns, rows)
        out.with_suffix(".json").write_text(text)
        print(f"wrote {out} and {out.with_suffix('.json')}", file=sys.stderr)
    else:
        out.write_text(text)
        print(f"wrote {out}", file=sys.stderr)


def _simulate(args, mode: str) -> int:
    cfg = ExperimentConfig(
        dimension=args.dim,
        n_samples=args.n,
        class_count=args.classes if mode == "power" else 2,
        trials=args.trials,
        master_seed=args.seed,
        mean_scale=args.mean_scale,
        mode=mode,
        output_path=str(_resolve_out(args)) if _resolve_out(args) else None,
        workers=args.workers,
    )
    config = {k: v for k, v in vars(cfg).items() if k != "workers"}
    _echo_config(config)
    if mode == "power":
        records = harness.run_power_simulation(cfg)
        columns, rows = harness.POWER_COLUMNS, harness.power_rows(records)
    else:
        records = harness.run_error_simulation(cfg)
        columns, rows = harness.ERROR_COLUMNS, harness.error_rows(records)
    summary = harness.summarize(records)
    summary.update(gamma=cfg.gamma, seed=cfg.master_seed, config=config)
    _emit(_resolve_out(args), columns, rows, summary)
    return 0


def _rmt_check(args) -> int:
    d, n = args.dim, args.n
    if not 1 <= d < n:
        raise ConfigError("need 1 <= dim < n")
    config = {"dim": d, "n": n, "classes": args.classes, "seed": args.seed}
    _echo_config(config)
    law = MpLaw(d / n)
    pooled = pooled_covariance_spectrum(d, n, args.classes, args.seed)
    plain = wishart_spectrum(d, n, args.seed)
    s_max, s_min = extreme_singular_check(n, d, args.seed)
    q1, q2 = quadratic_form_check(d, n, args.classes, args.seed)
    root = np.sqrt(law.gamma)
    summary = {
        "config": config,
        "gamma": law.gamma,
        "ks_pooled": ks_distance(pooled, law),
        "ks_wishart": ks_distance(plain, law),
        "min_eigenvalue": float(pooled.eigenvalues[0]),
        "max_eigenvalue": float(pooled.eigenvalues[-1]),
        "mp_support": list(law.support),
        "sigma_max_ratio": s_max,
        "sigma_min_ratio": s_min,
        "sigma_limits": [1.0 + root, 1.0 - root],
        "q1": q1,
        "q2": q2,
        "q_limits": [1.0 / (1.0 - law.gamma), 1.0 / (1.0 - law.gamma) ** 3],
    }
    _emit(_resolve_out(args), None, None, summary)
    return 0


def _curves(args) -> int:
    if args.lambda_max <= 0 or args.lambda_points < 1:
        raise ConfigError("lambda-max must be positive and lambda-points at least 1")
    gammas = args.gammas if isinstance(args.gammas, list) else _float_list(args.gammas)
    grid = np.linspace(args.lambda_max / args.lambda_points, args.lambda_max, args.lambda_points)
    config = {"gammas": gammas, "lambda_max": args.lambda_max, "lambda_points": args.lambda_points}
    _echo_config(config)
    rows = harness.emit_bound_curves(gammas, grid)
    out = _resolve_out(args)
    table = [[r[c] for c in harness.CURVE_COLUMNS] for r in rows]
    if out is None:
        harness.write_csv_stream(sys.stdout, harness.CURVE_COLUMNS, table)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        harness.write_csv(out, harness.CURVE_COLUMNS, table)
        print(f"wrote {out}", file=sys.stderr)
    return 0


def _dataset(args, kind: str) -> int:
    config = {
        "csv": args.csv,
        "label_column": args.label_column,
        "delimiter": args.delimiter,
        "header": not args.no_header,
        "trials": args.trials,
        "seed": args.seed,
    }
    if kind == "error":
        config.update(holdout=args.holdout, class_pair=args.class_pair)
    _echo_config(config)
    try:
        data = harness.load_csv_dataset(
            args.csv, args.label_column, args.delimiter, header=not args.no_header
        )
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if kind == "power":
        result = harness.run_real_data_power(data, args.trials, args.seed, workers=args.workers)
        records = result.records
        columns, rows = harness.POWER_COLUMNS, harness.power_rows(records)
        extra = {
            "gamma": result.gamma,
            "per_class": result.per_class,
            "population_lambdas": list(result.population_lambdas),
        }
    else:
        records = harness.run_real_data_error(
            data, args.trials, args.holdout, args.seed, args.class_pair, workers=args.workers
        )
        columns, rows = harness.ERROR_COLUMNS, harness.error_rows(records)
        extra = {"gamma": 0.5, "class_pairs": [list(r.classes) for r in records if r.classes]}
    summary = harness.summarize(records)
    summary.update(extra, seed=args.seed, config=config, dimension=data.dimension,
                   class_count=data.class_count)
    _emit(_resolve_out(args), columns, rows, summary)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "simulate-power": lambda: _simulate(args, "power"),
        "simulate-error": lambda: _simulate(args, "error"),
        "rmt-check": lambda: _rmt_check(args),
        "curves": lambda: _curves(args),
        "dataset-power": lambda: _dataset(args, "power"),
        "dataset-error": lambda: _dataset(args, "error"),
    }
    try:
        return handlers[args.command]()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
