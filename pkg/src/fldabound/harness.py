"""Monte Carlo and real-data evaluation of the FLDA generalization bounds.

Every trial draws from its own random stream derived from
``(master_seed, trial_index)``, so results do not depend on how trials are
scheduled across workers.  Records are always returned in trial order.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from ._random import derive_rng, derive_seed
from .bounds import error_upper_bound, normal_cdf, power_lower_bound
from .flda import (
    bayes_error,
    delta_factors,
    fit_flda,
    generalization_error,
    simultaneous_diagonalize,
)
from .kernels import RANK_TOL
from .problem import (
    HomoscedasticGaussianProblem,
    LabeledDataset,
    estimate_scatters,
    random_problem,
    sample_dataset,
)

log = logging.getLogger(__name__)

#: Slack used when deciding whether a realized value respects its bound.
HOLD_TOL = 1e-8

POWER_COLUMNS = ("trial", "component", "lambda", "delta_lambda", "bound", "flag")
ERROR_COLUMNS = ("trial", "p_bayes", "p_gen", "p_bound", "flag")
CURVE_COLUMNS = ("gamma", "lambda", "power_bound", "p_bayes", "error_bound")

MODES = ("power", "error", "rmt", "curves")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int
    n_samples: int
    class_count: int = 5
    trials: int = 1000
    master_seed: int = 0
    mean_scale: float = 1.0
    mode: str = "power"
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dimension < 1:
            raise ConfigError("dimension must be positive")
        if self.n_samples <= self.dimension:
            raise ConfigError(f"need N > D, got N={self.n_samples}, D={self.dimension}")
        if self.class_count < 2:
            raise ConfigError("class_count must be at least 2")
        if self.mode in ("power", "error") and self.n_samples % self.class_count:
            raise ConfigError(
                f"N={self.n_samples} is not a multiple of class_count={self.class_count}"
            )
        if self.mode == "error" and self.class_count != 2:
            raise ConfigError("error mode is binary: class_count must be 2")
        if self.mode == "power" and self.dimension < self.class_count:
            raise ConfigError("dimension must be at least class_count")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.master_seed < 0:
            raise ConfigError("seed must be non-negative")
        if not self.mean_scale > 0:
            raise ConfigError("mean_scale must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @property
    def gamma(self) -> float:
        return self.dimension / self.n_samples

    @property
    def per_class(self) -> int:
        return self.n_samples // self.class_count


@dataclass(frozen=True)
class PowerTrialRecord:
    """One trial's per-component (lambda, delta*lambda, bound) triples."""

    trial_index: int
    lambdas: tuple[float, ...]
    delta_lambdas: tuple[float, ...]
    bounds: tuple[float, ...]
    flag: str = ""

    def holds(self) -> list[bool]:
        return [dl >= b - HOLD_TOL for dl, b in zip(self.delta_lambdas, self.bounds)]


@dataclass(frozen=True)
class ErrorTrialRecord:
    trial_index: int
    p_bayes: float
    p_generalization: float
    p_upper_bound: float
    flag: str = ""
    classes: tuple[int, int] | None = None

    def holds(self) -> bool:
        return self.p_generalization <= self.p_upper_bound + HOLD_TOL


def _run_trials(fn: Callable[[int], object], trials: int, workers: int) -> list:
    if workers == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(fn, range(trials)))
    return sorted(results, key=lambda r: r.trial_index)


def _flag(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


def _power_record(
    trial: int, population: HomoscedasticGaussianProblem, data: LabeledDataset, gamma: float
) -> PowerTrialRecord:
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        est = estimate_scatters(data)
    factors = delta_factors(population, est)
    lams = tuple(float(v) for v in factors.lambdas)
    return PowerTrialRecord(
        trial_index=trial,
        lambdas=lams,
        delta_lambdas=tuple(float(v) for v in factors.powers),
        bounds=tuple(power_lower_bound(lam, gamma) for lam in lams),
    )


def run_power_simulation(cfg: ExperimentConfig) -> list[PowerTrialRecord]:
    """Simulated discrimination-power experiment.

    Each trial draws a random problem, a training set with ``N / K`` examples
    per class, and evaluates ``delta_i * lambda_i`` against its lower bound.
    """
    if cfg.mode != "power":
        raise ConfigError("run_power_simulation needs mode='power'")

    def trial(t: int) -> PowerTrialRecord:
        seed = derive_seed(cfg.master_seed, "trial", t)
        try:
            problem = random_problem(cfg.dimension, cfg.class_count, cfg.mean_scale, seed)
            data = sample_dataset(problem, cfg.per_class, seed)
            return _power_record(t, problem, data, cfg.gamma)
        except (np.linalg.LinAlgError, ValueError, RuntimeWarning) as exc:
            log.warning("trial %d flagged: %s", t, exc)
            return PowerTrialRecord(t, (), (), (), flag=_flag(exc))

    return _run_trials(trial, cfg.trials, cfg.workers)


def run_error_simulation(cfg: ExperimentConfig) -> list[ErrorTrialRecord]:
    """Simulated binary-classification experiment with exact error rates."""
    if cfg.mode != "error":
        raise ConfigError("run_error_simulation needs mode='error'")

    def trial(t: int) -> ErrorTrialRecord:
        seed = derive_seed(cfg.master_seed, "trial", t)
        try:
            problem = random_problem(cfg.dimension, 2, cfg.mean_scale, seed)
            data = sample_dataset(problem, cfg.per_class, seed)
            est = estimate_scatters(data)
            model = fit_flda(est, 1)
            factors = delta_factors(problem, est)
            p_bayes = bayes_error(factors.lambdas[0])
            p_gen = generalization_error(
                model.projection[:, 0],
                est.class_means[0],
                est.class_means[1],
                problem.means[0],
                problem.means[1],
                problem.covariance,
            )
            return ErrorTrialRecord(t, p_bayes, p_gen, error_upper_bound(p_bayes, cfg.gamma))
        except (np.linalg.LinAlgError, ValueError) as exc:
            log.warning("trial %d flagged: %s", t, exc)
            return ErrorTrialRecord(t, math.nan, math.nan, math.nan, flag=_flag(exc))

    return _run_trials(trial, cfg.trials, cfg.workers)


def _population_from_data(data: LabeledDataset) -> HomoscedasticGaussianProblem:
    est = estimate_scatters(data)
    return HomoscedasticGaussianProblem(est.class_means, est.sample_cov)


def _stratified_indices(labels: np.ndarray, classes: Sequence[int], per_class: int, rng) -> np.ndarray:
    picks = []
    for k in classes:
        pool = np.flatnonzero(labels == k)
        if pool.size < per_class:
            raise ValueError(f"class {k} has {pool.size} examples, need {per_class}")
        picks.append(np.sort(rng.choice(pool, size=per_class, replace=False)))
    return np.concatenate(picks)


@dataclass
class RealPowerResult:
    """Records of a real-data power run plus the realized sampling ratio."""

    records: list[PowerTrialRecord]
    gamma: float
    per_class: int
    population_lambdas: tuple[float, ...] = field(default_factory=tuple)


def run_real_data_power(
    data: LabeledDataset, trials: int, master_seed: int, workers: int = 1
) -> RealPowerResult:
    """Discrimination-power experiment treating the full dataset as the population.

    Every trial subsamples ``floor(2D / K)`` examples per class without
    replacement, so the realized ``gamma = D / N`` is at least 0.5.
    """
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    k, d = data.class_count, data.dimension
    per_class = (2 * d) // k
    if per_class < 2:
        raise ConfigError(f"2D/K = {2 * d}/{k} leaves fewer than 2 examples per class")
    short = [i for i, n in enumerate(data.class_sizes) if n < per_class]
    if short:
        raise ConfigError(f"classes {short} have fewer than {per_class} examples")
    n_train = per_class * k
    if n_train <= d:
        raise ConfigError(f"subsample size N={n_train} does not exceed D={d}")
    gamma = d / n_train
    population = _population_from_data(data)
    pop_lams = tuple(float(v) for v in population_lambdas(population))

    def trial(t: int) -> PowerTrialRecord:
        rng = derive_rng(master_seed, "real-power", t)
        try:
            idx = _stratified_indices(data.labels, range(k), per_class, rng)
            return _power_record(t, population, data.subset(idx), gamma)
        except (np.linalg.LinAlgError, ValueError, RuntimeWarning) as exc:
            log.warning("trial %d flagged: %s", t, exc)
            return PowerTrialRecord(t, (), (), (), flag=_flag(exc))

    return RealPowerResult(_run_trials(trial, trials, workers), gamma, per_class, pop_lams)


def population_lambdas(problem: HomoscedasticGaussianProblem) -> np.ndarray:
    """Nonzero population discrimination powers of ``problem``, descending."""
    sd = simultaneous_diagonalize(problem.covariance, problem.scatter)
    return sd.population_lambdas[: sd.rank(RANK_TOL)]


def _midpoint_rule_error(w: np.ndarray, m1: np.ndarray, m2: np.ndarray, x1, x2) -> float:
    # Class 1 on the side where its training mean projects; equal-prior
    # (balanced) error on the evaluation examples.
    if w @ (m1 - m2) < 0:
        w = -w
    threshold = 0.5 * float(w @ (m1 + m2))
    err1 = float(np.mean(w @ x1 <= threshold))
    err2 = float(np.mean(w @ x2 > threshold))
    return 0.5 * (err1 + err2)


def _binary_fit(data: LabeledDataset, a: int, b: int, idx: np.ndarray):
    sub = data.subset(idx)
    labels = np.where(sub.labels == a, 0, 1)
    est = estimate_scatters(LabeledDataset(sub.samples, labels))
    return fit_flda(est, 1).projection[:, 0], est.class_means[0], est.class_means[1]


def _bound_from_empirical(p_bayes: float, gamma: float) -> float:
    # A reference error of exactly zero has no finite normal quantile.
    if p_bayes <= 0.0:
        raise ValueError("degenerate holdout: reference classifier made no errors")
    return error_upper_bound(min(p_bayes, 0.5), gamma)


def run_real_data_error(
    data: LabeledDataset,
    trials: int,
    holdout_fraction: float = 0.1,
    master_seed: int = 0,
    class_pair: tuple[int, int] | None = None,
    workers: int = 1,
) -> list[ErrorTrialRecord]:
    """Binary-classification experiment on real data with an empirical "Bayes" rule.

    Per trial: pick a class pair (fixed or uniformly at random), hold out
    ``holdout_fraction`` of each class for evaluation, fit the reference
    classifier on the remainder, fit the empirical classifier on ``D``
    examples per class drawn from the remainder (``N = 2D``), and compare
    their balanced holdout errors through the error bound.  Trials whose
    reference classifier makes no holdout errors are flagged, since the
    bound needs a finite quantile of the reference error.
    """
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    if not 0.0 < holdout_fraction < 0.5:
        raise ConfigError("holdout_fraction must lie in (0, 0.5)")
    k, d = data.class_count, data.dimension
    sizes = data.class_sizes
    if class_pair is not None:
        a, b = class_pair
        if a == b or not (0 <= a < k and 0 <= b < k):
            raise ConfigError(f"invalid class pair {class_pair} for {k} classes")
        if min(sizes[a], sizes[b]) - max(1, round(holdout_fraction * min(sizes[a], sizes[b]))) < d:
            raise ConfigError(f"classes {a} and {b} are too small for N = 2D training sets")
    gamma = 0.5

    def trial(t: int) -> ErrorTrialRecord:
        rng = derive_rng(master_seed, "real-error", t)
        if class_pair is None:
            a, b = (int(v) for v in rng.choice(k, size=2, replace=False))
        else:
            a, b = class_pair
        try:
            held, rest = [], []
            for cls in (a, b):
                pool = rng.permutation(np.flatnonzero(data.labels == cls))
                n_hold = max(1, int(round(holdout_fraction * pool.size)))
                if pool.size - n_hold < d:
                    raise ValueError(
                        f"class {cls}: {pool.size - n_hold} training examples, need {d}"
                    )
                held.append(pool[:n_hold])
                rest.append(np.sort(pool[n_hold:]))
            ref = _binary_fit(data, a, b, np.concatenate(rest))
            sub = np.concatenate([np.sort(rng.choice(r, size=d, replace=False)) for r in rest])
            emp = _binary_fit(data, a, b, sub)
            x1, x2 = data.samples[:, held[0]], data.samples[:, held[1]]
            p_bayes = _midpoint_rule_error(*ref, x1, x2)
            p_gen = _midpoint_rule_error(*emp, x1, x2)
            if p_bayes <= 0.0:
                return ErrorTrialRecord(
                    t, p_bayes, p_gen, math.nan, flag="degenerate holdout: zero reference error",
                    classes=(a, b),
                )
            return ErrorTrialRecord(
                t, p_bayes, p_gen, _bound_from_empirical(p_bayes, gamma), classes=(a, b)
            )
        except (np.linalg.LinAlgError, ValueError) as exc:
            log.warning("trial %d flagged: %s", t, exc)
            return ErrorTrialRecord(t, math.nan, math.nan, math.nan, flag=_flag(exc), classes=(a, b))

    return _run_trials(trial, trials, workers)


def emit_bound_curves(gammas: Iterable[float], lambda_grid: Iterable[float]) -> list[dict]:
    """Rows of (gamma, lambda, power_bound, p_bayes, error_bound) for plotting."""
    grid = [float(v) for v in lambda_grid]
    if not grid or any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("lambda grid must be positive and strictly increasing")
    rows = []
    for gamma in gammas:
        gamma = float(gamma)
        if not 0.0 <= gamma < 1.0:
            raise ConfigError(f"gamma must lie in [0, 1), got {gamma}")
        for lam in grid:
            p_bayes = normal_cdf(-math.sqrt(lam))
            rows.append(
                {
                    "gamma": gamma,
                    "lambda": lam,
                    "power_bound": power_lower_bound(lam, gamma),
                    "p_bayes": p_bayes,
                    "error_bound": error_upper_bound(p_bayes, gamma),
                }
            )
    return rows


def load_csv_dataset(
    path, label_column: int | str = -1, delimiter: str = ",", header: bool = True
) -> LabeledDataset:
    """Read a numeric CSV with one label column into a :class:`LabeledDataset`.

    Labels (numbers or strings) become dense indices in order of first
    appearance.  Feature columns that are constant over all rows are dropped
    with a warning.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh, delimiter=delimiter), 1) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    names = None
    if header:
        _, names = rows[0]
        names = [n.strip() for n in names]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: header but no data rows")
    width = len(rows[0][1])
    if isinstance(label_column, str):
        if names is None:
            raise ValueError("label column given by name but the file has no header")
        if label_column not in names:
            raise ValueError(f"{path}: no column named {label_column!r}")
        label_idx = names.index(label_column)
    else:
        label_idx = label_column % width if -width <= label_column < width else None
        if label_idx is None:
            raise ValueError(f"label column {label_column} out of range for {width} columns")

    features, raw_labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} fields, found {len(row)}")
        values = []
        for j, cell in enumerate(row):
            if j == label_idx:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric feature {cell!r}") from None
            if not math.isfinite(values[-1]):
                raise ValueError(f"{path}:{lineno}: non-finite feature {cell!r}")
        features.append(values)
        raw_labels.append(row[label_idx].strip())

    index: dict[str, int] = {}
    labels = np.array([index.setdefault(lab, len(index)) for lab in raw_labels], dtype=np.int64)
    if len(index) < 2:
        raise ValueError(f"{path}: need at least two classes, found {len(index)}")
    x = np.array(features, dtype=float)
    if x.shape[1] == 0:
        raise ValueError(f"{path}: no feature columns")
    constant = np.all(x == x[0], axis=0)
    if np.any(constant):
        feature_names = [n for j, n in enumerate(names or []) if j != label_idx]
        dropped = [feature_names[j] if feature_names else str(j) for j in np.flatnonzero(constant)]
        warnings.warn(f"dropping constant feature columns: {', '.join(dropped)}", stacklevel=2)
        x = x[:, ~constant]
        if x.shape[1] == 0:
            raise ValueError(f"{path}: every feature column is constant")
    return LabeledDataset(x.T.copy(), labels)


def _fsum_mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else math.nan


def summarize(records: Sequence) -> dict:
    """Aggregate statistics of power or error records; independent of record order.

    Power records: fraction of (trial, component) pairs meeting the bound
    (components with zero population power are skipped) and per-component
    mean/min/max.  Error records: fraction of trials meeting the bound and
    mean/min/max of the three error rates.  Flagged records are counted but
    excluded from the statistics.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    flagged = sum(1 for r in records if r.flag)
    ok = [r for r in records if not r.flag]
    if all(isinstance(r, PowerTrialRecord) for r in records):
        width = max((len(r.lambdas) for r in ok), default=0)
        held, total = 0, 0
        components = []
        for i in range(width):
            cols = {"lambda": [], "delta_lambda": [], "bound": []}
            for r in ok:
                if i >= len(r.lambdas):
                    continue
                cols["lambda"].append(r.lambdas[i])
                cols["delta_lambda"].append(r.delta_lambdas[i])
                cols["bound"].append(r.bounds[i])
                if r.lambdas[i] > 0:
                    total += 1
                    held += r.delta_lambdas[i] >= r.bounds[i] - HOLD_TOL
            components.append(
                {
                    "component": i + 1,
                    **{f"mean_{k}": _fsum_mean(v) for k, v in cols.items()},
                    "min_delta_lambda": min(cols["delta_lambda"]),
                    "max_delta_lambda": max(cols["delta_lambda"]),
                }
            )
        return {
            "kind": "power",
            "trials": len(records),
            "flagged": flagged,
            "pairs": total,
            "holding_fraction": held / total if total else math.nan,
            "components": components,
        }
    if all(isinstance(r, ErrorTrialRecord) for r in records):
        fields = {
            "p_bayes": [r.p_bayes for r in ok],
            "p_gen": [r.p_generalization for r in ok],
            "p_bound": [r.p_upper_bound for r in ok],
        }
        held = sum(r.holds() for r in ok)
        stats = {}
        for k, v in fields.items():
            stats[f"mean_{k}"] = _fsum_mean(v)
            stats[f"min_{k}"] = min(v) if v else math.nan
            stats[f"max_{k}"] = max(v) if v else math.nan
        return {
            "kind": "error",
            "trials": len(records),
            "flagged": flagged,
            "holding_fraction": held / len(ok) if ok else math.nan,
            **stats,
        }
    raise TypeError("records must all be PowerTrialRecord or all ErrorTrialRecord")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def power_rows(records: Sequence[PowerTrialRecord]) -> list[tuple]:
    rows = []
    for r in sorted(records, key=lambda r: r.trial_index):
        if r.flag:
            rows.append((r.trial_index, "", "", "", "", r.flag))
            continue
        for i, (lam, dl, b) in enumerate(zip(r.lambdas, r.delta_lambdas, r.bounds), 1):
            rows.append((r.trial_index, i, lam, dl, b, ""))
    return rows


def error_rows(records: Sequence[ErrorTrialRecord]) -> list[tuple]:
    return [
        (r.trial_index, r.p_bayes, r.p_generalization, r.p_upper_bound, r.flag)
        for r in sorted(records, key=lambda r: r.trial_index)
    ]


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        write_csv_stream(fh, columns, rows)


def write_csv_stream(fh, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable(asdict(obj))
    return obj
