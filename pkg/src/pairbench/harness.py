"""Monte Carlo benchmark: simulated sessions, checkpointed Bradley-Terry
refits, aggregation with bootstrap intervals and CSV export."""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgumentError, PairbenchError, UndefinedCorrelationError
from .metrics import bootstrap_ci, is_constant, pearson, rmse_aligned, spearman
from .model import fit_bt
from .observer import GroundTruth, generate_ground_truth, simulate_comparison
from .samplers import KINDS, make_sampler

__all__ = [
    "ExperimentConfig",
    "CheckpointSchedule",
    "MetricPoint",
    "MetricSeries",
    "METRICS",
    "CSV_HEADER",
    "checkpoint_schedule",
    "evaluate_scores",
    "run_repeat",
    "run_experiment",
    "export_results",
    "read_results",
    "load_config",
]

log = logging.getLogger(__name__)

METRICS = ("pcc", "rmse", "rocc")
CSV_HEADER = ("sampler", "n", "sigma_max", "epsilon", "comparisons", "metric",
              "mean", "ci_lo", "ci_hi", "repeats_valid")

# spawn-key tags keeping the random substreams of one seed disjoint
_TRUTH, _SESSION, _BOOTSTRAP = 0, 1, 2


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 16
    sigma_max: float = 0.7
    epsilon: float = 0.1
    samplers: tuple[str, ...] = KINDS
    trials: int = 15
    repeats: int = 100
    seed: int = 0
    prior_strength: float = 0.1
    out: str | None = None

    def __post_init__(self):
        samplers = self.samplers
        if isinstance(samplers, str):
            samplers = tuple(s.strip() for s in samplers.split(",") if s.strip())
        object.__setattr__(self, "samplers", tuple(samplers))
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgumentError("n must be an integer >= 2")
        if not self.sigma_max > 0:
            raise InvalidArgumentError("sigma_max must be positive")
        if not 0.0 <= self.epsilon <= 0.5:
            raise InvalidArgumentError("epsilon must lie in [0, 0.5]")
        if not self.samplers:
            raise InvalidArgumentError("at least one sampler is required")
        unknown = [s for s in self.samplers if s not in KINDS]
        if unknown:
            raise InvalidArgumentError(f"unknown sampler(s) {unknown}; choose from {KINDS}")
        if len(set(self.samplers)) != len(self.samplers):
            raise InvalidArgumentError("duplicate sampler names")
        if self.trials < 0:
            raise InvalidArgumentError("trials must be >= 0")
        if self.repeats < 1:
            raise InvalidArgumentError("repeats must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")
        if self.prior_strength < 0:
            raise InvalidArgumentError("prior_strength must be >= 0")

    @property
    def schedule(self) -> "CheckpointSchedule":
        return checkpoint_schedule(self.n, self.trials)


_CONFIG_TYPES = {"n": int, "sigma_max": float, "epsilon": float, "samplers": str,
                 "trials": int, "repeats": int, "seed": int, "prior_strength": float,
                 "out": str}


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a flat ``key = value`` file; ``overrides`` that are not None win.

    Keys may use dashes or underscores; ``#`` starts a comment.
    """
    values = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgumentError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "jobs":
                continue
            if key not in _CONFIG_TYPES:
                raise InvalidArgumentError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_TYPES[key](value)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class CheckpointSchedule:
    budget: int
    interval: int
    checkpoints: tuple[int, ...]


def checkpoint_schedule(n: int, trials: int) -> CheckpointSchedule:
    """BT refits every ``n(n-1)/8`` comparisons (rounded half up, at least 1)
    over a budget of ``trials`` round robins."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError("n must be an integer >= 2")
    if int(trials) != trials or trials < 0:
        raise InvalidArgumentError("trials must be a non-negative integer")
    budget = int(trials) * n * (n - 1) // 2
    interval = max(1, math.floor(n * (n - 1) / 8 + 0.5))
    return CheckpointSchedule(budget, interval,
                              tuple(range(interval, budget + 1, interval)))


class MetricPoint(NamedTuple):
    comparisons: int
    pcc: float
    rocc: float
    rmse: float


@dataclass
class MetricSeries:
    """Per-checkpoint means and 95% bootstrap intervals for one sampler."""

    sampler: str
    n: int
    sigma_max: float
    epsilon: float
    repeats: int
    comparisons: np.ndarray
    mean: dict[str, np.ndarray] = field(default_factory=dict)
    ci_lo: dict[str, np.ndarray] = field(default_factory=dict)
    ci_hi: dict[str, np.ndarray] = field(default_factory=dict)
    valid: dict[str, np.ndarray] = field(default_factory=dict)

    def final(self, metric: str) -> float:
        return float(self.mean[metric][-1])


def _streams(seed: int, repeat: int, kind: str):
    truth = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_TRUTH, repeat)))
    observer, sampler = np.random.SeedSequence(
        seed, spawn_key=(_SESSION, repeat, KINDS.index(kind))).spawn(2)
    return truth, np.random.default_rng(observer), np.random.default_rng(sampler)


def evaluate_scores(scores, truth) -> tuple[float, float, float]:
    """(PCC, ROCC, aligned RMSE) of fitted scores; NaN marks an undefined value.

    A constant fit makes the whole checkpoint missing.
    """
    nan = float("nan")
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if is_constant(scores):
        return nan, nan, nan
    try:
        pcc = pearson(scores, truth)
        rocc = spearman(scores, truth)
    except (UndefinedCorrelationError, InvalidArgumentError):
        pcc = rocc = nan
    rmse = rmse_aligned(scores, truth) if scores.size >= 4 else nan
    return pcc, rocc, rmse


def run_repeat(config: ExperimentConfig, kind: str, repeat: int,
               truth: GroundTruth | None = None) -> list[MetricPoint]:
    """Simulate one session of ``kind`` and return one point per checkpoint."""
    truth_rng, observer_rng, sampler_rng = _streams(config.seed, repeat, kind)
    if truth is None:
        truth = generate_ground_truth(config.n, config.sigma_max, truth_rng, config.epsilon)
    schedule = config.schedule
    sampler = make_sampler(kind, config.n, sampler_rng)
    wins = np.zeros((config.n, config.n), dtype=np.int64)
    checkpoints = set(schedule.checkpoints)
    points = []
    for used in range(1, schedule.budget + 1):
        pair = sampler.next_pair()
        outcome = simulate_comparison(truth, pair.i, pair.j, observer_rng)
        sampler.record_outcome(outcome)
        wins[outcome.winner, outcome.loser] += 1
        if used in checkpoints:
            scores = fit_bt(wins, config.prior_strength)
            points.append(MetricPoint(used, *evaluate_scores(scores, truth.scores)))
    return points


def _run_task(args):
    config, kind, repeat = args
    try:
        return kind, repeat, run_repeat(config, kind, repeat)
    except PairbenchError as exc:
        raise PairbenchError(f"{kind} repeat {repeat} failed: {exc}") from exc


def _default_jobs() -> int:
    return int(os.environ.get("PAIRBENCH_JOBS", "1"))


def run_experiment(config: ExperimentConfig, jobs: int | None = None) -> list[MetricSeries]:
    """Run every (sampler, repeat) session and aggregate per checkpoint.

    Sessions are independent and may run in ``jobs`` worker processes; the
    result does not depend on ``jobs`` or on execution order.
    """
    jobs = _default_jobs() if jobs is None else int(jobs)
    if jobs < 1:
        raise InvalidArgumentError("jobs must be >= 1")
    tasks = [(config, kind, r) for kind in config.samplers for r in range(config.repeats)]
    if jobs == 1:
        results = list(map(_run_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    by_kind: dict[str, dict[int, list[MetricPoint]]] = {k: {} for k in config.samplers}
    for kind, repeat, points in results:
        by_kind[kind][repeat] = points
    log.info("finished %d sessions", len(results))
    return [_aggregate(config, kind, by_kind[kind]) for kind in config.samplers]


def _aggregate(config, kind, per_repeat) -> MetricSeries:
    comparisons = np.array(config.schedule.checkpoints, dtype=np.int64)
    series = MetricSeries(kind, config.n, config.sigma_max, config.epsilon,
                          config.repeats, comparisons)
    # rows: repeats in index order; columns: checkpoints
    table = np.array([[tuple(p)[1:] for p in per_repeat[r]] for r in range(config.repeats)],
                     dtype=float).reshape(config.repeats, comparisons.size, 3)
    for m_idx, metric in enumerate(("pcc", "rocc", "rmse")):
        values = table[:, :, m_idx]
        mean = np.full(comparisons.size, np.nan)
        lo, hi = mean.copy(), mean.copy()
        valid = np.sum(~np.isnan(values), axis=0)
        for c in range(comparisons.size):
            col = values[:, c]
            col = col[~np.isnan(col)]
            if col.size == 0:
                continue
            mean[c] = col.mean()
            rng = np.random.default_rng(np.random.SeedSequence(
                config.seed, spawn_key=(_BOOTSTRAP, KINDS.index(kind), c, m_idx)))
            lo[c], hi[c] = bootstrap_ci(col, 0.95, 1000, rng)
        series.mean[metric], series.ci_lo[metric], series.ci_hi[metric] = mean, lo, hi
        series.valid[metric] = valid
    return series


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "" if math.isnan(x) else f"{x:.6g}"


def export_results(series: list[MetricSeries], path) -> Path:
    """Write aggregated series as a long-format CSV (one row per sampler,
    checkpoint and metric)."""
    if not series:
        raise InvalidArgumentError("nothing to export")
    rows = []
    for s in series:
        for c, comp in enumerate(s.comparisons):
            for metric in METRICS:
                rows.append((s.sampler, s.n, s.sigma_max, s.epsilon, int(comp), metric,
                             s.mean[metric][c], s.ci_lo[metric][c], s.ci_hi[metric][c],
                             int(s.valid[metric][c])))
    rows.sort(key=lambda r: (r[0], r[4], r[5]))
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path) -> list[dict]:
    """Parse a results CSV; empty numeric fields become NaN."""
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidArgumentError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            rec = {"sampler": row["sampler"], "metric": row["metric"],
                   "n": int(row["n"]), "comparisons": int(row["comparisons"]),
                   "repeats_valid": int(row["repeats_valid"])}
            for key in ("sigma_max", "epsilon", "mean", "ci_lo", "ci_hi"):
                rec[key] = float(row[key]) if row[key] else float("nan")
            out.append(rec)
    return out

