"""Curve construction, evaluator correlation, and per-class subsampling.

A selection efficiency curve answers "how good is the backbone this
strategy picks, as a function of the time budget".  Each budget on the
grid gets the median and 25th/75th percentiles of the selected backbone's
test metric across repeated seeded runs; run ``r`` uses ``base_seed + r``.
Runs that selected nothing are excluded from a budget's statistics, and a
budget where fewer than half the runs selected anything is omitted from
the curve entirely, so tiny budgets cannot produce misleading points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .core import BsecCurve, BsecPoint, DataError, EvalTrace, Registry
from .rng import Xoshiro256StarStar
from .sampling import is_stochastic, make_permutation
from .search import budgeted_search


def percentile(values, q: float) -> float:
    """Order statistic with linear interpolation between closest ranks.

    The interpolation position over ``m`` sorted values is
    ``(q / 100) * (m - 1)``, matching the default estimator of common
    scientific stacks so results cross-check directly.
    """
    data = sorted(float(v) for v in values)
    if not data:
        raise ValueError("percentile of an empty list")
    if not 0.0 <= q <= 100.0:
        raise ValueError("q must be within [0, 100]")
    position = (q / 100.0) * (len(data) - 1)
    lower = math.floor(position)
    fraction = position - lower
    if lower + 1 >= len(data):
        return data[-1]
    return data[lower] + fraction * (data[lower + 1] - data[lower])


def _mean_std(values) -> tuple[float, float]:
    m = sum(values) / len(values)
    var = sum((v - m) ** 2 for v in values) / len(values)
    return m, math.sqrt(var)


@dataclass(frozen=True)
class RunMatrix:
    """Per (budget, run) test metric of the selection; None where no selection."""

    strategy: str
    evaluator: str
    t_grid: tuple[float, ...]
    rows: tuple[tuple[float | None, ...], ...]  # rows[run][t_index]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.t_grid):
                raise ValueError("every run must cover the full budget grid")

    @property
    def n_runs(self) -> int:
        return len(self.rows)

    def column(self, t_index: int) -> list[float]:
        return [row[t_index] for row in self.rows if row[t_index] is not None]


def collect_runs(
    registry: Registry,
    backend,
    strategy_name: str,
    evaluator: str,
    t_grid,
    n_runs: int = 30,
    base_seed: int = 0,
    n_threads: int = 1,
) -> RunMatrix:
    """Run the budgeted search across seeds and budgets.

    Runs are independent, so they may execute on a thread pool; results
    are joined by run index, which keeps aggregation schedule-independent.
    """
    grid = [float(t) for t in t_grid]
    if not grid:
        raise ValueError("budget grid is empty")
    for a, b in zip(grid, grid[1:]):
        if b <= a:
            raise ValueError("budget grid must be strictly increasing")
    if grid[0] <= 0:
        raise ValueError("budgets must be positive")
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")

    stochastic = is_stochastic(strategy_name)
    shared_perm = None if stochastic else make_permutation(strategy_name, registry, base_seed)

    def one_run(run_index: int) -> tuple[float | None, ...]:
        if shared_perm is not None:
            perm = shared_perm
        else:
            perm = make_permutation(strategy_name, registry, base_seed + run_index)
        row = []
        for t_max in grid:
            outcome = budgeted_search(perm, backend, evaluator, t_max)
            if outcome.selected is None:
                row.append(None)
            else:
                row.append(backend.evaluate(outcome.selected, evaluator).test_metric)
        return tuple(row)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = tuple(pool.map(one_run, range(n_runs)))
    else:
        rows = tuple(one_run(r) for r in range(n_runs))
    return RunMatrix(strategy_name, evaluator, tuple(grid), rows)


def curve_from_runs(matrix: RunMatrix, stats: str = "median") -> BsecCurve:
    """Aggregate a run matrix into a curve.

    ``stats="median"`` emits median and 25th/75th percentiles;
    ``stats="mean"`` emits mean with a one-standard-deviation band in the
    same columns.
    """
    if stats not in ("median", "mean"):
        raise ValueError("stats must be 'median' or 'mean'")
    points = []
    for t_index, t_max in enumerate(matrix.t_grid):
        values = matrix.column(t_index)
        n_valid = len(values)
        if 2 * n_valid < matrix.n_runs:
            continue  # below 50% selection rate the point would mislead
        if stats == "median":
            mid = percentile(values, 50)
            lo = percentile(values, 25)
            hi = percentile(values, 75)
        else:
            mean, std = _mean_std(values)
            mid, lo, hi = mean, mean - std, mean + std
        points.append(
            BsecPoint(
                t_max_seconds=t_max,
                median=mid,
                p25=lo,
                p75=hi,
                n_runs=matrix.n_runs,
                n_valid_runs=n_valid,
            )
        )
    return BsecCurve(matrix.strategy, matrix.evaluator, tuple(points))


def bsec(
    registry: Registry,
    backend,
    strategy_name: str,
    evaluator: str,
    t_grid,
    n_runs: int = 30,
    base_seed: int = 0,
    n_threads: int = 1,
    stats: str = "median",
) -> BsecCurve:
    """Selection efficiency curve for one (strategy, evaluator) pair."""
    matrix = collect_runs(
        registry, backend, strategy_name, evaluator, t_grid, n_runs, base_seed, n_threads
    )
    return curve_from_runs(matrix, stats)


BSEC_CSV_HEADER = "strategy,evaluator,t_max_seconds,median,p25,p75,n_runs,n_valid_runs"


def bsec_csv(curve: BsecCurve) -> str:
    lines = [BSEC_CSV_HEADER]
    for p in curve.points:
        lines.append(
            f"{curve.strategy},{curve.evaluator},{p.t_max_seconds!r},"
            f"{p.median!r},{p.p25!r},{p.p75!r},{p.n_runs},{p.n_valid_runs}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluator correlation


@dataclass(frozen=True)
class CorrelationReport:
    """Paired validation metrics for backbones common to two traces."""

    points: tuple[tuple[str, float, float], ...]  # (backbone_id, metric_a, metric_b)
    pearson_r: float
    fraction_a_ge_b: float


def _resolve_evaluator(trace: EvalTrace, requested: str | None, which: str) -> str:
    evaluators = trace.evaluators()
    if requested is not None:
        if requested not in evaluators:
            raise DataError(f"trace {which} has no entries for evaluator {requested!r}")
        return requested
    if len(evaluators) != 1:
        raise DataError(
            f"trace {which} holds evaluators {list(evaluators)}; pick one explicitly"
        )
    return evaluators[0]


def correlate_evaluators(
    trace_a: EvalTrace,
    trace_b: EvalTrace,
    evaluator_a: str | None = None,
    evaluator_b: str | None = None,
) -> CorrelationReport:
    """Pearson correlation of validation metrics over common backbones.

    Also reports the share of backbones where side a scores at least as
    high as side b, i.e. how often the first evaluator sits on or above
    the identity line.
    """
    eval_a = _resolve_evaluator(trace_a, evaluator_a, "a")
    eval_b = _resolve_evaluator(trace_b, evaluator_b, "b")
    ids_b = set(trace_b.backbone_ids(eval_b))
    points = []
    for backbone_id in trace_a.backbone_ids(eval_a):
        if backbone_id in ids_b:
            a = trace_a.get(backbone_id, eval_a).val_metric
            b = trace_b.get(backbone_id, eval_b).val_metric
            points.append((backbone_id, a, b))
    if len(points) < 2:
        raise DataError(f"fewer than 2 common backbones ({len(points)})")

    n = len(points)
    xs = [p[1] for p in points]
    ys = [p[2] for p in points]
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    var_x = sum((x - mean_x) ** 2 for x in xs)
    var_y = sum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise DataError("correlation undefined: zero variance on one side")
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    r = cov / math.sqrt(var_x * var_y)
    r = max(-1.0, min(1.0, r))
    fraction = sum(1 for x, y in zip(xs, ys) if x >= y) / n
    return CorrelationReport(tuple(points), r, fraction)


def correlation_csv(report: CorrelationReport) -> str:
    lines = ["backbone_id,metric_a,metric_b"]
    for backbone_id, a, b in report.points:
        lines.append(f"{backbone_id},{a!r},{b!r}")
    lines.append(f"summary,{report.pearson_r!r},{report.fraction_a_ge_b!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Per-class subsampling


def subsample_per_class(labels, n_per_class: int, seed: int) -> list[int]:
    """Seeded sample of up to ``n_per_class`` indices from every class.

    Classes are visited in ascending order sharing one generator; a class
    with fewer members than requested is kept whole.  Sampling shuffles the
    class's index list (Fisher-Yates) and keeps the first ``n_per_class``.
    The result is sorted ascending.
    """
    labels = [int(v) for v in labels]
    if not labels:
        raise ValueError("labels are empty")
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    by_class: dict[int, list[int]] = {}
    for index, label in enumerate(labels):
        by_class.setdefault(label, []).append(index)

    rng = Xoshiro256StarStar(seed)
    chosen: list[int] = []
    for label in sorted(by_class):
        indices = by_class[label]
        if len(indices) <= n_per_class:
            chosen.extend(indices)
            continue
        pool = list(indices)
        rng.shuffle(pool)
        chosen.extend(pool[:n_per_class])
    return sorted(chosen)
