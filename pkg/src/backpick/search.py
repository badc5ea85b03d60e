"""Budget-constrained backbone search over an evaluation backend.

A backend answers one question: given a backbone id and an evaluator name,
what are its validation metric, test metric, and cost in seconds?  Replay
backends answer from a recorded trace with simulated time; live backends
run the classifier on a feature cache and measure wall time, recording
every evaluation so the run can be replayed later.

The budgeted search walks a permutation, spends the reported costs against
the budget, and stops before the first evaluation whose cost would push the
running total past ``t_max``.  The selected backbone maximizes the
validation metric over what was evaluated; ties go to the earliest
position.  A search that completes zero evaluations selects nothing rather
than falling back to a default, since silent fallbacks would corrupt the
downstream curves.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

from .classifiers import (
    LogregConfig,
    _centroids,
    _fit_logreg,
    _predict_knn,
    _predict_logreg,
    _predict_nc,
)
from .core import DataError, EvalTrace, FeatureCache, Registry, SearchOutcome, TraceEntry, load_feature_cache
from .sampling import Permutation

import numpy as np


class Evaluation(NamedTuple):
    val_metric: float
    test_metric: float
    tau_seconds: float


@dataclass
class BudgetClock:
    """Accounting for spent budget; simulated clocks advance only by reported costs."""

    mode: str  # "simulated" | "wall"
    elapsed_seconds: float = 0.0

    def advance(self, seconds: float) -> None:
        if seconds < 0:
            raise ValueError("cannot advance a clock backwards")
        self.elapsed_seconds += seconds


class ReplayBackend:
    """Deterministic lookups into a recorded trace."""

    simulated = True

    def __init__(self, trace: EvalTrace):
        self._trace = trace

    def evaluate(self, backbone_id: str, evaluator: str) -> Evaluation:
        entry = self._trace.get(backbone_id, evaluator)
        if entry is None:
            raise DataError(
                f"missing trace entry for backbone {backbone_id!r} / evaluator {evaluator!r}"
            )
        return Evaluation(entry.val_metric, entry.test_metric, entry.tau_seconds)


def replay_backend(trace: EvalTrace) -> ReplayBackend:
    return ReplayBackend(trace)


class LiveBackend:
    """Runs classifiers on feature caches and measures wall time.

    Evaluations are serialized with a lock (timing assumes exclusive
    execution) and memoized per (backbone, evaluator), so repeat queries
    return the recorded numbers instead of re-running.  Every fresh
    evaluation is appended to an emitted trace for later replay.

    Caches come either from ``caches`` (a prebuilt mapping) or lazily from
    ``cache_root/{backbone_id}/``.  Measured cost covers cache load, one
    classifier fit, and both split evaluations; with
    ``tau_includes_extraction`` the download and extraction seconds
    recorded in the cache metadata are added on top.
    """

    simulated = False

    def __init__(
        self,
        caches: Mapping[str, FeatureCache] | None = None,
        cache_root: str | Path | None = None,
        registry: Registry | None = None,
        cfg: LogregConfig = LogregConfig(),
        tau_includes_extraction: bool = False,
    ):
        if caches is None and cache_root is None:
            raise ValueError("need either caches or cache_root")
        self._caches = dict(caches) if caches is not None else None
        self._cache_root = Path(cache_root) if cache_root is not None else None
        self._registry = registry
        self._cfg = cfg
        self._tau_includes_extraction = tau_includes_extraction
        self._memo: dict[tuple[str, str], Evaluation] = {}
        self._emitted: list[TraceEntry] = []
        self._lock = threading.Lock()

    def evaluate(self, backbone_id: str, evaluator: str) -> Evaluation:
        with self._lock:
            key = (backbone_id, evaluator)
            cached = self._memo.get(key)
            if cached is not None:
                return cached

            start = time.perf_counter()
            cache = self._load_cache(backbone_id)
            val_acc, test_acc = _evaluate_cache(cache, evaluator, self._cfg)
            tau = time.perf_counter() - start
            if self._tau_includes_extraction:
                tau += cache.extraction_seconds
            tau = max(tau, 1e-9)  # tau must stay positive for the trace format

            result = Evaluation(val_acc, test_acc, tau)
            self._memo[key] = result
            self._emitted.append(
                TraceEntry(
                    backbone_id=backbone_id,
                    evaluator=evaluator,
                    tau_seconds=tau,
                    val_metric=val_acc,
                    test_metric=test_acc,
                )
            )
            return result

    def _load_cache(self, backbone_id: str) -> FeatureCache:
        if self._caches is not None:
            cache = self._caches.get(backbone_id)
            if cache is None:
                raise DataError(f"missing feature cache for backbone {backbone_id!r}")
            return cache
        directory = self._cache_root / backbone_id
        if not directory.is_dir():
            raise DataError(f"missing feature cache for backbone {backbone_id!r} at {directory}")
        return load_feature_cache(directory, self._registry)

    @property
    def emitted_trace(self) -> EvalTrace:
        with self._lock:
            return EvalTrace(tuple(self._emitted))


def live_backend(
    caches: Mapping[str, FeatureCache] | None = None,
    cache_root: str | Path | None = None,
    registry: Registry | None = None,
    cfg: LogregConfig = LogregConfig(),
    tau_includes_extraction: bool = False,
) -> LiveBackend:
    return LiveBackend(caches, cache_root, registry, cfg, tau_includes_extraction)


def _evaluate_cache(cache: FeatureCache, evaluator: str, cfg: LogregConfig) -> tuple[float, float]:
    """Fit once on the train split, score the val and test splits."""
    train = cache.splits["train"]
    val = cache.splits["val"]
    test = cache.splits["test"]
    train_x = np.asarray(train.features, dtype=np.float64)
    train_y = train.labels.astype(np.int64)
    val_x = np.asarray(val.features, dtype=np.float64)
    test_x = np.asarray(test.features, dtype=np.float64)
    c = cache.class_count  # coverage and ranges were validated on load

    if evaluator == "logreg":
        weights = _fit_logreg(train_x, train_y, c, cfg)
        val_pred = _predict_logreg(weights, val_x)
        test_pred = _predict_logreg(weights, test_x)
    elif evaluator == "nearest_centroid":
        centroids = _centroids(train_x, train_y, c)
        val_pred = _predict_nc(val_x, centroids)
        test_pred = _predict_nc(test_x, centroids)
    elif evaluator == "knn5":
        if train_x.shape[0] < 5:
            raise ValueError(f"need at least 5 train rows for knn5, got {train_x.shape[0]}")
        val_pred = _predict_knn(train_x, train_y, val_x, 5, c)
        test_pred = _predict_knn(train_x, train_y, test_x, 5, c)
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}")

    val_acc = float(np.mean(val_pred == val.labels.astype(np.int64)))
    test_acc = float(np.mean(test_pred == test.labels.astype(np.int64)))
    return val_acc, test_acc


def budgeted_search(
    perm: Permutation, backend, evaluator: str, t_max: float
) -> SearchOutcome:
    """Evaluate along the permutation until the next cost would overrun t_max.

    The stopping rule is prefix-based: evaluation stops at the first
    backbone whose cost does not fit, even if a later, cheaper one would.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if len(perm) == 0:
        raise DataError("cannot search an empty permutation")

    clock = BudgetClock("simulated" if backend.simulated else "wall")
    evaluations: list[tuple[str, float]] = []
    best_id: str | None = None
    best_val = -1.0
    for backbone_id in perm.order:
        result = backend.evaluate(backbone_id, evaluator)
        if clock.elapsed_seconds + result.tau_seconds > t_max:
            break
        clock.advance(result.tau_seconds)
        evaluations.append((backbone_id, result.val_metric))
        if result.val_metric > best_val:
            best_id = backbone_id
            best_val = result.val_metric
    return SearchOutcome(
        selected=best_id,
        k=len(evaluations),
        budget_used_seconds=clock.elapsed_seconds,
        evaluations=tuple(evaluations),
    )


def exhaustive_search(registry: Registry, backend, evaluator: str) -> SearchOutcome:
    """Evaluate the whole pool; the argmax here is the search upper bound."""
    clock = BudgetClock("simulated" if backend.simulated else "wall")
    evaluations: list[tuple[str, float]] = []
    best_id: str | None = None
    best_val = -1.0
    for backbone_id in registry.ids:
        result = backend.evaluate(backbone_id, evaluator)
        clock.advance(result.tau_seconds)
        evaluations.append((backbone_id, result.val_metric))
        if result.val_metric > best_val:
            best_id = backbone_id
            best_val = result.val_metric
    return SearchOutcome(
        selected=best_id,
        k=len(evaluations),
        budget_used_seconds=clock.elapsed_seconds,
        evaluations=tuple(evaluations),
    )
