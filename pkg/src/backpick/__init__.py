"""Budgeted backbone selection over frozen-feature evaluations.

Pick the best pretrained backbone a time budget allows: order the pool
with a sampling strategy, spend the budget evaluating cheap or full
classifiers on frozen features (live, or replayed from recorded traces),
select the validation argmax, and summarize strategies with per-budget
efficiency curves.
"""

from .analysis import (
    CorrelationReport,
    RunMatrix,
    bsec,
    collect_runs,
    correlate_evaluators,
    curve_from_runs,
    percentile,
    subsample_per_class,
)
from .classifiers import (
    EvalResult,
    LogregConfig,
    fit_eval_knn,
    fit_eval_logreg,
    fit_eval_nearest_centroid,
    logreg_objective,
)
from .core import (
    BackboneRecord,
    BsecCurve,
    BsecPoint,
    DataError,
    EvalTrace,
    FeatureCache,
    Registry,
    SearchOutcome,
    Split,
    TraceEntry,
    load_feature_cache,
    load_registry,
    load_trace,
    save_feature_cache,
    save_registry,
    save_trace,
)
from .sampling import (
    Permutation,
    make_permutation,
    order_by_complexity,
    order_by_pretrain_size_desc,
    order_dataset_cycling,
    order_random,
    strategy_names,
)
from .search import (
    BudgetClock,
    Evaluation,
    LiveBackend,
    ReplayBackend,
    budgeted_search,
    exhaustive_search,
    live_backend,
    replay_backend,
)

__version__ = "0.1.0"

__all__ = [
    "BackboneRecord",
    "BsecCurve",
    "BsecPoint",
    "BudgetClock",
    "CorrelationReport",
    "DataError",
    "EvalResult",
    "EvalTrace",
    "Evaluation",
    "FeatureCache",
    "LiveBackend",
    "LogregConfig",
    "Permutation",
    "Registry",
    "ReplayBackend",
    "RunMatrix",
    "SearchOutcome",
    "Split",
    "TraceEntry",
    "bsec",
    "budgeted_search",
    "collect_runs",
    "correlate_evaluators",
    "curve_from_runs",
    "exhaustive_search",
    "fit_eval_knn",
    "fit_eval_logreg",
    "fit_eval_nearest_centroid",
    "live_backend",
    "load_feature_cache",
    "load_registry",
    "load_trace",
    "logreg_objective",
    "make_permutation",
    "order_by_complexity",
    "order_by_pretrain_size_desc",
    "order_dataset_cycling",
    "order_random",
    "percentile",
    "replay_backend",
    "save_feature_cache",
    "save_registry",
    "save_trace",
    "strategy_names",
    "subsample_per_class",
]
