#!/usr/bin/env python3
"""Walk through one budgeted backbone search, step by step.

A recorded trace plays the role of a past evaluation campaign: for each
backbone we know how long its evaluation took (tau) and what validation
and test accuracy came out.  Replaying it lets us ask "what would a search
under budget t have picked?" without re-running anything.
"""

from backpick import (
    BackboneRecord,
    EvalTrace,
    Permutation,
    Registry,
    TraceEntry,
    budgeted_search,
    exhaustive_search,
    replay_backend,
)

# A pool of five backbones: evaluation cost grows with model size, but the
# best validation score sits in the middle of the pool.
pool = Registry(
    tuple(
        BackboneRecord(id=name, param_count=params, pretrain_dataset=dataset,
                       pretrain_dataset_size=size, feature_dim=512, source="demo")
        for name, params, dataset, size in [
            ("tiny-conv", 4_000_000, "photos", 1_200_000),
            ("small-vit", 22_000_000, "web-crawl", 400_000_000),
            ("base-conv", 89_000_000, "photos", 1_200_000),
            ("base-vit", 86_000_000, "web-crawl", 400_000_000),
            ("giant-vit", 632_000_000, "web-crawl", 400_000_000),
        ]
    )
)

trace = EvalTrace(
    tuple(
        TraceEntry(backbone_id=name, evaluator="logreg", tau_seconds=tau,
                   val_metric=val, test_metric=test)
        for name, tau, val, test in [
            ("tiny-conv", 12.0, 0.61, 0.60),
            ("small-vit", 35.0, 0.83, 0.81),
            ("base-conv", 70.0, 0.74, 0.72),
            ("base-vit", 95.0, 0.88, 0.86),
            ("giant-vit", 240.0, 0.86, 0.87),
        ]
    )
)

backend = replay_backend(trace)
order = Permutation(pool.ids)  # evaluate in registry order for this demo

print("budget sweep (evaluation order: " + ", ".join(order.order) + ")")
print(f"{'t_max':>8}  {'k':>2}  {'selected':<12} {'val':>5}  {'spent':>7}")
for t_max in (10, 50, 120, 250, 500):
    outcome = budgeted_search(order, backend, "logreg", t_max)
    if outcome.selected is None:
        print(f"{t_max:>8}  {outcome.k:>2}  {'(nothing fits)':<12}")
        continue
    val = dict(outcome.evaluations)[outcome.selected]
    print(f"{t_max:>8}  {outcome.k:>2}  {outcome.selected:<12} {val:>5.2f}  {outcome.budget_used_seconds:>7.1f}")

full = exhaustive_search(pool, backend, "logreg")
print(f"\nexhaustive search: {full.selected} after {full.budget_used_seconds:.0f}s "
      f"over all {full.k} backbones")
print("note how small budgets settle for early backbones, and how the")
print("selection is frozen once the next evaluation no longer fits.")
