#!/usr/bin/env python3
"""From live evaluation to a replayable trace.

Creates feature caches on disk for three toy backbones, evaluates them
live (wall-clock timing, real classifier fits), saves the emitted trace,
and then replays a search from that trace, confirming the replay sees
exactly what the live run measured.  Also shows per-class subsampling for
carving low-data training splits.
"""

import tempfile
from pathlib import Path

import numpy as np

from backpick import (
    BackboneRecord,
    FeatureCache,
    Registry,
    Split,
    budgeted_search,
    live_backend,
    load_trace,
    replay_backend,
    save_feature_cache,
    save_trace,
    subsample_per_class,
)
from backpick.sampling import make_permutation

workdir = Path(tempfile.mkdtemp(prefix="backpick-demo-"))
rng = np.random.default_rng(0)


def synthetic_cache(backbone_id: str, separation: float) -> FeatureCache:
    """Two-class blobs; larger separation means an easier problem."""
    d = 32

    def split(n_per_class):
        xs, ys = [], []
        for cls in range(2):
            center = np.zeros(d)
            center[0] = separation * (1 if cls else -1)
            xs.append(center + rng.normal(size=(n_per_class, d)))
            ys.append(np.full(n_per_class, cls))
        return Split(np.vstack(xs).astype(np.float32),
                     np.concatenate(ys).astype(np.int32))

    return FeatureCache(
        backbone_id=backbone_id, feature_dim=d, class_count=2,
        splits={"train": split(10), "val": split(25), "test": split(25)},
    )


pool = Registry(tuple(
    BackboneRecord(id=name, param_count=count, pretrain_dataset="toy",
                   pretrain_dataset_size=1000, feature_dim=32, source="demo")
    for name, count in [("clean-backbone", 30), ("noisy-backbone", 20), ("weak-backbone", 10)]
))
separations = {"clean-backbone": 2.0, "noisy-backbone": 0.8, "weak-backbone": 0.3}
for name, sep in separations.items():
    save_feature_cache(synthetic_cache(name, sep), workdir / "caches" / name)

# Live pass: fits real classifiers and measures wall time per backbone.
live = live_backend(cache_root=workdir / "caches", registry=pool)
order = make_permutation("random", pool, seed=7)
live_outcome = budgeted_search(order, live, "nearest_centroid", t_max=60.0)
save_trace(live.emitted_trace, workdir / "recorded.jsonl")
print(f"live search evaluated {live_outcome.k} backbones, "
      f"selected {live_outcome.selected} in {live_outcome.budget_used_seconds * 1e3:.1f} ms")

# Replay pass: identical metrics, simulated time, no classifier runs.
recorded = load_trace(workdir / "recorded.jsonl", pool)
replayed_outcome = budgeted_search(order, replay_backend(recorded), "nearest_centroid", 60.0)
assert replayed_outcome.evaluations == live_outcome.evaluations
assert replayed_outcome.selected == live_outcome.selected
print("replaying the recorded trace reproduces the live search exactly")

# Low-data splits: keep 3 indices per class from a label file.
labels = [0] * 40 + [1] * 40
keep = subsample_per_class(labels, 3, seed=123)
print(f"subsampled {len(keep)} of {len(labels)} indices: {keep}")
print(f"\nartifacts left in {workdir} (caches/, recorded.jsonl)")
