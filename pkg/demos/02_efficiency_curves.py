#!/usr/bin/env python3
"""Compare sampling strategies with selection efficiency curves.

Builds a synthetic 60-backbone pool where one pretraining dataset group
("web-diverse", also the largest) yields clearly better features, then
sweeps a budget grid with every strategy, 30 seeded runs each.  Writes one
CSV per strategy plus an overlay SVG into demos/out/.
"""

from pathlib import Path

import numpy as np

from backpick import BackboneRecord, EvalTrace, Registry, TraceEntry, bsec, replay_backend
from backpick.analysis import bsec_csv
from backpick.core import atomic_write_text
from backpick.svgplot import render_bsec_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(11)
groups = [
    ("web-diverse", 400_000_000),
    ("photos-a", 14_000_000),
    ("photos-b", 10_000_000),
    ("drawings", 5_000_000),
    ("medical", 2_000_000),
    ("satellite", 1_000_000),
]

records, entries = [], []
for tag, size in groups:
    for i in range(10):
        name = f"{tag}-{i:02d}"
        records.append(BackboneRecord(
            id=name, param_count=int(rng.integers(1_000_000, 900_000_000)),
            pretrain_dataset=tag, pretrain_dataset_size=size,
            feature_dim=int(rng.integers(128, 1024)), source="demo"))
        if tag == "web-diverse":
            val = float(rng.uniform(0.86, 0.95))
            test = val - float(rng.uniform(0.01, 0.03))
        else:
            val = float(rng.uniform(0.30, 0.70))
            test = float(np.clip(val + rng.uniform(-0.05, 0.05), 0, 1))
        entries.append(TraceEntry(name, "logreg", float(rng.uniform(5.0, 15.0)), val, test))

pool = Registry(tuple(records))
backend = replay_backend(EvalTrace(tuple(entries)))
grid = [float(t) for t in range(10, 650, 20)]

curves = []
for strategy in ("random", "complexity-asc", "complexity-desc",
                 "pretrain-size-desc", "dataset-cycling"):
    curve = bsec(pool, backend, strategy, "logreg", grid, n_runs=30, base_seed=0)
    curves.append(curve)
    atomic_write_text(OUT / f"bsec_{strategy}.csv", bsec_csv(curve))
    first, last = curve.points[0], curve.points[-1]
    print(f"{strategy:<20} median @t={first.t_max_seconds:>4.0f}: {first.median:.3f}"
          f"   @t={last.t_max_seconds:>4.0f}: {last.median:.3f}")

atomic_write_text(OUT / "curves.svg", render_bsec_svg(curves, title="sampling strategies"))
print(f"\nwrote CSVs and {OUT / 'curves.svg'}")
print("dataset-cycling visits the strong web-diverse group first, so its")
print("curve rises immediately; complexity orderings waste budget when size")
print("does not predict quality; at full budget every curve meets the")
print("exhaustive-search plateau.")
