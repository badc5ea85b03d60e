"""Shared fixture builders and independent reference implementations.

The reference implementations here deliberately do not import from the
package internals they check: the generator is re-transliterated from the
published xoshiro256**/splitmix64 algorithms, and the search oracle
enumerates permutation prefixes by brute force.
"""

from __future__ import annotations

import numpy as np

from backpick.core import BackboneRecord, EvalTrace, Registry, TraceEntry

M64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# Reference generator (independent transliteration)


def ref_splitmix64_stream(seed, count):
    out = []
    x = seed & M64
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & M64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        out.append((z ^ (z >> 31)) & M64)
    return out


class RefXoshiro:
    def __init__(self, seed):
        self.s = ref_splitmix64_stream(seed, 4)

    def next(self):
        s = self.s

        def rotl(x, k):
            return ((x << k) & M64) | (x >> (64 - k))

        result = (rotl((s[1] * 5) & M64, 7) * 9) & M64
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result


def ref_fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & M64
    return h


def ref_shuffle(items, seed):
    """Fisher-Yates with bounded draws taken as next() % n."""
    gen = RefXoshiro(seed)
    items = list(items)
    for i in range(len(items) - 1, 0, -1):
        j = gen.next() % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


# ---------------------------------------------------------------------------
# Search oracle: brute-force prefix enumeration


def ref_prefix_search(ids, taus, vals, t_max):
    """Largest prefix whose cost sum fits, then earliest argmax of vals.

    Returns (selected_id_or_None, k, budget_used).
    """
    k = 0
    total = 0.0
    for i in range(len(ids)):
        if total + taus[i] > t_max:
            break
        total += taus[i]
        k = i + 1
    if k == 0:
        return None, 0, 0.0
    best = 0
    for i in range(1, k):
        if vals[i] > vals[best]:
            best = i
    return ids[best], k, total


def ref_percentile(values, q):
    """Sort-based order statistic with linear interpolation."""
    data = sorted(values)
    pos = (q / 100.0) * (len(data) - 1)
    lo = int(pos)
    if lo + 1 >= len(data):
        return float(data[-1])
    frac = pos - lo
    return float(data[lo] * (1 - frac) + data[lo + 1] * frac)


# ---------------------------------------------------------------------------
# Fixture builders


def make_registry(specs):
    """specs: iterable of (id, param_count, dataset, dataset_size[, feature_dim])."""
    records = []
    for spec in specs:
        bid, params, dataset, size = spec[:4]
        dim = spec[4] if len(spec) > 4 else 8
        records.append(
            BackboneRecord(
                id=bid,
                param_count=params,
                pretrain_dataset=dataset,
                pretrain_dataset_size=size,
                feature_dim=dim,
                source="fixture",
            )
        )
    return Registry(tuple(records))


def three_backbone_fixture():
    """taus 100/200/300, vals 0.5/0.9/0.7; t_max=350 must pick the second."""
    registry = make_registry(
        [("bb-a", 1_000_000, "set-x", 10), ("bb-b", 2_000_000, "set-x", 10), ("bb-c", 3_000_000, "set-y", 5)]
    )
    entries = []
    for bid, tau, val, test in [
        ("bb-a", 100.0, 0.5, 0.48),
        ("bb-b", 200.0, 0.9, 0.88),
        ("bb-c", 300.0, 0.7, 0.69),
    ]:
        entries.append(TraceEntry(bid, "logreg", tau, val, test))
    return registry, EvalTrace(tuple(entries))


def random_registry(rng, n, n_datasets=3):
    datasets = [(f"set-{chr(97 + i)}", int(rng.integers(1, 500)) * 1_000_000) for i in range(n_datasets)]
    specs = []
    for i in range(n):
        tag, size = datasets[int(rng.integers(0, n_datasets))]
        specs.append((f"bb-{i:03d}", int(rng.integers(1, 10_000)) * 1000, tag, size))
    return make_registry(specs)


def random_trace(rng, registry, evaluator="logreg", tau_lo=0.5, tau_hi=10.0):
    entries = []
    for bid in registry.ids:
        entries.append(
            TraceEntry(
                backbone_id=bid,
                evaluator=evaluator,
                tau_seconds=float(rng.uniform(tau_lo, tau_hi)),
                val_metric=float(rng.uniform(0.0, 1.0)),
                test_metric=float(rng.uniform(0.0, 1.0)),
            )
        )
    return EvalTrace(tuple(entries))


def budget_grid_for(trace, registry, perm_ids=None):
    """Budgets hitting the interesting cases: below the first cost, at exact
    prefix sums, between sums, and beyond the total."""
    ids = perm_ids if perm_ids is not None else registry.ids
    taus = [trace.get(bid, "logreg").tau_seconds for bid in ids]
    grid = [taus[0] * 0.5]
    total = 0.0
    for tau in taus:
        total += tau
        grid.append(total)  # boundary: cost sum exactly equal to the budget
        grid.append(total + 0.25)
    grid.append(total * 2)
    return grid


# ---------------------------------------------------------------------------
# Constructed study fixtures


SMOKE_GROUPS = [
    ("web-diverse", 400_000_000),
    ("photos-a", 14_000_000),
    ("photos-b", 10_000_000),
    ("drawings", 5_000_000),
    ("medical", 2_000_000),
    ("satellite", 1_000_000),
]


def smoke_fixture(seed=11):
    """60 backbones in 6 dataset groups; the 'web-diverse' group (largest
    pretraining set, so cycled first) carries clearly higher metrics."""
    rng = np.random.default_rng(seed)
    records, entries = [], []
    for tag, size in SMOKE_GROUPS:
        for i in range(10):
            bid = f"{tag}-{i:02d}"
            records.append(
                BackboneRecord(
                    id=bid,
                    param_count=int(rng.integers(1_000_000, 900_000_000)),
                    pretrain_dataset=tag,
                    pretrain_dataset_size=size,
                    feature_dim=int(rng.integers(128, 1024)),
                    source="synthetic",
                )
            )
            if tag == "web-diverse":
                val = float(rng.uniform(0.86, 0.95))
                test = val - float(rng.uniform(0.01, 0.03))
            else:
                val = float(rng.uniform(0.30, 0.70))
                test = min(1.0, max(0.0, val + float(rng.uniform(-0.05, 0.05))))
            entries.append(TraceEntry(bid, "logreg", float(rng.uniform(5.0, 15.0)), val, test))
    return Registry(tuple(records)), EvalTrace(tuple(entries))


def synthetic_embedding_suite(seed=99, n_backbones=50):
    """Fifty random embeddings of one labeled blob dataset.

    Each 'backbone' projects the base data into its own feature space with
    its own noise level, dimension, and per-dimension scaling, then both
    the centroid proxy and logistic regression score a validation split.
    Returns (nc_accuracies, logreg_accuracies, nc_seconds, logreg_seconds).
    """
    from backpick.classifiers import fit_eval_logreg, fit_eval_nearest_centroid

    rng = np.random.default_rng(seed)
    c, d0 = 5, 16
    means = rng.normal(size=(c, d0)) * 1.8
    mix = rng.normal(size=(d0, d0)) / np.sqrt(d0)
    scales = np.ones(d0)
    scales[: d0 // 4] = 1.5
    blend = mix * scales

    def draw(n_per):
        xs, ys = [], []
        for cls in range(c):
            z = rng.normal(size=(n_per, d0))
            xs.append(means[cls] + z @ blend.T)
            ys.append(np.full(n_per, cls))
        return np.vstack(xs), np.concatenate(ys)

    xtr, ytr = draw(10)
    xva, yva = draw(30)

    emb_rng = np.random.default_rng(seed + 1)
    nc_acc, lr_acc, nc_sec, lr_sec = [], [], [], []
    for _ in range(n_backbones):
        d_sig = int(emb_rng.integers(2, 32))
        sigma = float(emb_rng.uniform(0.1, 3.0))
        n_noise = int(emb_rng.integers(2, 12))
        s_noise = float(emb_rng.uniform(1.0, 5.0))
        proj = emb_rng.normal(size=(d0, d_sig)) / np.sqrt(d0)
        dim_scale = np.exp(emb_rng.normal(0.0, 1.2, size=d_sig))

        def embed(x):
            sig = (x @ proj + sigma * emb_rng.normal(size=(x.shape[0], d_sig))) * dim_scale
            noise = s_noise * emb_rng.normal(size=(x.shape[0], n_noise))
            return np.hstack([sig, noise])

        ftr, fva = embed(xtr), embed(xva)
        nc = fit_eval_nearest_centroid(ftr, ytr, fva, yva, class_count=c)
        lr = fit_eval_logreg(ftr, ytr, fva, yva, class_count=c)
        nc_acc.append(nc.accuracy)
        lr_acc.append(lr.accuracy)
        nc_sec.append(nc.fit_predict_seconds)
        lr_sec.append(lr.fit_predict_seconds)
    return np.array(nc_acc), np.array(lr_acc), np.array(nc_sec), np.array(lr_sec)


def suite_traces(nc_acc, lr_acc, nc_sec, lr_sec):
    """Wrap suite accuracies into two single-evaluator traces for pairing."""
    nc_entries, lr_entries = [], []
    for i, (nc, lr, ns, ls) in enumerate(zip(nc_acc, lr_acc, nc_sec, lr_sec)):
        bid = f"emb-{i:02d}"
        nc_entries.append(TraceEntry(bid, "nearest_centroid", max(float(ns), 1e-9), float(nc), float(nc)))
        lr_entries.append(TraceEntry(bid, "logreg", max(float(ls), 1e-9), float(lr), float(lr)))
    return EvalTrace(tuple(nc_entries)), EvalTrace(tuple(lr_entries))
