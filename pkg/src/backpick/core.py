"""Domain types and on-disk formats for registries, traces, and feature caches.

Three file formats, all little-endian and locale-independent:

- registry: one JSON object per line with keys ``id``, ``param_count``,
  ``pretrain_dataset``, ``pretrain_dataset_size``, ``feature_dim``,
  ``source``.
- trace: one JSON object per line with keys ``backbone_id``, ``evaluator``
  (one of ``logreg``, ``nearest_centroid``, ``knn5``), ``tau_seconds``,
  ``val_metric``, ``test_metric``.
- feature cache: a directory holding ``meta.json`` plus, per split,
  ``{split}.features.bin`` (row-major float32) and ``{split}.labels.bin``
  (int32).  ``meta.json`` carries ``backbone_id``, ``feature_dim``,
  ``class_count``, ``splits`` (row counts for ``train``/``val``/``test``)
  and optionally ``timing`` with ``download_seconds``/``extract_seconds``
  recorded by whatever produced the cache.

Every loaded value is immutable after construction (arrays are marked
read-only) and safe to share across threads.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

EVALUATORS = ("logreg", "nearest_centroid", "knn5")

SPLITS = ("train", "val", "test")


class DataError(Exception):
    """An input file or value violates the data contracts."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DataError(message)


@dataclass(frozen=True)
class BackboneRecord:
    """Metadata for one pretrained backbone."""

    id: str
    param_count: int
    pretrain_dataset: str
    pretrain_dataset_size: int
    feature_dim: int
    source: str = ""

    def __post_init__(self):
        _require(bool(self.id), "backbone id must be non-empty")
        _require(self.param_count >= 1, f"{self.id}: param_count must be >= 1")
        _require(
            self.pretrain_dataset_size >= 0,
            f"{self.id}: pretrain_dataset_size must be >= 0",
        )
        _require(self.feature_dim >= 1, f"{self.id}: feature_dim must be >= 1")


@dataclass(frozen=True)
class Registry:
    """Ordered pool of backbones with pairwise-distinct ids."""

    backbones: tuple[BackboneRecord, ...]
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _require(len(self.backbones) >= 1, "empty registry")
        index = {}
        for record in self.backbones:
            _require(record.id not in index, f"duplicate id {record.id!r}")
            index[record.id] = record
        object.__setattr__(self, "_by_id", index)

    def __len__(self) -> int:
        return len(self.backbones)

    def __iter__(self) -> Iterator[BackboneRecord]:
        return iter(self.backbones)

    def __contains__(self, backbone_id: str) -> bool:
        return backbone_id in self._by_id

    def get(self, backbone_id: str) -> BackboneRecord:
        try:
            return self._by_id[backbone_id]
        except KeyError:
            raise DataError(f"unknown backbone id {backbone_id!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(record.id for record in self.backbones)


class Split(NamedTuple):
    features: np.ndarray  # (n, d) float32
    labels: np.ndarray  # (n,) int32


def _freeze_split(features, labels, split_name: str, feature_dim: int) -> Split:
    feats = np.ascontiguousarray(features, dtype=np.float32)
    labs = np.ascontiguousarray(labels, dtype=np.int32)
    _require(feats.ndim == 2, f"{split_name}: features must be 2-D")
    _require(labs.ndim == 1, f"{split_name}: labels must be 1-D")
    _require(
        feats.shape[0] == labs.shape[0],
        f"{split_name}: {feats.shape[0]} feature rows vs {labs.shape[0]} labels",
    )
    _require(feats.shape[0] >= 1, f"{split_name}: split is empty")
    _require(
        feats.shape[1] == feature_dim,
        f"{split_name}: feature_dim {feats.shape[1]} does not match declared {feature_dim}",
    )
    feats.flags.writeable = False
    labs.flags.writeable = False
    return Split(feats, labs)


@dataclass(frozen=True)
class FeatureCache:
    """Frozen feature matrices plus labels for one backbone on one dataset.

    Labels must be consecutive integers in ``[0, class_count - 1]`` and every
    class must appear in the train split; whatever extracts features performs
    the remapping so classifier code stays branch-free.
    """

    backbone_id: str
    feature_dim: int
    class_count: int
    splits: dict[str, Split]
    download_seconds: float = 0.0
    extract_seconds: float = 0.0

    def __post_init__(self):
        _require(bool(self.backbone_id), "backbone_id must be non-empty")
        _require(self.feature_dim >= 1, "feature_dim must be >= 1")
        _require(self.class_count >= 1, "class_count must be >= 1")
        _require(self.download_seconds >= 0, "download_seconds must be >= 0")
        _require(self.extract_seconds >= 0, "extract_seconds must be >= 0")
        _require(
            set(self.splits) == set(SPLITS),
            f"splits must be exactly {set(SPLITS)}, got {set(self.splits)}",
        )
        frozen = {
            name: _freeze_split(split.features, split.labels, name, self.feature_dim)
            for name, split in self.splits.items()
        }
        object.__setattr__(self, "splits", frozen)
        for name in SPLITS:
            labels = frozen[name].labels
            bad = labels[(labels < 0) | (labels >= self.class_count)]
            _require(
                bad.size == 0,
                f"{name}: label {int(bad[0]) if bad.size else 0} outside [0, {self.class_count - 1}]",
            )
        present = np.unique(frozen["train"].labels)
        for c in range(self.class_count):
            _require(c in present, f"class {c} absent from train")

    @property
    def extraction_seconds(self) -> float:
        """Total acquisition cost recorded by the producer."""
        return self.download_seconds + self.extract_seconds


@dataclass(frozen=True)
class TraceEntry:
    """One recorded evaluation: full cost in seconds plus both metrics."""

    backbone_id: str
    evaluator: str
    tau_seconds: float
    val_metric: float
    test_metric: float

    def __post_init__(self):
        _require(bool(self.backbone_id), "backbone_id must be non-empty")
        _require(
            self.evaluator in EVALUATORS,
            f"evaluator must be one of {EVALUATORS}, got {self.evaluator!r}",
        )
        _require(
            math.isfinite(self.tau_seconds) and self.tau_seconds > 0,
            f"{self.backbone_id}: tau_seconds must be > 0",
        )
        for name, value in (("val_metric", self.val_metric), ("test_metric", self.test_metric)):
            _require(
                math.isfinite(value) and 0.0 <= value <= 1.0,
                f"{self.backbone_id}: {name} {value} outside [0, 1]",
            )


@dataclass(frozen=True)
class EvalTrace:
    """Recorded evaluations, at most one per (backbone_id, evaluator) pair."""

    entries: tuple[TraceEntry, ...]
    _by_key: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for entry in self.entries:
            key = (entry.backbone_id, entry.evaluator)
            _require(
                key not in index,
                f"duplicate trace entry for backbone {entry.backbone_id!r} / evaluator {entry.evaluator!r}",
            )
            index[key] = entry
        object.__setattr__(self, "_by_key", index)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, backbone_id: str, evaluator: str) -> TraceEntry | None:
        return self._by_key.get((backbone_id, evaluator))

    def evaluators(self) -> tuple[str, ...]:
        seen = []
        for entry in self.entries:
            if entry.evaluator not in seen:
                seen.append(entry.evaluator)
        return tuple(seen)

    def backbone_ids(self, evaluator: str) -> tuple[str, ...]:
        return tuple(e.backbone_id for e in self.entries if e.evaluator == evaluator)


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one budgeted search.

    ``evaluations`` holds (backbone_id, val_metric) pairs in evaluation
    order; ``budget_used_seconds`` is the sum of their costs, never more
    than the budget that produced the outcome.
    """

    selected: str | None
    k: int
    budget_used_seconds: float
    evaluations: tuple[tuple[str, float], ...]

    def __post_init__(self):
        _require(self.k == len(self.evaluations), "k must equal len(evaluations)")
        _require(self.budget_used_seconds >= 0, "budget_used_seconds must be >= 0")
        if self.k == 0:
            _require(self.selected is None, "empty search cannot select a backbone")
        else:
            _require(self.selected is not None, "non-empty search must select a backbone")
            vals = dict()
            for backbone_id, val in self.evaluations:
                vals.setdefault(backbone_id, val)
            _require(self.selected in vals, "selected backbone was never evaluated")
            best = max(v for _, v in self.evaluations)
            _require(
                vals[self.selected] == best,
                "selected backbone does not maximize the validation metric",
            )


@dataclass(frozen=True)
class BsecPoint:
    t_max_seconds: float
    median: float
    p25: float
    p75: float
    n_runs: int
    n_valid_runs: int


@dataclass(frozen=True)
class BsecCurve:
    """Per-budget central tendency and spread of the selected test metric."""

    strategy: str
    evaluator: str
    points: tuple[BsecPoint, ...]

    def __post_init__(self):
        previous_t = None
        for point in self.points:
            _require(
                point.p25 <= point.median <= point.p75,
                f"t={point.t_max_seconds}: expected p25 <= median <= p75",
            )
            _require(
                point.n_valid_runs <= point.n_runs,
                f"t={point.t_max_seconds}: n_valid_runs exceeds n_runs",
            )
            if previous_t is not None:
                _require(
                    point.t_max_seconds > previous_t,
                    "t_max values must be strictly increasing",
                )
            previous_t = point.t_max_seconds


# ---------------------------------------------------------------------------
# Atomic writes


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    _atomic_write_bytes(Path(path), text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Registry I/O


def _parse_str(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise DataError(f"{where}: field {key!r} must be a string")
    return value


def _parse_int(obj: dict, key: str, where: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise DataError(f"{where}: field {key!r} must be an integer")
    return value


def _parse_float(obj: dict, key: str, where: str) -> float:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DataError(f"{where}: field {key!r} must be a number")
    return float(value)


def _json_lines(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def load_registry(path: str | Path) -> Registry:
    """Read a line-delimited registry file, preserving record order."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"registry file not found: {path}")
    records = []
    for lineno, obj in _json_lines(path):
        where = f"{path}:{lineno}"
        try:
            records.append(
                BackboneRecord(
                    id=_parse_str(obj, "id", where),
                    param_count=_parse_int(obj, "param_count", where),
                    pretrain_dataset=_parse_str(obj, "pretrain_dataset", where),
                    pretrain_dataset_size=_parse_int(obj, "pretrain_dataset_size", where),
                    feature_dim=_parse_int(obj, "feature_dim", where),
                    source=_parse_str(obj, "source", where),
                )
            )
        except DataError as exc:
            raise DataError(f"{where}: {exc}") from None
    if not records:
        raise DataError(f"{path}: empty registry")
    return Registry(tuple(records))


def save_registry(registry: Registry, path: str | Path) -> None:
    lines = []
    for r in registry:
        lines.append(
            json.dumps(
                {
                    "id": r.id,
                    "param_count": r.param_count,
                    "pretrain_dataset": r.pretrain_dataset,
                    "pretrain_dataset_size": r.pretrain_dataset_size,
                    "feature_dim": r.feature_dim,
                    "source": r.source,
                }
            )
        )
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Trace I/O


def load_trace(path: str | Path, registry: Registry | None) -> EvalTrace:
    """Read a line-delimited trace file and validate it against a registry.

    ``registry=None`` skips the membership check, for callers that pair
    traces with each other rather than with a backbone pool.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"trace file not found: {path}")
    entries = []
    for lineno, obj in _json_lines(path):
        where = f"{path}:{lineno}"
        backbone_id = _parse_str(obj, "backbone_id", where)
        if registry is not None and backbone_id not in registry:
            raise DataError(f"{where}: unknown backbone id {backbone_id!r}")
        try:
            entries.append(
                TraceEntry(
                    backbone_id=backbone_id,
                    evaluator=_parse_str(obj, "evaluator", where),
                    tau_seconds=_parse_float(obj, "tau_seconds", where),
                    val_metric=_parse_float(obj, "val_metric", where),
                    test_metric=_parse_float(obj, "test_metric", where),
                )
            )
        except DataError as exc:
            raise DataError(f"{where}: {exc}") from None
    return EvalTrace(tuple(entries))


def save_trace(trace: EvalTrace, path: str | Path) -> None:
    lines = []
    for e in trace.entries:
        lines.append(
            json.dumps(
                {
                    "backbone_id": e.backbone_id,
                    "evaluator": e.evaluator,
                    "tau_seconds": e.tau_seconds,
                    "val_metric": e.val_metric,
                    "test_metric": e.test_metric,
                }
            )
        )
    atomic_write_text(Path(path), "\n".join(lines) + ("\n" if lines else ""))


# ---------------------------------------------------------------------------
# Feature cache I/O


def load_feature_cache(directory: str | Path, registry: Registry | None = None) -> FeatureCache:
    """Materialize a feature cache directory, checking sizes and label ranges.

    When ``registry`` is given, the cached backbone must be registered and
    its feature dimension must match the registry record.
    """
    directory = Path(directory)
    meta_path = directory / "meta.json"
    if not meta_path.is_file():
        raise DataError(f"cache metadata not found: {meta_path}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{meta_path}: malformed JSON ({exc.msg})") from None
    where = str(meta_path)
    backbone_id = _parse_str(meta, "backbone_id", where)
    feature_dim = _parse_int(meta, "feature_dim", where)
    class_count = _parse_int(meta, "class_count", where)
    splits_meta = meta.get("splits")
    if not isinstance(splits_meta, dict) or set(splits_meta) != set(SPLITS):
        raise DataError(f"{where}: 'splits' must map exactly {set(SPLITS)} to row counts")
    timing = meta.get("timing", {})
    if not isinstance(timing, dict):
        raise DataError(f"{where}: 'timing' must be an object")
    download_seconds = float(timing.get("download_seconds", 0.0))
    extract_seconds = float(timing.get("extract_seconds", 0.0))

    splits = {}
    for split_name in SPLITS:
        n = _parse_int(splits_meta, split_name, where)
        features_path = directory / f"{split_name}.features.bin"
        labels_path = directory / f"{split_name}.labels.bin"
        for p in (features_path, labels_path):
            if not p.is_file():
                raise DataError(f"cache file not found: {p}")
        feature_bytes = features_path.read_bytes()
        expected = n * feature_dim * 4
        if len(feature_bytes) != expected:
            raise DataError(
                f"{features_path}: expected {expected} bytes for {n}x{feature_dim} float32, "
                f"got {len(feature_bytes)}"
            )
        label_bytes = labels_path.read_bytes()
        if len(label_bytes) != n * 4:
            raise DataError(
                f"{labels_path}: expected {n * 4} bytes for {n} int32 labels, got {len(label_bytes)}"
            )
        features = np.frombuffer(feature_bytes, dtype="<f4").reshape(n, feature_dim)
        labels = np.frombuffer(label_bytes, dtype="<i4")
        splits[split_name] = Split(features, labels)

    cache = FeatureCache(
        backbone_id=backbone_id,
        feature_dim=feature_dim,
        class_count=class_count,
        splits=splits,
        download_seconds=download_seconds,
        extract_seconds=extract_seconds,
    )
    if registry is not None:
        record = registry.get(backbone_id)
        _require(
            record.feature_dim == feature_dim,
            f"{backbone_id}: cache feature_dim {feature_dim} does not match "
            f"registry feature_dim {record.feature_dim}",
        )
    return cache


def save_feature_cache(cache: FeatureCache, directory: str | Path) -> None:
    """Write a cache directory in the binary format described above."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "backbone_id": cache.backbone_id,
        "feature_dim": cache.feature_dim,
        "class_count": cache.class_count,
        "splits": {name: int(cache.splits[name].labels.shape[0]) for name in SPLITS},
    }
    if cache.download_seconds or cache.extract_seconds:
        meta["timing"] = {
            "download_seconds": cache.download_seconds,
            "extract_seconds": cache.extract_seconds,
        }
    for split_name in SPLITS:
        split = cache.splits[split_name]
        _atomic_write_bytes(
            directory / f"{split_name}.features.bin",
            np.ascontiguousarray(split.features, dtype="<f4").tobytes(),
        )
        _atomic_write_bytes(
            directory / f"{split_name}.labels.bin",
            np.ascontiguousarray(split.labels, dtype="<i4").tobytes(),
        )
    atomic_write_text(directory / "meta.json", json.dumps(meta, indent=2) + "\n")
