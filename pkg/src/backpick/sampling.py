"""Orderings that decide which backbones get evaluated first.

Five strategies, addressable by stable names used in output files and on
the command line: ``random``, ``complexity-asc``, ``complexity-desc``,
``pretrain-size-desc``, ``dataset-cycling``.  Each produces a permutation
of the registry.  Stochastic strategies are seed-deterministic through the
portable generator in :mod:`backpick.rng`; deterministic ones ignore the
seed entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Registry
from .rng import Xoshiro256StarStar, seed_for_tag


@dataclass(frozen=True)
class Permutation:
    """An evaluation order: every registry id exactly once."""

    order: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ValueError("permutation repeats a backbone id")

    def __len__(self) -> int:
        return len(self.order)

    def covers(self, registry: Registry) -> bool:
        return set(self.order) == set(registry.ids) and len(self) == len(registry)


def order_random(registry: Registry, seed: int) -> Permutation:
    """Seeded Fisher-Yates shuffle of the registry."""
    ids = list(registry.ids)
    Xoshiro256StarStar(seed).shuffle(ids)
    return Permutation(tuple(ids))


def order_by_complexity(registry: Registry, direction: str) -> Permutation:
    """Sort by trainable-parameter count; ties break on ascending id."""
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    sign = 1 if direction == "increasing" else -1
    ordered = sorted(registry, key=lambda r: (sign * r.param_count, r.id))
    return Permutation(tuple(r.id for r in ordered))


def order_by_pretrain_size_desc(registry: Registry) -> Permutation:
    """Largest pretraining dataset first; ties break on ascending id."""
    ordered = sorted(registry, key=lambda r: (-r.pretrain_dataset_size, r.id))
    return Permutation(tuple(r.id for r in ordered))


def _cycling_groups(registry: Registry) -> list[tuple[str, list[str]]]:
    """(tag, member ids) groups in visiting order.

    Groups are visited by descending dataset size (the largest size seen
    within the group), ties by ascending dataset tag; members keep
    registry order.
    """
    members: dict[str, list[str]] = {}
    sizes: dict[str, int] = {}
    for record in registry:
        members.setdefault(record.pretrain_dataset, []).append(record.id)
        sizes[record.pretrain_dataset] = max(
            sizes.get(record.pretrain_dataset, 0), record.pretrain_dataset_size
        )
    tags = sorted(members, key=lambda tag: (-sizes[tag], tag))
    return [(tag, members[tag]) for tag in tags]


def _interleave(groups: list[list[str]]) -> tuple[str, ...]:
    """Round-robin over the groups, skipping exhausted ones."""
    out = []
    depth = 0
    total = sum(len(g) for g in groups)
    while len(out) < total:
        for group in groups:
            if depth < len(group):
                out.append(group[depth])
        depth += 1
    return tuple(out)


def order_dataset_cycling(registry: Registry, seed: int) -> Permutation:
    """Alternate across pretraining-dataset groups to front-load diversity.

    Within each group the order is a seeded shuffle; the group seed is the
    run seed XOR the FNV-1a hash of the dataset tag, so two groups never
    share a stream.
    """
    groups = []
    for tag, ids in _cycling_groups(registry):
        ids = list(ids)
        Xoshiro256StarStar(seed_for_tag(seed, tag)).shuffle(ids)
        groups.append(ids)
    return Permutation(_interleave(groups))


STRATEGIES = {
    "random": (order_random, True),
    "complexity-asc": (lambda reg, seed: order_by_complexity(reg, "increasing"), False),
    "complexity-desc": (lambda reg, seed: order_by_complexity(reg, "decreasing"), False),
    "pretrain-size-desc": (lambda reg, seed: order_by_pretrain_size_desc(reg), False),
    "dataset-cycling": (order_dataset_cycling, True),
}


def strategy_names() -> tuple[str, ...]:
    return tuple(STRATEGIES)


def is_stochastic(name: str) -> bool:
    return _lookup(name)[1]


def make_permutation(name: str, registry: Registry, seed: int = 0) -> Permutation:
    """Build the evaluation order for a named strategy."""
    return _lookup(name)[0](registry, seed)


def _lookup(name: str):
    try:
        return STRATEGIES[name]
    except KeyError:
        valid = ", ".join(STRATEGIES)
        raise ValueError(f"unknown strategy {name!r}; valid strategies: {valid}") from None
