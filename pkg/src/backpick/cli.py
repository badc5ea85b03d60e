"""Command-line entry point.

Subcommands: ``search`` (one budgeted search), ``bsec`` (efficiency curves
as CSV, optionally SVG), ``correlate`` (evaluator agreement report),
``split`` (per-class index subsampling), ``eval-live`` (bulk live
evaluation producing a replayable trace).

Exit codes are a stable scripting contract: 0 success, 1 usage or
configuration error, 2 data or validation error.  In replay mode every
command is a pure function of its config and input files; outputs are
written atomically and are byte-identical across reruns, platforms, and
thread counts.  ``VIBES_THREADS`` caps run parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, core, sampling, search, svgplot
from .classifiers import LogregConfig
from .core import DataError


class UsageError(Exception):
    """Bad flags or names; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve(workdir: str, path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p if p.is_absolute() else Path(workdir) / p


def _check_name(kind: str, name: str, valid: tuple[str, ...]) -> None:
    if name not in valid:
        raise UsageError(f"unknown {kind} {name!r}; valid names: {', '.join(valid)}")


def _thread_count() -> int:
    raw = os.environ.get("VIBES_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise UsageError(f"VIBES_THREADS must be an integer, got {raw!r}") from None
    if count < 1:
        raise UsageError("VIBES_THREADS must be >= 1")
    return count


def _make_backend(args, registry):
    if args.trace is not None:
        trace = core.load_trace(_resolve(args.workdir, args.trace), registry)
        return search.replay_backend(trace), trace
    backend = search.live_backend(
        cache_root=_resolve(args.workdir, args.cache_root),
        registry=registry,
        cfg=LogregConfig(),
        tau_includes_extraction=getattr(args, "tau_includes_extraction", False),
    )
    return backend, None


def _parse_grid(raw: str) -> list[float]:
    try:
        grid = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"could not parse budget grid {raw!r}") from None
    if not grid:
        raise UsageError("budget grid is empty")
    return grid


def _parse_baselines(raw_list) -> list[tuple[str, str]]:
    baselines = []
    for raw in raw_list or []:
        backbone_id, _, label = raw.partition(":")
        if not backbone_id:
            raise UsageError(f"baseline must look like id:label, got {raw!r}")
        baselines.append((backbone_id, label or backbone_id))
    return baselines


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_search(args) -> int:
    _check_name("strategy", args.strategy, sampling.strategy_names())
    _check_name("evaluator", args.evaluator, core.EVALUATORS)
    if args.t_max <= 0:
        raise UsageError("--t-max must be positive")

    registry = core.load_registry(_resolve(args.workdir, args.registry))
    backend, _ = _make_backend(args, registry)
    perm = sampling.make_permutation(args.strategy, registry, args.seed)
    outcome = search.budgeted_search(perm, backend, args.evaluator, args.t_max)

    payload = {
        "selected": outcome.selected,
        "k": outcome.k,
        "budget_used_seconds": outcome.budget_used_seconds,
        "evaluations": [[backbone_id, val] for backbone_id, val in outcome.evaluations],
    }
    if args.final_full_eval and outcome.selected is not None and args.evaluator != "logreg":
        full = backend.evaluate(outcome.selected, "logreg")
        payload["final_full_eval"] = {
            "evaluator": "logreg",
            "val_metric": full.val_metric,
            "test_metric": full.test_metric,
            "tau_seconds": full.tau_seconds,
        }

    out_dir = _resolve(args.workdir, args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    core.atomic_write_text(out_dir / "outcome.json", json.dumps(payload, indent=2) + "\n")
    if not backend.simulated:
        core.save_trace(backend.emitted_trace, out_dir / "live_trace.jsonl")
    return 0


def _cmd_bsec(args) -> int:
    strategies = args.strategy or list(sampling.strategy_names())
    for name in strategies:
        _check_name("strategy", name, sampling.strategy_names())
    _check_name("evaluator", args.evaluator, core.EVALUATORS)
    grid = _parse_grid(args.t_grid)
    baselines = _parse_baselines(args.baseline)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    threads = _thread_count()

    registry = core.load_registry(_resolve(args.workdir, args.registry))
    backend, _ = _make_backend(args, registry)
    if not backend.simulated:
        print(
            "warning: live evaluation measures wall time, so the budget grid "
            "depends on this machine",
            file=sys.stderr,
        )

    out_dir = _resolve(args.workdir, args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = []
    for name in strategies:
        curve = analysis.bsec(
            registry,
            backend,
            name,
            args.evaluator,
            grid,
            n_runs=args.runs,
            base_seed=args.seed,
            n_threads=threads,
            stats=args.stats,
        )
        curves.append(curve)
        core.atomic_write_text(
            out_dir / f"bsec_{name}_{args.evaluator}.csv", analysis.bsec_csv(curve)
        )

    if args.svg is not None:
        baseline_values = [
            (label, backend.evaluate(backbone_id, args.evaluator).test_metric)
            for backbone_id, label in baselines
        ]
        svg = svgplot.render_bsec_svg(
            curves, baseline_values, title=args.title, log_x=args.log_x
        )
        core.atomic_write_text(_resolve(args.workdir, args.svg), svg)
    return 0


def _cmd_correlate(args) -> int:
    if args.evaluator_a is not None:
        _check_name("evaluator", args.evaluator_a, core.EVALUATORS)
    if args.evaluator_b is not None:
        _check_name("evaluator", args.evaluator_b, core.EVALUATORS)
    trace_a = core.load_trace(_resolve(args.workdir, args.trace_a), registry=None)
    trace_b = core.load_trace(_resolve(args.workdir, args.trace_b), registry=None)
    report = analysis.correlate_evaluators(trace_a, trace_b, args.evaluator_a, args.evaluator_b)
    core.atomic_write_text(_resolve(args.workdir, args.out), analysis.correlation_csv(report))
    return 0


def _cmd_split(args) -> int:
    if args.per_class < 1:
        raise UsageError("--per-class must be >= 1")
    labels_path = _resolve(args.workdir, args.labels)
    try:
        text = labels_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read labels file: {exc}") from None
    labels = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise DataError(f"{labels_path}:{lineno}: not an integer label: {line!r}") from None

    counts: dict[int, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    for label in sorted(counts):
        if counts[label] < args.per_class:
            print(
                f"warning: class {label} has only {counts[label]} items, keeping all",
                file=sys.stderr,
            )
    indices = analysis.subsample_per_class(labels, args.per_class, args.seed)
    core.atomic_write_text(
        _resolve(args.workdir, args.out), "\n".join(str(i) for i in indices) + "\n"
    )
    return 0


def _cmd_eval_live(args) -> int:
    _check_name("evaluator", args.evaluator, core.EVALUATORS)
    registry = core.load_registry(_resolve(args.workdir, args.registry))
    backend = search.live_backend(
        cache_root=_resolve(args.workdir, args.cache_root),
        registry=registry,
        cfg=LogregConfig(),
        tau_includes_extraction=args.tau_includes_extraction,
    )
    for backbone_id in registry.ids:
        backend.evaluate(backbone_id, args.evaluator)
    core.save_trace(backend.emitted_trace, _resolve(args.workdir, args.out))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--workdir", default=".", help="base directory for relative paths (default: cwd)"
    )

    parser = _Parser(prog="backpick", description="budgeted backbone selection engine")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("search", parents=[shared], help="run one budgeted search")
    p.add_argument("--registry", required=True, help="registry file (JSON lines)")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--trace", help="recorded trace to replay")
    source.add_argument("--cache-root", help="directory of feature caches for live evaluation")
    p.add_argument("--strategy", required=True)
    p.add_argument("--evaluator", required=True)
    p.add_argument("--t-max", type=float, required=True, help="time budget in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--final-full-eval", action="store_true",
                   help="also report the logreg metrics of the selected backbone")
    p.add_argument("--tau-includes-extraction", action="store_true",
                   help="charge recorded download/extract time into live costs")
    p.set_defaults(func=_cmd_search)

    p = commands.add_parser("bsec", parents=[shared], help="build selection efficiency curves")
    p.add_argument("--registry", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--trace")
    source.add_argument("--cache-root")
    p.add_argument("--strategy", action="append",
                   help="strategy name; repeatable; default: all strategies")
    p.add_argument("--evaluator", default="logreg")
    p.add_argument("--t-grid", required=True, help="comma-separated budgets in seconds")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stats", choices=("median", "mean"), default="median")
    p.add_argument("--out", required=True, help="output directory for CSV files")
    p.add_argument("--svg", help="also render all curves into this SVG file")
    p.add_argument("--baseline", action="append", metavar="ID:LABEL",
                   help="draw a dashed baseline at this backbone's test metric; repeatable")
    p.add_argument("--title", default="")
    p.add_argument("--log-x", action="store_true", help="log-scale budget axis in the SVG")
    p.add_argument("--tau-includes-extraction", action="store_true")
    p.set_defaults(func=_cmd_bsec)

    p = commands.add_parser("correlate", parents=[shared], help="compare two evaluator traces")
    p.add_argument("--trace-a", required=True)
    p.add_argument("--trace-b", required=True)
    p.add_argument("--evaluator-a", help="needed when trace a holds several evaluators")
    p.add_argument("--evaluator-b")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_correlate)

    p = commands.add_parser("split", parents=[shared], help="sample N indices per class")
    p.add_argument("--labels", required=True, help="text file, one integer label per line")
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output file, one index per line")
    p.set_defaults(func=_cmd_split)

    p = commands.add_parser("eval-live", parents=[shared],
                            help="evaluate every registry backbone and record a trace")
    p.add_argument("--registry", required=True)
    p.add_argument("--cache-root", required=True)
    p.add_argument("--evaluator", required=True)
    p.add_argument("--out", required=True, help="output trace path")
    p.add_argument("--tau-includes-extraction", action="store_true")
    p.set_defaults(func=_cmd_eval_live)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"backpick: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, ValueError) as exc:
        print(f"backpick: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
