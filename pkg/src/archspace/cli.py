"""Command-line pipeline: distances, clustering, layout, search, principle
evaluation and the exploration server.

Every command prints machine-readable JSON events on stdout; failures exit
nonzero with a JSON error object on stderr.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .clustering import ClusterParams, build_hierarchy, compute_representatives
from .distances import apsp_sampled, build_arch_graph
from .errors import ArchspaceError
from .layout import LayoutParams
from .metrics import (
    MetricTable,
    SurrogateModel,
    estimate_train_hours,
    ingest_metrics,
    surrogate_table,
)
from .principles import (
    default_principles,
    filtered_search,
    principle_significance,
    principles_from_json,
    split_by_principle,
)
from .session import SURROGATE_FILE, load_session
from .server import serve
from .spaces import load_space
from .storage import load_distances, load_tree, save_distances, save_tree, save_views
from .views import build_views


def _emit(**event) -> None:
    print(json.dumps(event), flush=True)


def _load_metrics(args, spec) -> MetricTable:
    if getattr(args, "metrics", None):
        return ingest_metrics(args.metrics, spec)
    seed = getattr(args, "surrogate", None)
    return surrogate_table(spec, SurrogateModel(seed=int(seed or 0)))


def _note_surrogate(out_path: Path, args) -> None:
    if getattr(args, "metrics", None):
        return
    seed = int(getattr(args, "surrogate", None) or 0)
    marker = out_path.parent / SURROGATE_FILE
    marker.write_text(json.dumps({"seed": seed}) + "\n", encoding="utf-8")


def cmd_distances(args) -> None:
    spec = load_space(args.space)
    size = spec.size()
    rng = np.random.default_rng(args.seed)
    if args.sample >= size:
        sampled = list(range(size))
    else:
        sampled = sorted(int(x) for x in rng.choice(size, args.sample, replace=False))
    t0 = time.perf_counter()
    graph = build_arch_graph(spec, sampled)
    t_build = time.perf_counter() - t0
    t0 = time.perf_counter()
    dm = apsp_sampled(graph, workers=args.workers)
    t_apsp = time.perf_counter() - t0
    save_distances(dm, spec, args.out)
    _emit(
        event="distances",
        backend=dm.backend,
        vertices=graph.vertex_count,
        sampled=len(sampled),
        build_seconds=round(t_build, 3),
        apsp_seconds=round(t_apsp, 3),
        out=str(args.out),
    )


def cmd_cluster(args) -> None:
    spec = load_space(args.space)
    dm = load_distances(args.dist, spec)
    metrics = _load_metrics(args, spec)
    accuracy = np.array([metrics.rows[a]["accuracy"] for a in dm.arch_ids])
    params = ClusterParams(
        k_range=(2, args.k_max),
        max_depth=args.max_depth,
        min_cluster=args.min_cluster,
        seed=args.seed,
    )
    tree = build_hierarchy(dm, params, accuracy=accuracy)
    compute_representatives(tree, dm, accuracy)
    out = Path(args.out)
    save_tree(tree, spec, out)
    _note_surrogate(out, args)
    _emit(
        event="cluster",
        nodes=len(tree.nodes()),
        depth=tree.depth,
        out=str(out),
    )


def cmd_layout(args) -> None:
    spec = load_space(args.space)
    dm = load_distances(args.dist, spec)
    tree = load_tree(args.tree, spec)
    metrics = _load_metrics(args, spec)
    params = LayoutParams(view_budget=args.budget, zoom_budget=args.budget)
    views = build_views(tree, dm, metrics, params)
    out = Path(args.out)
    save_views(views, spec, dm.arch_ids, out)
    _note_surrogate(out, args)
    _emit(event="layout", views=sorted(views), out=str(out))


def cmd_search(args) -> None:
    spec = load_space(args.space)
    metrics = _load_metrics(args, spec)
    scorer = lambda arch: metrics.accuracy(arch.arch_id)  # noqa: E731
    principles = (
        principles_from_json(Path(args.principles).read_text(encoding="utf-8"))
        if args.principles
        else []
    )
    per_arch_hours = estimate_train_hours(metrics, seed=0)
    seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    reach_fractions = []
    for seed in seeds:
        unfiltered = filtered_search(
            spec, scorer, args.strategy, [], args.budget, seed, per_arch_hours
        )
        filtered = filtered_search(
            spec, scorer, args.strategy, principles, args.budget, seed, per_arch_hours
        )
        for name, trace in (("unfiltered", unfiltered), ("filtered", filtered)):
            path = out_dir / f"{name}-seed{seed}.json"
            path.write_text(json.dumps(trace.to_dict(), indent=2) + "\n", encoding="utf-8")
        needed = filtered.evaluations_to_reach(unfiltered.best_score)
        if needed is not None:
            reach_fractions.append(needed / max(len(unfiltered.evaluated), 1))
        rows.append(
            {
                "seed": seed,
                "unfiltered_best": unfiltered.best_score,
                "filtered_best": filtered.best_score,
                "unfiltered_archs": len(unfiltered.evaluated),
                "filtered_archs": len(filtered.evaluated),
                "unfiltered_hours": unfiltered.estimated_cost,
                "filtered_hours": filtered.estimated_cost,
                "discarded": filtered.discarded_by_filter,
                "evals_to_match": needed,
            }
        )
    summary = {
        "event": "search",
        "strategy": args.strategy,
        "budget": args.budget,
        "per_arch_hours": per_arch_hours,
        "rows": rows,
        "median_match_fraction": (
            statistics.median(reach_fractions) if reach_fractions else None
        ),
        "out_dir": str(out_dir),
    }
    (out_dir / "comparison.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(summary), flush=True)
    header = f"{'method':<12}{'seed':>6}{'#archs':>8}{'est.hours':>11}{'best':>9}"
    lines = [header]
    for row in rows:
        lines.append(
            f"{'baseline':<12}{row['seed']:>6}{row['unfiltered_archs']:>8}"
            f"{row['unfiltered_hours']:>11.2f}{row['unfiltered_best']:>9.4f}"
        )
        lines.append(
            f"{'filtered':<12}{row['seed']:>6}{row['filtered_archs']:>8}"
            f"{row['filtered_hours']:>11.2f}{row['filtered_best']:>9.4f}"
        )
    print("\n".join(lines), file=sys.stderr, flush=True)


def cmd_principles_eval(args) -> None:
    spec = load_space(args.space)
    metrics = _load_metrics(args, spec)
    principles = (
        principles_from_json(Path(args.principles).read_text(encoding="utf-8"))
        if args.principles
        else default_principles()
    )
    report = []
    for principle in principles:
        passes, fails = split_by_principle(spec, metrics, principle)
        entry = {
            "id": principle.id,
            "mode": principle.mode,
            "pass_count": len(passes),
            "fail_count": len(fails),
        }
        if passes and fails:
            entry["significance"] = principle_significance(passes, fails)
        report.append(entry)
    _emit(event="principles", space=str(args.space), report=report)


def cmd_serve(args) -> None:
    session = load_session(args.session_dir)
    serve(session, args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="archspace")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distances", help="build the edit graph and compute sampled pairwise distances")
    p.add_argument("--space", required=True)
    p.add_argument("--sample", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("cluster", help="build the cluster hierarchy from a distance cache")
    p.add_argument("--space", required=True)
    p.add_argument("--dist", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--min-cluster", type=int, default=40)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metrics")
    p.add_argument("--surrogate", type=int)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("layout", help="compute per-navigation-level layouts")
    p.add_argument("--space", required=True)
    p.add_argument("--dist", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, default=150)
    p.add_argument("--metrics")
    p.add_argument("--surrogate", type=int)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("search", help="run principle-filtered search against a baseline")
    p.add_argument("--space", required=True)
    p.add_argument("--metrics")
    p.add_argument("--surrogate", type=int)
    p.add_argument("--strategy", choices=("random", "evolution"), default="random")
    p.add_argument("--principles")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seeds", default="0")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("principles", help="principle tooling")
    psub = p.add_subparsers(dest="principles_command", required=True)
    pe = psub.add_parser("eval", help="per-principle pass counts and significance")
    pe.add_argument("--space", required=True)
    pe.add_argument("--metrics")
    pe.add_argument("--surrogate", type=int)
    pe.add_argument("--principles")
    pe.set_defaults(func=cmd_principles_eval)

    p = sub.add_parser("serve", help="serve the exploration API")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--session-dir", required=True)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ArchspaceError, OSError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
            flush=True,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
