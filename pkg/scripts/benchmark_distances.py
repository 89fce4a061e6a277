#!/usr/bin/env python3
"""Distance-engine benchmark on the 15,625-architecture space.

Measures edit-graph build time, per-source SSSP time, APSP time for a
sample, and extrapolates the pairwise A* baseline from a timed prefix.
"""
import argparse
import json
import time

import numpy as np

from archspace import apsp_sampled, build_arch_graph, nasbench201_space, sssp_bucketed
from archspace.distances import exact_pairwise_astar


def run(sample: int, seed: int, astar_seconds: float) -> None:
    spec = nasbench201_space()
    rng = np.random.default_rng(seed)
    sampled = sorted(int(x) for x in rng.choice(spec.size(), sample, replace=False))

    t0 = time.perf_counter()
    graph = build_arch_graph(spec, sampled)
    t_build = time.perf_counter() - t0

    t0 = time.perf_counter()
    sssp_bucketed(graph, sampled[0])
    t_sssp = time.perf_counter() - t0

    t0 = time.perf_counter()
    apsp_sampled(graph)
    t_apsp = time.perf_counter() - t0

    _, pairs_done, t_astar = exact_pairwise_astar(spec, sampled, time_budget=astar_seconds)
    total_pairs = sample * (sample - 1) // 2
    astar_projection = t_astar / max(pairs_done, 1) * total_pairs

    print(
        json.dumps(
            {
                "vertices": graph.vertex_count,
                "sample": sample,
                "build_seconds": round(t_build, 3),
                "sssp_seconds": round(t_sssp, 4),
                "apsp_seconds": round(t_apsp, 3),
                "astar_pairs_timed": pairs_done,
                "astar_seconds": round(t_astar, 3),
                "astar_projected_seconds": round(astar_projection, 1),
                "projected_speedup": round(astar_projection / t_apsp, 1),
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sample", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--astar-seconds", type=float, default=20.0)
    args = parser.parse_args()
    run(args.sample, args.seed, args.astar_seconds)
