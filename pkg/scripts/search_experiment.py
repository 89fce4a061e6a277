#!/usr/bin/env python3
"""Principle-filtered search versus the unfiltered baseline.

Runs paired (same-seed) searches on the surrogate-scored 15,625 space and
reports, per seed, how many evaluations the filtered run needed to reach
the baseline's final best score.
"""
import argparse
import json
import statistics

from archspace import nasbench201_space
from archspace.metrics import SurrogateModel, estimate_train_hours, surrogate_table
from archspace.principles import filtered_search, make_principle


def run(budget: int, seeds: int, strategy: str, surrogate_seed: int) -> None:
    spec = nasbench201_space()
    table = surrogate_table(spec, SurrogateModel(seed=surrogate_seed))
    scorer = lambda arch: table.accuracy(arch.arch_id)  # noqa: E731
    filters = [make_principle(p) for p in ("P4", "P5", "P6", "P7", "P8")]
    hours = estimate_train_hours(table, seed=0)

    rows = []
    fractions = []
    for seed in range(seeds):
        base = filtered_search(spec, scorer, strategy, [], budget, seed, hours)
        filt = filtered_search(spec, scorer, strategy, filters, budget, seed, hours)
        needed = filt.evaluations_to_reach(base.best_score)
        if needed is not None:
            fractions.append(needed / len(base.evaluated))
        rows.append(
            {
                "seed": seed,
                "baseline_best": round(base.best_score, 5),
                "filtered_best": round(filt.best_score, 5),
                "baseline_archs": len(base.evaluated),
                "filtered_archs": len(filt.evaluated),
                "baseline_hours": round(base.estimated_cost, 2),
                "filtered_hours": round(filt.estimated_cost, 2),
                "evals_to_match": needed,
                "discarded": filt.discarded_by_filter,
            }
        )
    print(json.dumps({
        "strategy": strategy,
        "budget": budget,
        "rows": rows,
        "median_match_fraction": statistics.median(fractions) if fractions else None,
    }, indent=2))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=400)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--strategy", choices=("random", "evolution"), default="random")
    parser.add_argument("--surrogate-seed", type=int, default=0)
    args = parser.parse_args()
    run(args.budget, args.seeds, args.strategy, args.surrogate_seed)
