"""Structural geometry, clustering, layout and principle-guided search
over neural architecture spaces."""

from .spaces import (
    Architecture,
    OpKind,
    OpType,
    SpaceSpec,
    enumerate_space,
    load_space,
    nasbench201_space,
    one_edit_neighbors,
    paths,
    save_space,
    toy27_space,
)
from .distances import (
    ArchGraph,
    DistanceMatrix,
    apsp_sampled,
    approx_ged_bipartite,
    build_arch_graph,
    exact_ged_astar,
    sssp_bucketed,
)

__all__ = [
    "Architecture",
    "ArchGraph",
    "DistanceMatrix",
    "OpKind",
    "OpType",
    "SpaceSpec",
    "apsp_sampled",
    "approx_ged_bipartite",
    "build_arch_graph",
    "enumerate_space",
    "exact_ged_astar",
    "load_space",
    "nasbench201_space",
    "one_edit_neighbors",
    "paths",
    "save_space",
    "sssp_bucketed",
    "toy27_space",
]
