"""Minimum-cost assignment (Hungarian algorithm with potentials).

O(n^3) shortest-augmenting-path formulation over a square cost matrix.
Used by the bipartite distance approximation and the A* multiset bound.
"""
from __future__ import annotations

import numpy as np

INF = float("inf")


def solve_assignment(cost: np.ndarray) -> tuple[list[int], float]:
    """Return (col_of_row, total_cost) minimizing sum(cost[r, col_of_row[r]]).

    The matrix must be square with finite entries.
    """
    cost = np.asarray(cost, dtype=np.float64)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("assignment matrix must be square")
    if n == 0:
        return [], 0.0

    # 1-indexed potentials; row 0 / col 0 are virtual.
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match = [0] * (n + 1)  # match[col] = row assigned to col

    for r in range(1, n + 1):
        match[0] = r
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        way = [0] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = INF
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1

    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[match[j] - 1] = j - 1
    total = float(sum(cost[r, col_of_row[r]] for r in range(n)))
    return col_of_row, total
