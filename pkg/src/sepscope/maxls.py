"""Greedy extraction of a linearly separable subset pair at a fixed weight.

Pairs whose projected difference falls on the minor side of the hyperplane
(or inside the zero band) become edges of a bipartite violation graph; the
greedy repeatedly deletes a maximum-degree vertex until no edge remains.
What survives projects strictly onto the major side, so the kept pair is
separable by construction.  Greedy vertex deletion does not guarantee the
optimum, so reports call the result a greedy separable subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregates import default_zero_tol, pair_stats_fast, project
from .dataset import BinaryTask
from .errors import DegenerateError


@dataclass(frozen=True)
class ViolationGraph:
    """Bipartite graph of minor-side and boundary pairs."""

    a_vertices: np.ndarray
    b_vertices: np.ndarray
    edges: np.ndarray            # shape (E, 2): (row in A, row in B)
    degrees_a: np.ndarray        # degree per A row (length I)
    degrees_b: np.ndarray        # degree per B row (length J)
    major_side: int              # +1 or -1

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]


@dataclass(frozen=True)
class MaxLsResult:
    """Kept rows, ordered removals, and the side they were kept on."""

    kept_a: np.ndarray
    kept_b: np.ndarray
    removed: tuple[tuple[str, int, int], ...]   # (side, row, degree at removal)
    major_side: int

    def to_json(self) -> dict:
        return {
            "major_side": self.major_side,
            "kept_a": self.kept_a.tolist(),
            "kept_b": self.kept_b.tolist(),
            "removed": [
                {"set": side, "index": int(row), "degree": int(deg)}
                for side, row, deg in self.removed
            ],
        }


def violation_edges(
    task: BinaryTask, omega, zero_tol: float | None = None
) -> ViolationGraph:
    """Enumerate all pairs not strictly on the major side.

    The major side is the sign with the strictly larger pair count; ties go
    to the positive side.  Boundary pairs inside the zero band always count
    as violations (separability is strict).
    """
    alpha, beta = project(task, omega.omega if hasattr(omega, "omega") else omega)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    stats = pair_stats_fast(alpha, beta, zero_tol)
    if stats.pos_count == 0 and stats.neg_count == 0:
        raise DegenerateError("every pair projects into the zero band")
    major = 1 if stats.pos_count >= stats.neg_count else -1

    order = np.argsort(beta, kind="stable")
    beta_sorted = beta[order]
    edges_a = []
    edges_b = []
    if major == 1:
        # violations: alpha_i - beta_j <= zero_tol  <=>  beta_j >= alpha_i - zero_tol
        starts = np.searchsorted(beta_sorted, alpha - zero_tol, side="left")
        for i, start in enumerate(starts):
            if start < beta.size:
                edges_a.append(np.full(beta.size - start, i))
                edges_b.append(order[start:])
    else:
        # violations: alpha_i - beta_j >= -zero_tol  <=>  beta_j <= alpha_i + zero_tol
        stops = np.searchsorted(beta_sorted, alpha + zero_tol, side="right")
        for i, stop in enumerate(stops):
            if stop > 0:
                edges_a.append(np.full(stop, i))
                edges_b.append(order[:stop])
    if edges_a:
        edges = np.stack(
            [np.concatenate(edges_a), np.concatenate(edges_b)], axis=1
        ).astype(np.int64)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    deg_a = np.bincount(edges[:, 0], minlength=task.i_count)
    deg_b = np.bincount(edges[:, 1], minlength=task.j_count)
    return ViolationGraph(
        a_vertices=np.flatnonzero(deg_a),
        b_vertices=np.flatnonzero(deg_b),
        edges=edges,
        degrees_a=deg_a,
        degrees_b=deg_b,
        major_side=major,
    )


def greedy_maxls(
    task: BinaryTask, omega, zero_tol: float | None = None
) -> MaxLsResult:
    """Delete maximum-degree vertices until the violation graph is empty.

    Degree ties prefer the side whose live class is currently larger (then
    side A, then the lower row index), which keeps the result deterministic
    and tends to preserve more total points.
    """
    graph = violation_edges(task, omega, zero_tol)
    adj_a: dict[int, set[int]] = {}
    adj_b: dict[int, set[int]] = {}
    for i, j in graph.edges:
        adj_a.setdefault(int(i), set()).add(int(j))
        adj_b.setdefault(int(j), set()).add(int(i))
    live_a = task.i_count
    live_b = task.j_count
    removed: list[tuple[str, int, int]] = []
    gone_a: set[int] = set()
    gone_b: set[int] = set()

    while adj_a or adj_b:
        best_deg_a = max((len(v) for v in adj_a.values()), default=0)
        best_deg_b = max((len(v) for v in adj_b.values()), default=0)
        top = max(best_deg_a, best_deg_b)
        pick_a = best_deg_a == top and (best_deg_b < top or live_a >= live_b)
        if pick_a:
            row = min(i for i, v in adj_a.items() if len(v) == top)
            gone_a.add(row)
            live_a -= 1
            removed.append(("a", row, top))
            for j in adj_a.pop(row):
                adj_b[j].discard(row)
                if not adj_b[j]:
                    del adj_b[j]
        else:
            row = min(j for j, v in adj_b.items() if len(v) == top)
            gone_b.add(row)
            live_b -= 1
            removed.append(("b", row, top))
            for i in adj_b.pop(row):
                adj_a[i].discard(row)
                if not adj_a[i]:
                    del adj_a[i]

    kept_a = np.asarray([i for i in range(task.i_count) if i not in gone_a])
    kept_b = np.asarray([j for j in range(task.j_count) if j not in gone_b])
    return MaxLsResult(
        kept_a=kept_a,
        kept_b=kept_b,
        removed=tuple(removed),
        major_side=graph.major_side,
    )


def verify_separable(task: BinaryTask, omega, zero_tol: float | None = None) -> bool:
    """True iff every projected pair is strictly one-signed beyond the band."""
    alpha, beta = project(task, omega.omega if hasattr(omega, "omega") else omega)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    stats = pair_stats_fast(alpha, beta, zero_tol)
    return stats.pos_count == stats.total or stats.neg_count == stats.total


def verify_result(
    task: BinaryTask, result: MaxLsResult, omega, zero_tol: float | None = None
) -> bool:
    """Check the greedy output against the inducing weight."""
    if result.kept_a.size == 0 or result.kept_b.size == 0:
        return True
    return verify_separable(task.subset(result.kept_a, result.kept_b), omega, zero_tol)
