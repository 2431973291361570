"""Minkowski-difference statistics without materializing the I*J cloud.

For sets A (I points) and B (J points) the Minkowski difference is the set
of all pairwise differences a_i - b_j.  Everything the measures need comes
in closed form from per-set column sums and Gram matrices:

    m_tilde = J * sum(A) - I * sum(B)
    M M^T   = J * A^T A + I * B^T B - sa sb^T - sb sa^T

Projection pair statistics (counts of positive / negative / near-zero
pairs, plus |.| and signed sums) come either from an explicit pairwise
table (the oracle) or from a sort-and-prefix-sum path in O((I+J) log J).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import BinaryTask
from .errors import ShapeError
from .linalg import gram_accumulate

ZERO_TOL_SCALE = 1e-12


@dataclass(frozen=True)
class PairStats:
    """Side counts and distance sums of projected Minkowski differences."""

    pos_count: int
    neg_count: int
    zero_count: int
    abs_sum: float
    signed_sum: float

    @property
    def total(self) -> int:
        return self.pos_count + self.neg_count + self.zero_count


@dataclass(frozen=True)
class MdAggregates:
    """Closed-form sum vector and Gram matrix of the Minkowski difference."""

    m_tilde: np.ndarray
    md_gram: np.ndarray
    i_count: int
    j_count: int

    @classmethod
    def from_task(cls, task: BinaryTask) -> "MdAggregates":
        return cls(md_sum(task), md_gram(task), task.i_count, task.j_count)


def md_sum(task: BinaryTask) -> np.ndarray:
    """Sum of all I*J difference points, in O((I+J) N)."""
    return task.j_count * task.set_a.sum(axis=0) - task.i_count * task.set_b.sum(axis=0)


def md_gram(task: BinaryTask) -> np.ndarray:
    """Gram matrix of the difference cloud, in O((I+J) N^2) and O(N^2) memory."""
    n = task.n_features
    sa = task.set_a.sum(axis=0)
    sb = task.set_b.sum(axis=0)
    gram = np.zeros((n, n))
    gram_accumulate(task.set_a, float(task.j_count), gram)
    gram_accumulate(task.set_b, float(task.i_count), gram)
    cross = np.outer(sa, sb)
    gram -= cross + cross.T
    return gram


def project(task: BinaryTask, omega) -> tuple[np.ndarray, np.ndarray]:
    """Per-point projections (alpha_i, beta_j); pair value is alpha_i - beta_j."""
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (task.n_features,):
        raise ShapeError(
            f"weight length {omega.shape} vs {task.n_features} features"
        )
    return task.set_a @ omega, task.set_b @ omega


def default_zero_tol(alpha, beta) -> float:
    """Relative band that keeps rounding noise from flapping pair signs."""
    alpha = np.asarray(alpha)
    beta = np.asarray(beta)
    peak_a = float(np.abs(alpha).max()) if alpha.size else 0.0
    peak_b = float(np.abs(beta).max()) if beta.size else 0.0
    return ZERO_TOL_SCALE * (peak_a + peak_b + 1.0)


def pair_stats_naive(alpha, beta, zero_tol: float | None = None) -> PairStats:
    """Explicit pairwise table, O(I*J).  Serves as the oracle for the fast path."""
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    diffs = alpha[:, None] - beta[None, :]
    pos = int(np.count_nonzero(diffs > zero_tol))
    neg = int(np.count_nonzero(diffs < -zero_tol))
    zero = diffs.size - pos - neg
    return PairStats(pos, neg, zero, float(np.abs(diffs).sum()), float(diffs.sum()))


def pair_stats_fast(alpha, beta, zero_tol: float | None = None) -> PairStats:
    """Sorted-beta path: same counts as the naive table in O((I+J) log J).

    For each alpha the split points against sorted beta give the side
    counts; prefix sums give the absolute-distance total exactly:

        sum_j |a - b_j| = a * (2k - J) + (P_J - 2 P_k),  k = #{b_j < a}.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    j = beta.size
    beta_sorted = np.sort(beta)
    prefix = np.concatenate([[0.0], np.cumsum(beta_sorted)])
    below = np.searchsorted(beta_sorted, alpha - zero_tol, side="left")
    not_above = np.searchsorted(beta_sorted, alpha + zero_tol, side="right")
    pos = int(below.sum())
    neg = int(j * alpha.size - not_above.sum())
    zero = alpha.size * j - pos - neg
    split = np.searchsorted(beta_sorted, alpha, side="left")
    abs_sum = float(
        (alpha * (2 * split - j)).sum()
        + alpha.size * prefix[j]
        - 2.0 * prefix[split].sum()
    )
    signed_sum = float(j * alpha.sum() - alpha.size * beta.sum())
    return PairStats(pos, neg, zero, abs_sum, signed_sum)
