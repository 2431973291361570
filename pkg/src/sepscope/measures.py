"""Linear separability measures of a binary task at a candidate weight.

Four measures are evaluated at a single hyperplane normal omega, using the
pair statistics of the projected Minkowski difference (pos/neg/zero counts,
absolute and signed distance sums):

    ls_star = max(pos, neg) / (I*J)            indicator ratio
    ls0     = |pos - neg| / (I*J)              sign ratio
    ls1     = |signed_sum| / abs_sum           directed-distance ratio
    ls2     = (omega^T m_tilde)^2 / (omega^T MM^T omega)

Near-zero pairs sit inside a relative tolerance band; they stay in the
denominator I*J but count toward neither side.  Global maximization of the
count-based measures is NP-hard, so weights come from two closed-form
protocols: the normalized difference-sum (approximate) and the solution of
(MM^T + ridge) omega = m_tilde (exact, the rank-1 reduction of the Rayleigh
problem whose optimum is ls2).

The Fisher-LDA quotient J_omega is computed at the same weight for
comparison, never at the LDA-optimal weight.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .aggregates import (
    MdAggregates,
    PairStats,
    default_zero_tol,
    md_gram,
    md_sum,
    pair_stats_fast,
    project,
)
from .dataset import BinaryTask, LabeledDataset, binary_task
from .errors import DataError, DegenerateError
from .linalg import gram_accumulate, solve_spd_ridge

DEFAULT_RIDGE = 1e-10


@dataclass(frozen=True)
class WeightVector:
    """Hyperplane normal with provenance: approximate, exact, or user."""

    omega: np.ndarray
    provenance: str = "user"

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=np.float64)
        if omega.ndim != 1:
            raise DataError("weight must be a vector")
        if not np.all(np.isfinite(omega)):
            raise DataError("weight has non-finite entries")
        if not np.any(omega):
            raise DegenerateError("all-zero weight vector")
        object.__setattr__(self, "omega", omega)


@dataclass(frozen=True)
class MeasureReport:
    """All measures of one task at one weight, plus the pair tallies."""

    ls_star: float
    ls0: float
    ls1: float
    ls2: float
    j_omega: float
    pair_stats: PairStats
    weight: WeightVector | None
    degenerate: bool
    task_label: str = "binary"

    def to_json(self) -> dict:
        stats = self.pair_stats
        return {
            "task": self.task_label,
            "weight_mode": self.weight.provenance if self.weight else "degenerate",
            "ls_star": self.ls_star,
            "ls0": self.ls0,
            "ls1": self.ls1,
            "ls2": self.ls2,
            "j_omega": self.j_omega,
            "counts": {
                "pos": stats.pos_count,
                "neg": stats.neg_count,
                "zero": stats.zero_count,
            },
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class LdaStats:
    """Class means and within/between scatter of a binary task."""

    mu_a: np.ndarray
    mu_b: np.ndarray
    s_w: np.ndarray
    s_b: np.ndarray


def _as_weight(omega) -> WeightVector:
    if isinstance(omega, WeightVector):
        return omega
    return WeightVector(np.asarray(omega, dtype=np.float64))


def pair_stats_at(
    task: BinaryTask, omega, zero_tol: float | None = None
) -> PairStats:
    alpha, beta = project(task, _as_weight(omega).omega)
    return pair_stats_fast(alpha, beta, zero_tol)


def ls_star_at(task: BinaryTask, omega, zero_tol: float | None = None) -> float:
    """Indicator ratio at a fixed weight: max(pos, neg) / (I*J)."""
    stats = pair_stats_at(task, omega, zero_tol)
    return max(stats.pos_count, stats.neg_count) / stats.total


def ls0_at(task: BinaryTask, omega, zero_tol: float | None = None) -> float:
    """Sign ratio at a fixed weight: |pos - neg| / (I*J)."""
    stats = pair_stats_at(task, omega, zero_tol)
    return abs(stats.pos_count - stats.neg_count) / stats.total


def ls1_at(task: BinaryTask, omega, zero_tol: float | None = None) -> float:
    """Directed-distance ratio; 0 when every projection sits in the zero band."""
    omega = _as_weight(omega)
    alpha, beta = project(task, omega.omega)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    stats = pair_stats_fast(alpha, beta, zero_tol)
    if stats.abs_sum <= zero_tol * stats.total:
        return 0.0
    if stats.zero_count == 0 and stats.total in (stats.pos_count, stats.neg_count):
        return 1.0
    return min(abs(stats.signed_sum) / stats.abs_sum, 1.0)


def ls2_at(task: BinaryTask, omega, aggregates: MdAggregates | None = None) -> float:
    """Rayleigh-type ratio from the closed-form aggregates; 0 when degenerate."""
    omega = _as_weight(omega)
    agg = aggregates if aggregates is not None else MdAggregates.from_task(task)
    numerator = float(omega.omega @ agg.m_tilde) ** 2
    denominator = float(omega.omega @ agg.md_gram @ omega.omega)
    alpha, beta = project(task, omega.omega)
    tol = default_zero_tol(alpha, beta)
    if denominator <= tol * tol * agg.i_count * agg.j_count:
        return 0.0
    return numerator / denominator


def approx_weight(task: BinaryTask, aggregates: MdAggregates | None = None) -> WeightVector:
    """Normalized difference-sum direction m_tilde / ||m_tilde||."""
    m_tilde = aggregates.m_tilde if aggregates is not None else md_sum(task)
    norm = float(np.linalg.norm(m_tilde))
    if norm == 0.0:
        raise DegenerateError("difference sum is zero; class sums coincide")
    return WeightVector(m_tilde / norm, "approximate")


def exact_weight(
    task: BinaryTask,
    ridge_rel: float = DEFAULT_RIDGE,
    aggregates: MdAggregates | None = None,
) -> WeightVector:
    """Maximizer of ls2 via one SPD solve.

    The Rayleigh problem has a rank-one numerator, so the eigen formulation
    collapses to solving (MM^T + ridge) omega = m_tilde and normalizing; ls2
    at the result equals omega^T m_tilde up to the solve residual.
    """
    agg = aggregates if aggregates is not None else MdAggregates.from_task(task)
    if not np.any(agg.m_tilde):
        raise DegenerateError("difference sum is zero; class sums coincide")
    omega = solve_spd_ridge(agg.md_gram, agg.m_tilde, ridge_rel)
    norm = float(np.linalg.norm(omega))
    if norm == 0.0 or not np.all(np.isfinite(omega)):
        raise DegenerateError("solve returned a zero direction")
    return WeightVector(omega / norm, "exact")


def lda_stats(task: BinaryTask) -> LdaStats:
    """Class means and the within/between scatter matrices."""
    mu_a = task.set_a.mean(axis=0)
    mu_b = task.set_b.mean(axis=0)
    n = task.n_features
    s_w = np.zeros((n, n))
    gram_accumulate(task.set_a - mu_a, 1.0, s_w)
    gram_accumulate(task.set_b - mu_b, 1.0, s_w)
    diff = mu_a - mu_b
    return LdaStats(mu_a, mu_b, s_w, np.outer(diff, diff))


def j_omega_at(task: BinaryTask, omega, stats: LdaStats | None = None) -> float:
    """Fisher quotient at the given weight; 0 when the within scatter vanishes."""
    omega = _as_weight(omega)
    lda = stats if stats is not None else lda_stats(task)
    denominator = float(omega.omega @ lda.s_w @ omega.omega)
    scale = float(np.trace(lda.s_w)) * float(omega.omega @ omega.omega)
    if denominator <= 1e-15 * max(scale, 1e-300):
        return 0.0
    return float(omega.omega @ lda.s_b @ omega.omega) / denominator


def degenerate_report(task_label: str = "binary") -> MeasureReport:
    """Placeholder report so per-epoch tracking never aborts."""
    return MeasureReport(
        ls_star=0.0,
        ls0=0.0,
        ls1=0.0,
        ls2=0.0,
        j_omega=0.0,
        pair_stats=PairStats(0, 0, 0, 0.0, 0.0),
        weight=None,
        degenerate=True,
        task_label=task_label,
    )


def measure_at(
    task: BinaryTask,
    omega,
    zero_tol: float | None = None,
    task_label: str = "binary",
) -> MeasureReport:
    """All measures of one task at one fixed weight."""
    weight = _as_weight(omega)
    agg = MdAggregates.from_task(task)
    alpha, beta = project(task, weight.omega)
    if zero_tol is None:
        zero_tol = default_zero_tol(alpha, beta)
    stats = pair_stats_fast(alpha, beta, zero_tol)
    total = stats.total
    ls_star = max(stats.pos_count, stats.neg_count) / total
    ls0 = abs(stats.pos_count - stats.neg_count) / total

    degenerate = False
    if stats.abs_sum <= zero_tol * total:
        ls1 = 0.0
        degenerate = True
    elif stats.zero_count == 0 and total in (stats.pos_count, stats.neg_count):
        # counts certify strict one-sidedness, so the ratio is exactly 1;
        # the two sums only differ by accumulation order noise
        ls1 = 1.0
    else:
        ls1 = min(abs(stats.signed_sum) / stats.abs_sum, 1.0)

    numerator = float(weight.omega @ agg.m_tilde) ** 2
    denominator = float(weight.omega @ agg.md_gram @ weight.omega)
    if denominator <= zero_tol * zero_tol * total:
        ls2 = 0.0
        degenerate = True
    else:
        ls2 = numerator / denominator

    return MeasureReport(
        ls_star=ls_star,
        ls0=ls0,
        ls1=ls1,
        ls2=ls2,
        j_omega=j_omega_at(task, weight),
        pair_stats=stats,
        weight=weight,
        degenerate=degenerate,
        task_label=task_label,
    )


def measure_task(
    task: BinaryTask,
    weight_mode: str = "approximate",
    zero_tol: float | None = None,
    ridge_rel: float = DEFAULT_RIDGE,
    task_label: str = "binary",
) -> MeasureReport:
    """Compute the protocol weight, then every measure at that single weight.

    Degenerate weights yield an all-zero flagged report instead of raising,
    so epoch tracking stays total.
    """
    try:
        if weight_mode in ("approximate", "approx"):
            weight = approx_weight(task)
        elif weight_mode == "exact":
            weight = exact_weight(task, ridge_rel)
        else:
            raise ValueError(f"unknown weight mode {weight_mode!r}")
    except DegenerateError:
        return degenerate_report(task_label)
    return measure_at(task, weight, zero_tol, task_label)


@dataclass(frozen=True)
class MultiLsReport:
    """Per-class one-vs-rest reports plus size-weighted averages."""

    class_ids: tuple[int, ...]
    class_sizes: tuple[int, ...]
    reports: tuple[MeasureReport, ...]

    def value(self, kind: str) -> float:
        """Size-weighted average of one measure over the one-vs-rest tasks."""
        total = sum(self.class_sizes)
        return (
            sum(
                size * getattr(rep, kind)
                for size, rep in zip(self.class_sizes, self.reports)
            )
            / total
        )

    @property
    def multi(self) -> dict[str, float]:
        return {k: self.value(k) for k in ("ls_star", "ls0", "ls1", "ls2", "j_omega")}


def multi_ls(
    ds: LabeledDataset,
    weight_mode: str = "approximate",
    zero_tol: float | None = None,
    ridge_rel: float = DEFAULT_RIDGE,
) -> MultiLsReport:
    """One-vs-rest decomposition: S binary reports, size-weighted averages."""
    if ds.class_count < 2:
        raise DegenerateError("need at least two classes")
    reports = []
    sizes = []
    for cls in range(ds.class_count):
        task = binary_task(ds, cls)
        sizes.append(task.i_count)
        reports.append(
            replace(
                measure_task(task, weight_mode, zero_tol, ridge_rel),
                task_label=f"class{cls}",
            )
        )
    return MultiLsReport(
        class_ids=tuple(range(ds.class_count)),
        class_sizes=tuple(sizes),
        reports=tuple(reports),
    )
