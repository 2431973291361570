"""Pseudo-linear mappings: random hidden layers and their separability effect.

A hidden layer is modeled as x -> sigma(V^T x) with an elementwise monotone
activation.  The module provides closed-form first and second derivatives
for the smooth activation families, the curvature ratio

    f_sigma(x, y) = [sigma''(x) - sigma''(y)] (x - y) / [sigma'(x) + sigma'(y)]

whose >2 region is sufficient (to second order) for a difference point to
switch sides under the mapping, plus Monte-Carlo width and depth studies
that tally how often a random layer increases the quadratic measure ls2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import BinaryTask
from .errors import DegenerateError, ShapeError, UnsupportedError
from .measures import exact_weight, ls2_at

SMOOTH_KINDS = ("sigmoid", "tanh", "arctan", "softsign")
ALL_KINDS = SMOOTH_KINDS + ("relu",)


def act_apply(kind: str, x):
    """Elementwise activation value; defined for every kind including relu."""
    x = np.asarray(x, dtype=np.float64)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-x))
    if kind == "tanh":
        return np.tanh(x)
    if kind == "arctan":
        return np.arctan(x)
    if kind == "softsign":
        return x / (1.0 + np.abs(x))
    if kind == "relu":
        return np.maximum(x, 0.0)
    raise UnsupportedError(f"unknown activation {kind!r}")


def act_eval(kind: str, x):
    """Value, first, and second derivative of a smooth activation.

    relu has no second derivative and is rejected here; use act_apply for
    plain evaluation.
    """
    x = np.asarray(x, dtype=np.float64)
    if kind == "sigmoid":
        s = 1.0 / (1.0 + np.exp(-x))
        d1 = s * (1.0 - s)
        return s, d1, d1 * (1.0 - 2.0 * s)
    if kind == "tanh":
        t = np.tanh(x)
        d1 = 1.0 - t * t
        return t, d1, -2.0 * t * d1
    if kind == "arctan":
        q = 1.0 + x * x
        return np.arctan(x), 1.0 / q, -2.0 * x / (q * q)
    if kind == "softsign":
        q = 1.0 + np.abs(x)
        return x / q, 1.0 / (q * q), -2.0 * np.sign(x) / (q * q * q)
    if kind == "relu":
        raise UnsupportedError("relu has no second derivative")
    raise UnsupportedError(f"unknown activation {kind!r}")


def f_sigma(kind: str, x, y):
    """Curvature ratio of one hidden unit over the argument pair (x, y)."""
    _, d1x, d2x = act_eval(kind, x)
    _, d1y, d2y = act_eval(kind, y)
    denom = d1x + d1y
    num = (d2x - d2y) * (np.asarray(x, dtype=np.float64) - np.asarray(y))
    if np.isscalar(denom) or denom.ndim == 0:
        if denom <= 0.0:
            raise DegenerateError("vanishing derivative sum")
        return float(num / denom)
    out = np.full(np.broadcast(num, denom).shape, np.nan)
    good = denom > 0.0
    np.divide(num, denom, out=out, where=good)
    return out


@dataclass(frozen=True)
class GridCell:
    x: float
    y: float
    value: float
    above_threshold: bool


def f_sigma_grid(
    kind: str,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    step: float,
    threshold: float = 2.0,
) -> list[GridCell]:
    """Tabulate f_sigma on a rectangular grid; degenerate cells become NaN."""
    if step <= 0:
        raise ValueError("step must be positive")
    xs = np.arange(x_range[0], x_range[1], step)
    ys = np.arange(y_range[0], y_range[1], step)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    values = f_sigma(kind, gx.ravel(), gy.ravel())
    cells = []
    for x, y, v in zip(gx.ravel(), gy.ravel(), np.asarray(values).ravel()):
        above = bool(np.isfinite(v) and v > threshold)
        cells.append(GridCell(float(x), float(y), float(v), above))
    return cells


@dataclass(frozen=True)
class PlmStack:
    """Stack of random layer weights; layer l maps H_{l-1} -> H_l."""

    layers: tuple[np.ndarray, ...]
    kind: str

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.shape[1] != nxt.shape[0]:
                raise ShapeError(
                    f"layer shapes do not chain: {prev.shape} -> {nxt.shape}"
                )

    @property
    def depth(self) -> int:
        return len(self.layers)


def random_plm_stack(
    n_in: int,
    widths,
    kind: str,
    init: str = "gaussian",
    seed=0,
    init_scale: float = 1.0,
) -> PlmStack:
    """Draw layer weights sequentially from one seeded generator.

    gaussian init has variance init_scale^2 / fan_in; uniform init draws
    from +-init_scale.
    """
    widths = list(widths)
    if not widths:
        raise ValueError("need at least one layer width")
    if kind not in ALL_KINDS:
        raise UnsupportedError(f"unknown activation {kind!r}")
    rng = np.random.default_rng(seed)
    layers = []
    fan_in = n_in
    for width in widths:
        if init == "gaussian":
            v = rng.normal(0.0, init_scale / math.sqrt(fan_in), (fan_in, width))
        elif init == "uniform":
            v = rng.uniform(-init_scale, init_scale, (fan_in, width))
        else:
            raise ValueError(f"unknown init {init!r}")
        layers.append(v)
        fan_in = width
    return PlmStack(tuple(layers), kind)


def apply_plm(stack: PlmStack, x) -> list[np.ndarray]:
    """Push rows of X through the stack; returns every layer's output."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != stack.layers[0].shape[0]:
        raise ShapeError(
            f"input has {x.shape[1] if x.ndim == 2 else '?'} features, "
            f"stack expects {stack.layers[0].shape[0]}"
        )
    outputs = []
    current = x
    for v in stack.layers:
        current = act_apply(stack.kind, current @ v)
        outputs.append(current)
    return outputs


def _wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial fraction."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class StudyRow:
    """One Monte-Carlo tally: how often the mapped ls2 beat the original.

    trajectory holds the trial-averaged ls2 of every intermediate layer
    (one entry per stacked layer; the last one is the final output).
    """

    size: int                 # width or depth, depending on the study
    trials: int
    increase_count: int
    degenerate_count: int
    fraction: float
    ci_low: float
    ci_high: float
    trajectory: tuple[float, ...]

    @property
    def mean_ls2(self) -> float:
        return self.trajectory[-1] if self.trajectory else 0.0

    def to_row(self) -> list:
        return [
            self.size,
            self.trials,
            self.increase_count,
            self.degenerate_count,
            self.fraction,
            self.ci_low,
            self.ci_high,
        ]


def _ls2_per_layer(task: BinaryTask, stack: PlmStack, ridge_rel: float) -> list[float]:
    """ls2 at the exact weight of every layer's output task."""
    outputs_a = apply_plm(stack, task.set_a)
    outputs_b = apply_plm(stack, task.set_b)
    values = []
    for mapped_a, mapped_b in zip(outputs_a, outputs_b):
        mapped = BinaryTask(mapped_a, mapped_b)
        values.append(ls2_at(mapped, exact_weight(mapped, ridge_rel)))
    return values


def _study(
    task: BinaryTask,
    sizes,
    widths_for,
    trials: int,
    kind: str,
    init: str,
    seed: int,
    ridge_rel: float,
) -> list[StudyRow]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = ls2_at(task, exact_weight(task, ridge_rel))
    rows = []
    for size in sizes:
        widths = widths_for(size)
        increases = 0
        degenerates = 0
        layer_sums = np.zeros(max(len(widths), 1))
        for trial in range(trials):
            if not widths:
                # empty stack: identity mapping, never an increase
                layer_sums[0] += base
                continue
            stack = random_plm_stack(
                task.n_features, widths, kind, init, seed=[seed, trial]
            )
            try:
                per_layer = _ls2_per_layer(task, stack, ridge_rel)
            except DegenerateError:
                degenerates += 1
                continue
            layer_sums += per_layer
            if per_layer[-1] > base:
                increases += 1
        fraction = increases / trials
        low, high = _wilson_interval(increases, trials)
        rows.append(
            StudyRow(size, trials, increases, degenerates, fraction, low, high,
                     tuple(layer_sums / trials))
        )
    return rows


def width_study(
    task: BinaryTask,
    widths,
    trials: int,
    kind: str = "sigmoid",
    init: str = "gaussian",
    seed: int = 0,
    ridge_rel: float = 1e-10,
) -> list[StudyRow]:
    """Per-width fraction of random single-layer maps that raise ls2."""
    return _study(task, list(widths), lambda w: [w], trials, kind, init, seed,
                  ridge_rel)


def depth_study(
    task: BinaryTask,
    depths,
    width: int,
    trials: int,
    kind: str = "sigmoid",
    init: str = "gaussian",
    seed: int = 0,
    ridge_rel: float = 1e-10,
) -> list[StudyRow]:
    """Per-depth fraction for stacks of fixed width.

    Depth 1 reproduces width_study at that width: the first layer of every
    stack is drawn from the same generator state.
    """
    return _study(task, list(depths), lambda d: [width] * d, trials, kind, init,
                  seed, ridge_rel)


@dataclass(frozen=True)
class FlipCheck:
    """Per-column curvature condition and the observed side switch."""

    condition_holds: np.ndarray
    side_before: int
    side_after: int

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.condition_holds))

    @property
    def flipped(self) -> bool:
        return self.side_before != 0 and self.side_after == -self.side_before


def flip_check(a, b, v, omega, kind: str) -> FlipCheck:
    """Evaluate the side-switch condition for one difference point.

    Checks f_sigma(<a, v_h>, <b, v_h>) > 2 per column and reports the side
    of a-b w.r.t. omega against the side of sigma(V^T a) - sigma(V^T b)
    w.r.t. V^T omega.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    xa = a @ v
    xb = b @ v
    ratios = f_sigma(kind, xa, xb)
    ratios = np.atleast_1d(np.asarray(ratios))
    before = float(omega @ (a - b))
    mapped = act_apply(kind, xa) - act_apply(kind, xb)
    after = float((v.T @ omega) @ mapped)
    return FlipCheck(
        condition_holds=ratios > 2.0,
        side_before=int(np.sign(before)),
        side_after=int(np.sign(after)),
    )
