"""Self-contained minibatch-SGD MLP with per-epoch separability tracking.

The network is a plain fully connected classifier trained with manual
backpropagation.  After every epoch a fixed probe subset of the training
data is pushed through the network and each hidden layer's output (plus the
raw input as a baseline) is scored with the separability measures, so the
per-layer curves can be compared against the accuracy curves.  The same
tracking pipeline also runs over externally dumped activations described by
a run manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import (
    EpochEntry,
    LabeledDataset,
    RunManifest,
    binary_task,
    load_labels,
    load_matrix_binary,
    subsample_probe,
    write_labels_binary,
    write_matrix_binary,
)
from .errors import DegenerateError, SepscopeError, ShapeError, TrainingError
from .measures import MeasureReport, measure_task, multi_ls

MEASURE_FIELDS = ("ls_star", "ls0", "ls1", "ls2", "j_omega")


@dataclass(frozen=True)
class MlpConfig:
    """Architecture and training protocol of the demo network."""

    widths: tuple[int, ...]              # [n_in, h1, ..., hL, n_out]
    activation: str = "relu"             # relu | sigmoid
    output: str = "softmax"              # softmax | sigmoid (binary only)
    learning_rate: float = 0.1
    batch_size: int = 32
    epochs: int = 100
    seed: int = 0
    probe_size: int = 500
    probe_weight_mode: str = "approximate"
    probe_resample: bool = False

    def __post_init__(self):
        if len(self.widths) < 2 or any(w < 1 for w in self.widths):
            raise ValueError("widths must chain at least input -> output, all >= 1")
        # zero learning rate is allowed: a frozen run is the cheapest check
        # that measurement never perturbs training
        if self.epochs < 1 or self.learning_rate < 0 or self.batch_size < 1:
            raise ValueError("epochs >= 1, learning_rate >= 0, batch_size >= 1")
        if self.activation not in ("relu", "sigmoid"):
            raise ValueError(f"unsupported hidden activation {self.activation!r}")
        if self.output not in ("softmax", "sigmoid"):
            raise ValueError(f"unsupported output {self.output!r}")
        if self.output == "sigmoid" and self.widths[-1] != 2:
            raise ValueError("sigmoid output requires exactly two classes")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))


@dataclass(frozen=True)
class LayerMeasure:
    """Per-layer separability summary stored in the epoch series."""

    ls_star: float
    ls0: float
    ls1: float
    ls2: float
    j_omega: float
    zero_count: int
    degenerate: bool
    error: str | None = None

    @classmethod
    def from_report(cls, report: MeasureReport) -> "LayerMeasure":
        return cls(
            ls_star=report.ls_star,
            ls0=report.ls0,
            ls1=report.ls1,
            ls2=report.ls2,
            j_omega=report.j_omega,
            zero_count=report.pair_stats.zero_count,
            degenerate=report.degenerate,
        )

    @classmethod
    def failed(cls, message: str) -> "LayerMeasure":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0, True, error=message)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_acc: float | None
    test_acc: float | None
    layers: dict[str, LayerMeasure]


@dataclass
class TrackSeries:
    """Aligned per-epoch accuracies and per-layer measures."""

    records: list[EpochRecord] = field(default_factory=list)

    @property
    def layer_names(self) -> list[str]:
        names: list[str] = []
        for rec in self.records:
            for name in rec.layers:
                if name not in names:
                    names.append(name)
        return names

    def column(self, layer: str, measure: str) -> np.ndarray:
        return np.asarray(
            [getattr(rec.layers[layer], measure) for rec in self.records]
        )

    def accuracy(self, split: str = "train_acc") -> np.ndarray:
        return np.asarray(
            [getattr(rec, split) if getattr(rec, split) is not None else np.nan
             for rec in self.records]
        )

    def to_csv_rows(self) -> list[list]:
        layers = self.layer_names
        header = ["epoch", "train_acc", "test_acc"]
        fields = MEASURE_FIELDS + ("zero_count", "degenerate")
        for name in layers:
            header.extend(f"{name}:{f}" for f in fields)
        rows = [header]
        for rec in self.records:
            row: list = [rec.epoch, rec.train_acc, rec.test_acc]
            for name in layers:
                cell = rec.layers.get(name)
                if cell is None:
                    row.extend([None] * len(fields))
                else:
                    row.extend(getattr(cell, f) for f in MEASURE_FIELDS)
                    row.extend([cell.zero_count, int(cell.degenerate)])
            rows.append(row)
        return rows


def make_synthetic(
    kind: str, n_per_class: int, noise: float, seed: int, margin: float = 4.0
) -> LabeledDataset:
    """Deterministic 2-D toy datasets: gaussians, xor, or rings."""
    if n_per_class < 2:
        raise ValueError("need at least two points per class")
    rng = np.random.default_rng(seed)
    if kind == "gaussians":
        a = rng.normal((-margin / 2.0, 0.0), noise, (n_per_class, 2))
        b = rng.normal((margin / 2.0, 0.0), noise, (n_per_class, 2))
        points = np.vstack([a, b])
        labels = np.repeat([0, 1], n_per_class)
    elif kind == "xor":
        half = n_per_class - n_per_class // 2
        centers0 = [(1.0, 1.0)] * half + [(-1.0, -1.0)] * (n_per_class // 2)
        centers1 = [(1.0, -1.0)] * half + [(-1.0, 1.0)] * (n_per_class // 2)
        pts0 = np.asarray(centers0) + rng.normal(0.0, noise, (n_per_class, 2))
        pts1 = np.asarray(centers1) + rng.normal(0.0, noise, (n_per_class, 2))
        points = np.vstack([pts0, pts1])
        labels = np.repeat([0, 1], n_per_class)
    elif kind == "rings":
        radii = (1.0, 2.0)
        parts = []
        for r in radii:
            theta = rng.uniform(0.0, 2.0 * math.pi, n_per_class)
            rad = r + rng.normal(0.0, noise, n_per_class)
            parts.append(np.column_stack([rad * np.cos(theta), rad * np.sin(theta)]))
        points = np.vstack(parts)
        labels = np.repeat([0, 1], n_per_class)
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return LabeledDataset(points, labels, 2)


class Mlp:
    """Fully connected network with manual forward/backward passes."""

    def __init__(self, config: MlpConfig):
        self.config = config
        rng = np.random.default_rng([config.seed, 1])
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        out_units = 1 if config.output == "sigmoid" else config.widths[-1]
        dims = list(config.widths[:-1]) + [out_units]
        for fan_in, fan_out in zip(dims, dims[1:]):
            self.weights.append(rng.normal(0.0, 1.0 / math.sqrt(fan_in),
                                           (fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def hidden_count(self) -> int:
        return len(self.weights) - 1

    def _act(self, z: np.ndarray) -> np.ndarray:
        if self.config.activation == "relu":
            return np.maximum(z, 0.0)
        return 1.0 / (1.0 + np.exp(-z))

    def _act_grad(self, activated: np.ndarray) -> np.ndarray:
        if self.config.activation == "relu":
            return (activated > 0.0).astype(np.float64)
        return activated * (1.0 - activated)

    def forward(self, x: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Hidden activations and output probabilities for a batch of rows."""
        hidden = []
        current = x
        # divergence shows up as non-finite loss; no need for overflow noise
        with np.errstate(over="ignore", invalid="ignore"):
            for w, b in zip(self.weights[:-1], self.biases[:-1]):
                current = self._act(current @ w + b)
                hidden.append(current)
            logits = current @ self.weights[-1] + self.biases[-1]
            if self.config.output == "softmax":
                shifted = logits - logits.max(axis=1, keepdims=True)
                expd = np.exp(shifted)
                probs = expd / expd.sum(axis=1, keepdims=True)
            else:
                probs = 1.0 / (1.0 + np.exp(-logits))
        return hidden, probs

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        _, probs = self.forward(x)
        eps = 1e-12
        with np.errstate(invalid="ignore"):
            if self.config.output == "softmax":
                picked = probs[np.arange(len(y)), y]
                return float(-np.mean(np.log(picked + eps)))
            p = probs[:, 0]
            return float(
                -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
            )

    def gradients(self, x, y):
        """Cross-entropy gradients for one minibatch."""
        hidden, probs = self.forward(x)
        batch = len(y)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.config.output == "softmax":
                delta = probs.copy()
                delta[np.arange(batch), y] -= 1.0
                delta /= batch
            else:
                delta = (probs[:, 0] - y)[:, None] / batch
            grads_w = [None] * len(self.weights)
            grads_b = [None] * len(self.biases)
            layer_inputs = [x] + hidden
            for layer in range(len(self.weights) - 1, -1, -1):
                grads_w[layer] = layer_inputs[layer].T @ delta
                grads_b[layer] = delta.sum(axis=0)
                if layer > 0:
                    delta = (delta @ self.weights[layer].T) * self._act_grad(
                        hidden[layer - 1]
                    )
        return grads_w, grads_b

    def step(self, x, y, learning_rate: float) -> None:
        grads_w, grads_b = self.gradients(x, y)
        for w, b, gw, gb in zip(self.weights, self.biases, grads_w, grads_b):
            w -= learning_rate * gw
            b -= learning_rate * gb

    def predict(self, x: np.ndarray) -> np.ndarray:
        _, probs = self.forward(x)
        if self.config.output == "softmax":
            return probs.argmax(axis=1)
        return (probs[:, 0] >= 0.5).astype(np.int64)

    def accuracy(self, ds: LabeledDataset) -> float:
        return float(np.mean(self.predict(ds.points) == ds.labels))


def _measure_layer(
    points: np.ndarray, labels: np.ndarray, class_count: int, weight_mode: str
) -> LayerMeasure:
    ds = LabeledDataset(points, labels, class_count)
    if class_count == 2:
        report = measure_task(binary_task(ds, 1), weight_mode)
        return LayerMeasure.from_report(report)
    bundle = multi_ls(ds, weight_mode)
    zero_total = sum(r.pair_stats.zero_count for r in bundle.reports)
    return LayerMeasure(
        ls_star=bundle.value("ls_star"),
        ls0=bundle.value("ls0"),
        ls1=bundle.value("ls1"),
        ls2=bundle.value("ls2"),
        j_omega=bundle.value("j_omega"),
        zero_count=zero_total,
        degenerate=any(r.degenerate for r in bundle.reports),
    )


def _layer_names(hidden_count: int) -> list[str]:
    return ["input"] + [f"h{k + 1}" for k in range(hidden_count)]


def train_mlp(
    config: MlpConfig,
    train: LabeledDataset,
    test: LabeledDataset | None = None,
    dump_dir=None,
    run_id: str = "demo",
) -> TrackSeries:
    """Train the network and score every hidden layer after each epoch.

    Measurement only reads epoch snapshots; the training trajectory is
    identical with or without it.  With dump_dir set, each epoch's probe
    activations are written in the manifest format for round-trip checks.
    """
    if train.n_features != config.widths[0]:
        raise ShapeError(
            f"dataset has {train.n_features} features, config expects {config.widths[0]}"
        )
    if train.class_count != config.widths[-1]:
        raise ShapeError(
            f"dataset has {train.class_count} classes, config expects {config.widths[-1]}"
        )
    net = Mlp(config)
    shuffle_rng = np.random.default_rng([config.seed, 2])
    probe_rng = np.random.default_rng([config.seed, 3])
    probe = subsample_probe(train, config.probe_size,
                            int(probe_rng.integers(2**32)))
    series = TrackSeries()
    manifest = RunManifest(run_id=run_id) if dump_dir is not None else None
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        manifest.base_dir = dump_dir

    names = _layer_names(net.hidden_count)
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(train.n_rows)
        for start in range(0, train.n_rows, config.batch_size):
            batch = order[start:start + config.batch_size]
            net.step(train.points[batch], train.labels[batch], config.learning_rate)
        loss = net.loss(train.points, train.labels)
        if not np.isfinite(loss):
            raise TrainingError(
                f"training diverged at epoch {epoch}", partial_series=series
            )
        if config.probe_resample:
            probe = subsample_probe(train, config.probe_size,
                                    int(probe_rng.integers(2**32)))
        hidden, _ = net.forward(probe.points)
        layer_points = [probe.points] + hidden
        layers = {
            name: _measure_layer(pts, probe.labels, train.class_count,
                                 config.probe_weight_mode)
            for name, pts in zip(names, layer_points)
        }
        train_acc = net.accuracy(train)
        test_acc = net.accuracy(test) if test is not None else None
        series.records.append(EpochRecord(epoch, train_acc, test_acc, layers))

        if manifest is not None:
            entry_layers = {}
            for name, pts in zip(names, layer_points):
                mat_name = f"epoch{epoch:03d}_{name}.lsmx"
                lab_name = f"epoch{epoch:03d}_labels.lsmy"
                write_matrix_binary(pts, dump_dir / mat_name, dtype="f8")
                write_labels_binary(probe.labels, dump_dir / lab_name)
                entry_layers[name] = {"data": mat_name, "labels": lab_name}
            manifest.epochs.append(
                EpochEntry(epoch, entry_layers, train_acc, test_acc)
            )

    if manifest is not None:
        manifest.save(dump_dir / "manifest.json")
    return series


def _track_cell(manifest: RunManifest, files: dict, weight_mode: str) -> LayerMeasure:
    try:
        points = load_matrix_binary(manifest.resolve(files["data"]))
        labels = load_labels(manifest.resolve(files["labels"]))
        if points.shape[0] != labels.size:
            raise ShapeError(
                f"{files['data']}: {points.shape[0]} rows vs {labels.size} labels"
            )
        class_count = int(labels.max()) + 1
        return _measure_layer(points, labels, class_count, weight_mode)
    except (SepscopeError, OSError) as exc:
        return LayerMeasure.failed(str(exc))


def track_manifest(
    manifest: RunManifest, weight_mode: str = "approximate", threads: int = 1
) -> TrackSeries:
    """Score externally dumped activations, epoch by epoch, layer by layer.

    A broken file flags its (epoch, layer) cell and the series continues.
    Cells are independent; with threads > 1 they run on a pool and are
    merged back in manifest order, so the result does not depend on the
    worker count.
    """
    cells = [
        (k, name, entry.layers[name])
        for k, entry in enumerate(manifest.epochs)
        for name in entry.layers
    ]
    if threads > 1 and len(cells) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            measured = list(
                pool.map(lambda c: _track_cell(manifest, c[2], weight_mode), cells)
            )
    else:
        measured = [_track_cell(manifest, files, weight_mode) for _, _, files in cells]
    results = {(k, name): cell for (k, name, _), cell in zip(cells, measured)}
    series = TrackSeries()
    for k, entry in enumerate(manifest.epochs):
        layers = {name: results[(k, name)] for name in entry.layers}
        series.records.append(
            EpochRecord(entry.epoch, entry.train_acc, entry.test_acc, layers)
        )
    return series


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    k = 0
    while k < len(values):
        k2 = k
        while k2 + 1 < len(values) and sorted_vals[k2 + 1] == sorted_vals[k]:
            k2 += 1
        ranks[order[k:k2 + 1]] = (k + k2) / 2.0 + 1.0
        k = k2 + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation with mid-ranked ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size or x.size < 3:
        raise ValueError("need two equal-length series of at least 3 points")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateError("constant series has no rank correlation")
    rx = _midranks(x)
    ry = _midranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / math.sqrt((rx @ rx) * (ry @ ry)))


def sync_correlation(
    series: TrackSeries,
    layer: str,
    measure: str = "ls1",
    against: str = "train_acc",
) -> float:
    """Rank correlation between a layer's measure curve and an accuracy curve."""
    if len(series.records) < 3:
        raise ValueError("need at least three epochs")
    return spearman(series.column(layer, measure), series.accuracy(against))
