"""Labeled point sets, on-disk formats, and task construction.

A dataset is a dense M x N float64 matrix of points plus one integer class
label per row.  Binary tasks are built one-vs-rest: the positive class forms
set A, everything else forms set B.  The module also owns the LSMX/LSMY
binary matrix and label formats and the JSON run manifest shared with
external activation exporters.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, LabelError, ParseError

LSMX_MAGIC = b"LSMX"
LSMY_MAGIC = b"LSMY"
LSM_VERSION = 1
_DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable labeled point set: rows are samples, labels are 0..S-1."""

    points: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.ndim != 2:
            raise DataError(f"points must be a 2-D matrix, got ndim={points.ndim}")
        if labels.shape != (points.shape[0],):
            raise LabelError(
                f"label count {labels.shape} does not match {points.shape[0]} rows"
            )
        if not np.all(np.isfinite(points)):
            raise DataError("points contain non-finite values")
        if points.shape[0] == 0:
            raise DataError("dataset has no rows")
        seen = np.unique(labels)
        if seen.min() < 0 or seen.max() >= self.class_count:
            raise LabelError(
                f"labels outside [0, {self.class_count}): {seen.min()}..{seen.max()}"
            )
        if len(seen) != self.class_count:
            missing = sorted(set(range(self.class_count)) - set(seen.tolist()))
            raise LabelError(f"class ids never observed: {missing}")
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_arrays(cls, points, labels) -> "LabeledDataset":
        """Build a dataset, inferring the class count from the labels."""
        labels = np.asarray(labels, dtype=np.int64)
        if labels.size == 0:
            raise LabelError("empty label vector")
        return cls(np.asarray(points, dtype=np.float64), labels, int(labels.max()) + 1)


@dataclass(frozen=True)
class BinaryTask:
    """One-vs-rest split: set_a is the positive class, set_b the complement."""

    set_a: np.ndarray
    set_b: np.ndarray
    a_indices: np.ndarray | None = None
    b_indices: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.set_a, dtype=np.float64)
        b = np.asarray(self.set_b, dtype=np.float64)
        if a.ndim != 2 or b.ndim != 2:
            raise DataError("task sides must be 2-D matrices")
        if a.shape[0] < 1 or b.shape[0] < 1:
            raise DataError("both task sides need at least one point")
        if a.shape[1] != b.shape[1]:
            raise DataError(
                f"feature mismatch between sides: {a.shape[1]} vs {b.shape[1]}"
            )
        object.__setattr__(self, "set_a", a)
        object.__setattr__(self, "set_b", b)

    @property
    def i_count(self) -> int:
        return self.set_a.shape[0]

    @property
    def j_count(self) -> int:
        return self.set_b.shape[0]

    @property
    def n_features(self) -> int:
        return self.set_a.shape[1]

    def subset(self, keep_a, keep_b) -> "BinaryTask":
        """Restrict both sides to the given row positions."""
        keep_a = np.asarray(keep_a, dtype=np.int64)
        keep_b = np.asarray(keep_b, dtype=np.int64)
        return BinaryTask(
            self.set_a[keep_a],
            self.set_b[keep_b],
            keep_a if self.a_indices is None else np.asarray(self.a_indices)[keep_a],
            keep_b if self.b_indices is None else np.asarray(self.b_indices)[keep_b],
        )

    def swapped(self) -> "BinaryTask":
        return BinaryTask(self.set_b, self.set_a, self.b_indices, self.a_indices)


def binary_task(ds: LabeledDataset, positive_class: int) -> BinaryTask:
    """One-vs-rest task for the given class id, row order preserved."""
    if not 0 <= positive_class < ds.class_count:
        raise LabelError(
            f"class {positive_class} outside [0, {ds.class_count})"
        )
    mask = ds.labels == positive_class
    if not mask.any() or mask.all():
        raise LabelError(f"class {positive_class} has an empty side")
    idx = np.arange(ds.n_rows)
    return BinaryTask(ds.points[mask], ds.points[~mask], idx[mask], idx[~mask])


def subsample_probe(
    ds: LabeledDataset, n: int, seed: int, stratified: bool = False
) -> LabeledDataset:
    """Uniform without-replacement subsample, deterministic per seed.

    Returns the dataset unchanged when n >= M.  Stratified mode allocates
    per-class counts by largest remainder (ties to the lower class id).
    """
    if n < 1:
        raise ValueError("probe size must be >= 1")
    if n >= ds.n_rows:
        return ds
    rng = np.random.default_rng(seed)
    if not stratified:
        chosen = rng.choice(ds.n_rows, size=n, replace=False)
    else:
        sizes = np.bincount(ds.labels, minlength=ds.class_count)
        exact = n * sizes / ds.n_rows
        counts = np.floor(exact).astype(int)
        remainder = n - counts.sum()
        order = np.lexsort((np.arange(ds.class_count), -(exact - counts)))
        for cls in order[:remainder]:
            counts[cls] += 1
        parts = []
        for cls in range(ds.class_count):
            rows = np.flatnonzero(ds.labels == cls)
            parts.append(rng.choice(rows, size=min(counts[cls], len(rows)), replace=False))
        chosen = np.concatenate(parts)
    chosen = np.sort(chosen)
    return LabeledDataset(ds.points[chosen], ds.labels[chosen], ds.class_count)


def _dense_labels(raw: list) -> np.ndarray:
    """Map raw label tokens to dense ids 0..S-1.

    Integer-like tokens are taken literally and must already be dense from
    zero; anything else is mapped by first appearance.
    """
    as_int = []
    integral = True
    for tok in raw:
        try:
            val = float(tok)
        except (TypeError, ValueError):
            integral = False
            break
        if not np.isfinite(val) or val != int(val):
            integral = False
            break
        as_int.append(int(val))
    if integral:
        labels = np.asarray(as_int, dtype=np.int64)
        seen = np.unique(labels)
        if seen.min() < 0 or not np.array_equal(seen, np.arange(len(seen))):
            raise LabelError(f"integer labels are not dense from zero: {seen.tolist()}")
        return labels
    mapping: dict = {}
    out = np.empty(len(raw), dtype=np.int64)
    for k, tok in enumerate(raw):
        key = str(tok)
        if key not in mapping:
            mapping[key] = len(mapping)
        out[k] = mapping[key]
    return out


def load_csv(
    path,
    label_column: int | None = None,
    labels_path=None,
) -> LabeledDataset:
    """Load a numeric CSV table; labels come from one column or a side file.

    An optional header row (any non-numeric token in the first row) is
    skipped.  Decimal point is '.', separator is ','.
    """
    if label_column is None and labels_path is None:
        raise ValueError("need label_column or labels_path")
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    rows: list[list[str]] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row and any(cell.strip() for cell in row):
                rows.append([cell.strip() for cell in row])
    if not rows:
        raise ParseError(f"empty file: {path}")

    def numeric(row):
        try:
            return [float(cell) for cell in row]
        except ValueError:
            return None

    def looks_like_header(row):
        # only non-label cells decide; a string label is data, not a header
        cells = (
            [c for k, c in enumerate(row) if k != label_column % len(row)]
            if label_column is not None
            else row
        )
        return numeric(cells) is None

    start = 0
    if looks_like_header(rows[0]):
        start = 1
        if len(rows) == 1:
            raise ParseError(f"{path}: header only, no data rows")
    width = len(rows[start])
    table = []
    for k, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ParseError(f"{path}: row {k} has {len(row)} cells, expected {width}")
        values = numeric(row)
        if values is None and label_column is not None:
            # allow a non-numeric label cell, everything else must parse
            values = []
            for c, cell in enumerate(row):
                if c == label_column % width:
                    values.append(cell)
                else:
                    try:
                        values.append(float(cell))
                    except ValueError:
                        raise ParseError(f"{path}: row {k}: bad number {cell!r}") from None
        elif values is None:
            raise ParseError(f"{path}: row {k}: non-numeric cell")
        table.append(values)

    if label_column is not None:
        col = label_column % width
        raw_labels = [row[col] for row in table]
        points = np.asarray(
            [[row[c] for c in range(width) if c != col] for row in table],
            dtype=np.float64,
        )
    else:
        raw_labels = load_labels(labels_path).tolist()
        points = np.asarray(table, dtype=np.float64)
        if len(raw_labels) != len(points):
            raise LabelError(
                f"{labels_path}: {len(raw_labels)} labels for {len(points)} rows"
            )
    if not np.all(np.isfinite(points)):
        raise DataError(f"{path}: non-finite value in table")
    labels = _dense_labels(raw_labels)
    return LabeledDataset(points, labels, int(labels.max()) + 1)


def write_matrix_binary(matrix, path, dtype: str = "f8") -> None:
    """Write an LSMX matrix file (row-major payload, little-endian header)."""
    matrix = np.ascontiguousarray(matrix)
    if matrix.ndim != 2:
        raise DataError("LSMX payload must be 2-D")
    code = {"f4": 1, "f8": 2}.get(dtype)
    if code is None:
        raise FormatError(f"unsupported dtype {dtype!r}")
    payload = matrix.astype(_DTYPE_CODES[code], copy=False)
    header = LSMX_MAGIC + struct.pack(
        "<IB3xQQ", LSM_VERSION, code, matrix.shape[0], matrix.shape[1]
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def load_matrix_binary(path) -> np.ndarray:
    """Read an LSMX file; 32-bit payloads are upcast to float64."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 28 or blob[:4] != LSMX_MAGIC:
        raise FormatError(f"{path}: bad magic or truncated header")
    version, code, rows, cols = struct.unpack("<IB3xQQ", blob[4:28])
    if version != LSM_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if code not in _DTYPE_CODES:
        raise FormatError(f"{path}: unknown dtype code {code}")
    dt = _DTYPE_CODES[code]
    expected = rows * cols * dt.itemsize
    if len(blob) - 28 != expected:
        raise FormatError(
            f"{path}: payload is {len(blob) - 28} bytes, header implies {expected}"
        )
    data = np.frombuffer(blob, dtype=dt, offset=28).reshape(rows, cols)
    return data.astype(np.float64)


def write_labels_binary(labels, path) -> None:
    """Write an LSMY label file (magic, u32 version, u64 count, i64 payload)."""
    labels = np.asarray(labels, dtype="<i8")
    header = LSMY_MAGIC + struct.pack("<IQ", LSM_VERSION, labels.size)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(labels.tobytes())


def load_labels(path) -> np.ndarray:
    """Read labels from an LSMY file or a one-integer-per-line text file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == LSMY_MAGIC:
        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < 16:
            raise FormatError(f"{path}: truncated LSMY header")
        version, count = struct.unpack("<IQ", blob[4:16])
        if version != LSM_VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        if len(blob) - 16 != count * 8:
            raise FormatError(f"{path}: payload does not match count {count}")
        return np.frombuffer(blob, dtype="<i8", offset=16).astype(np.int64)
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty label file")
    try:
        return np.asarray([int(ln) for ln in lines], dtype=np.int64)
    except ValueError as exc:
        raise ParseError(f"{path}: bad label line: {exc}") from None


@dataclass
class EpochEntry:
    """One epoch of a tracked run: per-layer file paths plus accuracies."""

    epoch: int
    layers: dict[str, dict[str, str]]
    train_acc: float | None = None
    test_acc: float | None = None


@dataclass
class RunManifest:
    """Index of externally dumped activations consumed by the tracker."""

    run_id: str
    epochs: list[EpochEntry] = field(default_factory=list)
    base_dir: Path = field(default_factory=Path)

    def resolve(self, rel: str) -> Path:
        return self.base_dir / rel

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "epochs": [
                {
                    "epoch": e.epoch,
                    "layers": e.layers,
                    "train_acc": e.train_acc,
                    "test_acc": e.test_acc,
                }
                for e in self.epochs
            ],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path) -> "RunManifest":
        path = Path(path)
        if not path.exists():
            raise ParseError(f"no such manifest: {path}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
        if "run_id" not in doc or "epochs" not in doc:
            raise ParseError(f"{path}: manifest needs run_id and epochs")
        epochs = []
        for entry in doc["epochs"]:
            layers = entry.get("layers", {})
            for name, files in layers.items():
                if "data" not in files or "labels" not in files:
                    raise ParseError(
                        f"{path}: layer {name!r} needs data and labels paths"
                    )
            epochs.append(
                EpochEntry(
                    epoch=int(entry["epoch"]),
                    layers=layers,
                    train_acc=entry.get("train_acc"),
                    test_acc=entry.get("test_acc"),
                )
            )
        return cls(run_id=str(doc["run_id"]), epochs=epochs, base_dir=path.parent)

    def validate(self) -> None:
        """Check referenced files exist, parse, and align within each epoch."""
        for entry in self.epochs:
            ref_labels = None
            ref_rows = None
            for name in sorted(entry.layers):
                files = entry.layers[name]
                mat = load_matrix_binary(self.resolve(files["data"]))
                lab = load_labels(self.resolve(files["labels"]))
                if mat.shape[0] != lab.size:
                    raise LabelError(
                        f"epoch {entry.epoch} layer {name}: "
                        f"{mat.shape[0]} rows vs {lab.size} labels"
                    )
                if ref_rows is None:
                    ref_rows, ref_labels = mat.shape[0], lab
                elif mat.shape[0] != ref_rows or not np.array_equal(lab, ref_labels):
                    raise LabelError(
                        f"epoch {entry.epoch}: layer {name} misaligned with siblings"
                    )
