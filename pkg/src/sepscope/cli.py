"""Command-line front end: measure, maxls, track, demo-train, plm studies.

Every subcommand emits plot-ready JSON/CSV tables under --out.  With a fixed
--seed the outputs are byte-identical across runs and across thread counts;
worker pools only parallelize independent cells and merge them in a fixed
order.  Exit codes: 0 ok, 1 input error, 2 degenerate-only output,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .dataset import RunManifest, binary_task, load_csv
from .errors import (
    DataError,
    DegenerateError,
    FormatError,
    LabelError,
    ParseError,
    SepscopeError,
    ShapeError,
)
from .maxls import greedy_maxls, verify_result
from .measures import exact_weight, measure_task, approx_weight
from .plm import depth_study, f_sigma_grid, width_study
from .trainer import (
    MlpConfig,
    make_synthetic,
    track_manifest,
    train_mlp,
)

_INPUT_ERRORS = (ParseError, DataError, LabelError, FormatError, ShapeError,
                 OSError, ValueError)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def _report_rows(reports) -> list[list]:
    header = ["task", "weight_mode", "ls_star", "ls0", "ls1", "ls2", "j_omega",
              "pos", "neg", "zero", "degenerate"]
    rows = [header]
    for rep in reports:
        doc = rep.to_json()
        rows.append([
            doc["task"], doc["weight_mode"], doc["ls_star"], doc["ls0"],
            doc["ls1"], doc["ls2"], doc["j_omega"], doc["counts"]["pos"],
            doc["counts"]["neg"], doc["counts"]["zero"], int(doc["degenerate"]),
        ])
    return rows


def _emit_reports(reports, out_dir: Path, fmt: str, stem: str) -> None:
    if fmt == "json":
        _write_json(out_dir / f"{stem}.json", [r.to_json() for r in reports])
    else:
        _write_csv(out_dir / f"{stem}.csv", _report_rows(reports))
    for rep in reports:
        flag = " (degenerate)" if rep.degenerate else ""
        print(
            f"{rep.task_label} [{rep.weight.provenance if rep.weight else '-'}] "
            f"ls_star={rep.ls_star:.6g} ls0={rep.ls0:.6g} ls1={rep.ls1:.6g} "
            f"ls2={rep.ls2:.6g} j_omega={rep.j_omega:.6g}{flag}"
        )


def _load_dataset(args):
    if args.data is None:
        raise ParseError("--data is required")
    return load_csv(args.data, label_column=args.label_column,
                    labels_path=args.labels)


def _thread_count(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SEPSCOPE_THREADS")
    return max(1, int(env)) if env else 1


def _add_data_flags(parser, needs_positive=True):
    parser.add_argument("--data", help="CSV table of points")
    parser.add_argument("--labels", help="label file (text or LSMY)")
    parser.add_argument("--label-column", type=int, default=None,
                        help="take labels from this CSV column instead")
    if needs_positive:
        parser.add_argument("--positive-class", type=int, default=None)
        parser.add_argument("--multiclass", action="store_true",
                            help="one-vs-rest over every class")
    parser.add_argument("--weight", choices=["approx", "exact"], default="approx")
    parser.add_argument("--zero-tol", type=float, default=None)


def cmd_measure(args) -> int:
    ds = _load_dataset(args)
    out = Path(args.out)
    mode = "approximate" if args.weight == "approx" else "exact"
    if args.multiclass:
        threads = _thread_count(args)

        def one(cls):
            rep = measure_task(binary_task(ds, cls), mode, args.zero_tol)
            return replace(rep, task_label=f"class{cls}")

        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, range(ds.class_count)))
        sizes = [int((ds.labels == c).sum()) for c in range(ds.class_count)]
        total = sum(sizes)
        multi = {
            key: sum(s * getattr(r, key) for s, r in zip(sizes, reports)) / total
            for key in ("ls_star", "ls0", "ls1", "ls2", "j_omega")
        }
        _emit_reports(reports, out, args.format, "measure")
        _write_json(out / "multi_ls.json", multi)
        print("multi: " + " ".join(f"{k}={v:.6g}" for k, v in sorted(multi.items())))
    else:
        positive = args.positive_class if args.positive_class is not None else 0
        reports = [measure_task(binary_task(ds, positive), mode, args.zero_tol)]
        _emit_reports(reports, out, args.format, "measure")
    return 2 if all(r.degenerate for r in reports) else 0


def cmd_maxls(args) -> int:
    ds = _load_dataset(args)
    positive = args.positive_class if args.positive_class is not None else 0
    task = binary_task(ds, positive)
    mode = "approximate" if args.weight == "approx" else "exact"
    try:
        weight = approx_weight(task) if mode == "approximate" else exact_weight(task)
        result = greedy_maxls(task, weight, args.zero_tol)
    except DegenerateError as exc:
        print(f"degenerate task: {exc}", file=sys.stderr)
        return 2
    doc = result.to_json()
    doc["verified"] = verify_result(task, result, weight, args.zero_tol)
    _write_json(Path(args.out) / "maxls.json", doc)
    return 0


def cmd_track(args) -> int:
    manifest = RunManifest.load(args.manifest)
    mode = "approximate" if args.weight == "approx" else "exact"
    series = track_manifest(manifest, mode, threads=_thread_count(args))
    out = Path(args.out)
    if args.format == "json":
        payload = [
            {
                "epoch": rec.epoch,
                "train_acc": rec.train_acc,
                "test_acc": rec.test_acc,
                "layers": {
                    name: {
                        "ls_star": cell.ls_star, "ls0": cell.ls0, "ls1": cell.ls1,
                        "ls2": cell.ls2, "j_omega": cell.j_omega,
                        "zero_count": cell.zero_count,
                        "degenerate": cell.degenerate, "error": cell.error,
                    }
                    for name, cell in rec.layers.items()
                },
            }
            for rec in series.records
        ]
        _write_json(out / "track.json", payload)
    else:
        _write_csv(out / "track.csv", series.to_csv_rows())
    cells = [cell for rec in series.records for cell in rec.layers.values()]
    if cells and all(c.degenerate for c in cells):
        return 2
    return 0


_DEMO_DEFAULTS = {
    "dataset": "gaussians",
    "n_per_class": 50,
    "test_n_per_class": 25,
    "noise": 1.0,
    "margin": 4.0,
    "data_seed": 7,
    "widths": "2,16,2",
    "activation": "relu",
    "output": "softmax",
    "learning_rate": 0.1,
    "batch_size": 32,
    "epochs": 100,
    "probe_size": 500,
    "probe_weight_mode": "approximate",
    "probe_resample": 0,
    "dump": 0,
}


def _parse_config_file(path) -> dict:
    values = dict(_DEMO_DEFAULTS)
    if path is None:
        return values
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such config: {path}")
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in values:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def cmd_demo_train(args) -> int:
    cfg = _parse_config_file(args.config)
    widths = tuple(int(w) for w in str(cfg["widths"]).split(","))
    mlp_config = MlpConfig(
        widths=widths,
        activation=str(cfg["activation"]),
        output=str(cfg["output"]),
        learning_rate=float(cfg["learning_rate"]),
        batch_size=int(cfg["batch_size"]),
        epochs=int(cfg["epochs"]),
        seed=args.seed,
        probe_size=int(cfg["probe_size"]),
        probe_weight_mode=str(cfg["probe_weight_mode"]),
        probe_resample=bool(int(cfg["probe_resample"])),
    )
    data_seed = int(cfg["data_seed"])
    train = make_synthetic(str(cfg["dataset"]), int(cfg["n_per_class"]),
                           float(cfg["noise"]), data_seed, float(cfg["margin"]))
    test = make_synthetic(str(cfg["dataset"]), int(cfg["test_n_per_class"]),
                          float(cfg["noise"]), data_seed + 1, float(cfg["margin"]))
    out = Path(args.out)
    dump_dir = out / "dumps" if int(cfg["dump"]) else None
    series = train_mlp(mlp_config, train, test, dump_dir=dump_dir)
    _write_csv(out / "track.csv", series.to_csv_rows())
    return 0


def cmd_plm_study(args) -> int:
    if args.data is not None:
        ds = _load_dataset(args)
        positive = args.positive_class if args.positive_class is not None else 0
        task = binary_task(ds, positive)
    else:
        ds = make_synthetic("gaussians", args.n_per_class, 1.0, args.seed,
                            margin=1.0)
        task = binary_task(ds, 1)
    out = Path(args.out)
    if args.widths:
        sizes = [int(w) for w in args.widths.split(",")]
        rows = width_study(task, sizes, args.trials, kind=args.kind,
                           seed=args.seed)
        stem, axis = "width_study", "width"
    elif args.depths:
        sizes = [int(d) for d in args.depths.split(",")]
        rows = depth_study(task, sizes, args.width, args.trials, kind=args.kind,
                           seed=args.seed)
        stem, axis = "depth_study", "depth"
    else:
        raise ParseError("need --widths or --depths")
    header = [axis, "trials", "increase_count", "degenerate_count",
              "fraction", "ci_low", "ci_high"]
    if args.format == "json":
        payload = [dict(zip(header, r.to_row())) for r in rows]
        for doc, row in zip(payload, rows):
            doc["mean_ls2_per_layer"] = list(row.trajectory)
        _write_json(out / f"{stem}.json", payload)
    else:
        _write_csv(out / f"{stem}.csv", [header] + [r.to_row() for r in rows])
        if axis == "depth":
            # trial-averaged ls2 of every intermediate layer, one row each
            traj = [["depth", "layer", "mean_ls2"]]
            for row in rows:
                traj += [[row.size, k + 1, v]
                         for k, v in enumerate(row.trajectory)]
            _write_csv(out / "depth_trajectory.csv", traj)
    return 0


def cmd_fsigma_grid(args) -> int:
    lo, hi = (float(v) for v in args.range.split(","))
    cells = f_sigma_grid(args.kind, (lo, hi), (lo, hi), args.step,
                         args.threshold)
    rows = [["x", "y", "f", "above_threshold"]]
    rows += [[c.x, c.y, c.value, int(c.above_threshold)] for c in cells]
    out = Path(args.out)
    if args.format == "json":
        _write_json(out / "fsigma_grid.json",
                    [{"x": c.x, "y": c.y, "f": c.value,
                      "above_threshold": c.above_threshold} for c in cells])
    else:
        _write_csv(out / "fsigma_grid.csv", rows)
    return 0


def cmd_compare_lda(args) -> int:
    ds = _load_dataset(args)
    positive = args.positive_class if args.positive_class is not None else 0
    task = binary_task(ds, positive)
    reports = []
    for mode in ("approximate", "exact"):
        rep = measure_task(task, mode, args.zero_tol)
        reports.append(replace(rep, task_label=f"class{positive}"))
    _emit_reports(reports, Path(args.out), args.format, "compare_lda")
    return 2 if all(r.degenerate for r in reports) else 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sepscope", description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (SEPSCOPE_THREADS as fallback)")
    parser.add_argument("--deterministic", action="store_true",
                        help="fixed merge order (always on; flag kept for scripts)")
    parser.add_argument("--out", default="sepscope_out")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="separability report for one dataset")
    _add_data_flags(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("maxls", help="greedy separable subset at the protocol weight")
    _add_data_flags(p)
    p.set_defaults(func=cmd_maxls, multiclass=False)

    p = sub.add_parser("track", help="measure dumped activations from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--weight", choices=["approx", "exact"], default="approx")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("demo-train", help="train the built-in MLP and track layers")
    p.add_argument("--config", default=None, help="key = value file")
    p.set_defaults(func=cmd_demo_train)

    p = sub.add_parser("plm-study", help="random-layer width or depth study")
    _add_data_flags(p)
    p.add_argument("--widths", default=None, help="comma list, e.g. 4,16,64,256")
    p.add_argument("--depths", default=None, help="comma list, e.g. 1,2,4")
    p.add_argument("--width", type=int, default=16, help="width for --depths")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--kind", choices=["sigmoid", "tanh", "arctan", "softsign"],
                   default="sigmoid")
    p.add_argument("--n-per-class", type=int, default=60,
                   help="size of the built-in synthetic task")
    p.set_defaults(func=cmd_plm_study)

    p = sub.add_parser("fsigma-grid", help="tabulate the curvature ratio")
    p.add_argument("--kind", choices=["sigmoid", "tanh", "arctan", "softsign"],
                   required=True)
    p.add_argument("--range", default="-6,6", help="lo,hi for both axes")
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--threshold", type=float, default=2.0)
    p.set_defaults(func=cmd_fsigma_grid)

    p = sub.add_parser("compare-lda", help="measures and Fisher quotient side by side")
    _add_data_flags(p)
    p.set_defaults(func=cmd_compare_lda, multiclass=False)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SepscopeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
