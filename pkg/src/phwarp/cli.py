"""Command-line interface: ``phwarp <command> ...``.

Commands
--------
compute-diagrams  graphs (.json) or grids (.csv) -> normalized, finitized diagram files
vectorize         diagram files -> SymVector JSON files
distmat           diagram files -> distance matrix CSV
retrieve          matrix CSVs -> leave-one-out evaluation report JSON
gen-synthetic     seeded synthetic diagram files
bench             wall time of the full distance matrix, bottleneck vs T/R vectors

Errors are reported on stderr as one JSON line ``{"error": kind, "message": ...}``
with exit status 2. A JSON file given with ``--config`` overrides flags; the
worker count for bottleneck matrices comes from ``PHWARP_THREADS``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bottleneck import bottleneck_distance
from .diagram import read_diagram, write_diagram
from .estimators import PersistenceDiagramTransformer, SymmetricFunctionVectorizer
from .exceptions import ConfigurationError, InvalidArgumentError, ParseError, PhwarpError
from .persistence import read_graph, read_grid
from .retrieval import (
    DistanceMatrix,
    combine_matrices,
    compute_distance_matrix,
    evaluate,
    leave_one_out_nn,
    optimize_weights,
    read_matrix,
    write_matrix,
    write_report,
)
from .symfun import DEFAULT_K, write_symvector
from .synthetic import make_diagrams
from .utils import atomic_write_text

log = logging.getLogger("phwarp")

LABELS_FILE = "labels.csv"
METHOD_NAMES = {"bottleneck": "M1_bottleneck", "T": "M2_T", "R": "M3_R"}


@dataclass
class RunConfig:
    method: str = "R"
    k: int = DEFAULT_K
    seed: int = 0
    connectivity: int = 4
    block: int = 1
    inputs: list = field(default_factory=list)
    output: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHOD_NAMES:
            raise ConfigurationError(f"method must be one of {sorted(METHOD_NAMES)}, got {self.method!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if int(self.block) != self.block or self.block < 1:
            raise ConfigurationError(f"block must be >= 1, got {self.block}")
        if self.connectivity not in (4, 8):
            raise ConfigurationError(f"connectivity must be 4 or 8, got {self.connectivity}")


def _config(args) -> RunConfig:
    return RunConfig(
        method=getattr(args, "method", "R"),
        k=getattr(args, "k", DEFAULT_K),
        seed=getattr(args, "seed", 0),
        connectivity=getattr(args, "connectivity", 4),
        block=getattr(args, "block", 1),
        inputs=list(getattr(args, "inputs", []) or []),
        output=getattr(args, "output", None),
    )


def _expand(inputs, suffixes) -> list:
    """Files as given, plus matching files (sorted) inside any directory.

    A directory's ``labels.csv`` is never taken as data.
    """
    out = []
    for raw in inputs:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(
                q for q in p.iterdir()
                if q.is_file() and q.suffix in suffixes and q.name != LABELS_FILE
            ))
        elif p.exists():
            out.append(p)
        else:
            raise InvalidArgumentError(f"no such file or directory: {p}")
    return out


def _read_labels(path) -> dict:
    path = Path(path)
    labels = {}
    for lineno, row in enumerate(csv.reader(io.StringIO(path.read_text(encoding="utf-8"))), 1):
        if not row or row[0].startswith("#"):
            continue
        if len(row) != 2:
            raise ParseError("expected 'id,label'", path, lineno)
        labels[row[0].strip()] = row[1].strip()
    return labels


def _write_labels(path, labels: dict) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for key in sorted(labels):
        writer.writerow([key, labels[key]])
    atomic_write_text(path, buf.getvalue())


def _load_diagrams(inputs):
    paths = _expand(inputs, {".csv"})
    if not paths:
        raise InvalidArgumentError("no diagram files given")
    return [read_diagram(p) for p in paths]


def _matrix_for(diagrams, method, k, labels=None) -> DistanceMatrix:
    ids = tuple(d.label for d in diagrams)
    labs = None
    if labels:
        missing = [i for i in ids if i not in labels]
        if missing:
            raise InvalidArgumentError(f"no label for items {missing[:5]}")
        labs = tuple(labels[i] for i in ids)
    if method == "bottleneck":
        return compute_distance_matrix(diagrams, "bottleneck", ids, labs)
    vecs = SymmetricFunctionVectorizer(method, k).fit().symvectors(diagrams)
    return compute_distance_matrix(vecs, "vector_d", ids, labs)


# -- commands -----------------------------------------------------------------


def cmd_compute_diagrams(args) -> int:
    cfg = _config(args)
    paths = _expand(cfg.inputs, {".json", ".csv"})
    if not paths:
        log.warning("no graph or grid files found in %s", ", ".join(map(str, cfg.inputs)))
        return 0
    graphs = [read_graph(p) if p.suffix == ".json" else read_grid(p) for p in paths]
    value_range = None
    if args.range:
        try:
            lo, hi = (float(x) for x in args.range.split(","))
        except ValueError:
            raise InvalidArgumentError(f"--range expects LO,HI, got {args.range!r}") from None
        value_range = (lo, hi)
    pdt = PersistenceDiagramTransformer(value_range, cfg.connectivity, cfg.block)
    diagrams = pdt.fit(graphs).transform(graphs)
    out_dir = Path(cfg.output)
    for p, d in zip(paths, diagrams):
        write_diagram(d.with_label(p.stem), out_dir / f"{p.stem}.csv")
    log.info("wrote %d diagrams to %s (range %s)", len(diagrams), out_dir, pdt.value_range_)
    return 0


def cmd_vectorize(args) -> int:
    cfg = _config(args)
    if cfg.method == "bottleneck":
        raise ConfigurationError("vectorize needs --method T or R")
    diagrams = _load_diagrams(cfg.inputs)
    vecs = SymmetricFunctionVectorizer(cfg.method, cfg.k).fit().symvectors(diagrams)
    out_dir = Path(cfg.output)
    for d, v in zip(diagrams, vecs):
        write_symvector(v, out_dir / f"{d.label}.json")
    return 0


def cmd_distmat(args) -> int:
    cfg = _config(args)
    diagrams = _load_diagrams(cfg.inputs)
    labels = _read_labels(args.labels) if args.labels else None
    write_matrix(_matrix_for(diagrams, cfg.method, cfg.k, labels), cfg.output)
    return 0


def cmd_retrieve(args) -> int:
    cfg = _config(args)
    matrices = [read_matrix(p) for p in _expand(cfg.inputs, {".csv"})]
    if not matrices:
        raise InvalidArgumentError("no matrix files given")
    ids = matrices[0].item_ids
    if any(m.item_ids != ids for m in matrices):
        raise InvalidArgumentError("matrices list different items")
    if args.labels:
        table = _read_labels(args.labels)
        matrices = [m.with_labels(tuple(table[i] for i in ids)) for m in matrices]
    if args.optimize and args.weights:
        raise ConfigurationError("give either --weights or --optimize, not both")
    extra = {}
    if args.optimize:
        weights, _ = optimize_weights(matrices, args.grid_step, args.neighbors)
    elif args.weights:
        weights = np.array([float(w) for w in args.weights.split(",")])
    else:
        weights = np.ones(len(matrices))
    combined = combine_matrices(matrices, weights)
    preds = leave_one_out_nn(combined, args.neighbors)
    positive = args.positive_class
    if positive is None:
        raise ConfigurationError("--positive-class is required")
    report = evaluate(preds, combined.labels, positive)
    extra["weights"] = [float(w) for w in np.asarray(weights) / np.sum(weights)]
    extra["item_ids"] = list(ids)
    extra["n_neighbors"] = args.neighbors
    write_report(report, cfg.output, extra)
    return 0


def cmd_gen_synthetic(args) -> int:
    cfg = _config(args)
    diagrams = make_diagrams(args.count, args.points, args.noise_fraction, cfg.seed, args.prefix)
    out_dir = Path(cfg.output)
    for d in diagrams:
        write_diagram(d, out_dir / f"{d.label}.csv")
    if args.label is not None:
        labels_path = out_dir / LABELS_FILE
        table = _read_labels(labels_path) if labels_path.exists() else {}
        table.update({d.label: args.label for d in diagrams})
        _write_labels(labels_path, table)
    return 0


def run_bench(diagrams, k: int = DEFAULT_K) -> dict:
    """Time the full distance matrix under each method; JIT is warmed first."""
    if len(diagrams) < 2:
        raise InvalidArgumentError("bench needs at least two diagrams")
    bottleneck_distance(diagrams[0], diagrams[1])
    times, digests = {}, {}
    for method, name in METHOD_NAMES.items():
        t0 = time.perf_counter()
        m = _matrix_for(diagrams, method, k)
        times[name] = time.perf_counter() - t0
        digests[name] = hashlib.sha256(m.entries.tobytes()).hexdigest()
    base = times["M1_bottleneck"]
    return {
        "n_diagrams": len(diagrams),
        "mean_points": float(np.mean([d.count for d in diagrams])),
        "k": k,
        "seconds": times,
        "speedup": {name: base / times[name] for name in ("M2_T", "M3_R")},
        "matrix_sha256": digests,
    }


def cmd_bench(args) -> int:
    cfg = _config(args)
    if args.synthetic:
        try:
            count, points = (int(x) for x in args.synthetic.split(","))
        except ValueError:
            raise InvalidArgumentError(f"--synthetic expects COUNT,POINTS, got {args.synthetic!r}") from None
        diagrams = make_diagrams(count, points, args.noise_fraction, cfg.seed)
    else:
        diagrams = _load_diagrams(cfg.inputs)
    text = json.dumps(run_bench(diagrams, cfg.k), indent=2) + "\n"
    if cfg.output:
        atomic_write_text(cfg.output, text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phwarp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file whose keys override flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, method=True, k=True):
        if method:
            p.add_argument("--method", choices=sorted(METHOD_NAMES), default="R")
        if k:
            p.add_argument("--k", type=int, default=DEFAULT_K)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compute-diagrams", help="graphs/grids -> diagram files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=4)
    p.add_argument("--block", type=int, default=1)
    p.add_argument("--range", help="filtration range LO,HI mapped to [0, 1] (default: data range)")
    common(p, method=False, k=False)
    p.set_defaults(func=cmd_compute_diagrams)

    p = sub.add_parser("vectorize", help="diagram files -> SymVector JSON")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="output directory")
    common(p)
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("distmat", help="diagram files -> distance matrix CSV")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="matrix CSV path")
    p.add_argument("--labels", help="CSV of id,label")
    common(p)
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("retrieve", help="matrix CSVs -> evaluation report JSON")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="report JSON path")
    p.add_argument("--weights", help="comma-separated nonnegative weights, one per matrix")
    p.add_argument("--optimize", action="store_true", help="search weights by coordinate ascent")
    p.add_argument("--grid-step", type=float, default=0.05)
    p.add_argument("--neighbors", type=int, default=1)
    p.add_argument("--positive-class", help="label counted as positive (e.g. melanoma)")
    p.add_argument("--labels", help="CSV of id,label overriding the matrix label row")
    common(p, method=False, k=False)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("gen-synthetic", help="write seeded synthetic diagrams")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--noise-fraction", type=float, default=0.5)
    p.add_argument("--prefix", default="syn")
    p.add_argument("--label", help="class label recorded in <output>/labels.csv")
    common(p, method=False, k=False)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("bench", help="time M1 (bottleneck) against M2/M3 (T/R vectors)")
    p.add_argument("inputs", nargs="*")
    p.add_argument("-o", "--output", help="report JSON path (default: stdout)")
    p.add_argument("--synthetic", help="generate COUNT,POINTS diagrams instead of reading files")
    p.add_argument("--noise-fraction", type=float, default=0.9)
    common(p, method=False)
    p.set_defaults(func=cmd_bench)
    return parser


def _apply_config(args, parser):
    with open(args.config, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, args.config, exc.lineno) from None
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in ("command", "func", "config"):
            continue
        if not hasattr(args, dest):
            raise ConfigurationError(f"unknown config key {key!r} for {args.command}")
        setattr(args, dest, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="phwarp: %(levelname)s: %(message)s",
    )
    try:
        if args.config:
            _apply_config(args, parser)
        return args.func(args)
    except PhwarpError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
