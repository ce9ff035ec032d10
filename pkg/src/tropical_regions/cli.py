"""Command-line front end: layer files in/out, counting, bounds, angles.

Layer file format (UTF-8 JSON, schema_version 1):

    {"schema_version": 1, "inputs": n, "units": [
        {"kind": "relu",   "w": [...], "b": x},
        {"kind": "lrelu",  "w": [...], "b": x, "alpha": a},
        {"kind": "maxout", "W": [[...], ...], "b": [...]},
        {"kind": "raw",    "terms": [{"b": x, "c": [...]}, ...]}]}

Exit codes: 0 success, 2 validation/usage error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .bounds import conv_layer_bound, maxout_layer_bound, relu_layer_bound
from .errors import EnumerationCapExceeded, ValidationError
from .geometry import DEFAULT_CAP, eliminate_redundant, layer_polytopes, minkowski_candidates
from .oracle import count_arrangement_regions, count_by_input_sampling, count_regions_exact
from .sampler import SamplePlan, estimate_solid_angles, sample_configurations
from .tropical import (
    DEFAULT_TOL,
    LayerSpec,
    TropicalPolynomial,
    TropicalTerm,
    UnitInfo,
    make_leaky_relu,
    make_maxout,
    make_relu,
)

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["command", "entries"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["method", "elapsed_ms"],
                "additionalProperties": False,
                "properties": {
                    "method": {"type": "string"},
                    "count": {"type": ["integer", "null"]},
                    "bound": {"type": ["integer", "null"]},
                    "branch": {"type": ["string", "null"]},
                    "seed": {"type": ["integer", "null"]},
                    "degenerate": {"type": ["integer", "null"]},
                    "K": {"type": ["integer", "null"]},
                    "delta": {"type": ["number", "null"]},
                    "elapsed_ms": {"type": "number"},
                    "angles": {"type": ["object", "null"]},
                    "path": {"type": ["string", "null"]},
                },
            },
        },
    },
}

CSV_HEADER = ["method", "count", "bound", "branch", "seed", "degenerate", "K", "delta", "elapsed_ms"]


@dataclass
class MethodEntry:
    method: str
    elapsed_ms: float = 0.0
    count: int | None = None
    bound: int | None = None
    branch: str | None = None
    seed: int | None = None
    degenerate: int | None = None
    K: int | None = None
    delta: float | None = None
    angles: dict | None = None
    path: str | None = None

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "count": self.count,
            "bound": self.bound,
            "branch": self.branch,
            "seed": self.seed,
            "degenerate": self.degenerate,
            "K": self.K,
            "delta": self.delta,
            "elapsed_ms": self.elapsed_ms,
        }
        if self.angles is not None:
            out["angles"] = self.angles
        if self.path is not None:
            out["path"] = self.path
        return out


@dataclass
class RunReport:
    command: str
    seed: int | None = None
    entries: list[MethodEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "entries": [e.to_dict() for e in self.entries],
        }


def _need(record: dict, key: str, where: str):
    if key not in record:
        raise ValidationError(f"{where}: missing field '{key}'")
    return record[key]


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ValidationError(f"{where}: number must be finite, got {value!r}")
    return float(value)


def _vector(value, n: int, where: str) -> list[float]:
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list of {n} numbers")
    if len(value) != n:
        raise ValidationError(f"{where}: expected length {n}, got {len(value)}")
    return [_num(v, where) for v in value]


def _parse_unit(index: int, record: dict, n: int) -> tuple[TropicalPolynomial, UnitInfo]:
    where = f"unit {index}"
    if not isinstance(record, dict):
        raise ValidationError(f"{where}: expected an object")
    kind = _need(record, "kind", where)
    try:
        if kind == "relu":
            poly = make_relu(_vector(_need(record, "w", where), n, f"{where}.w"),
                             _num(_need(record, "b", where), f"{where}.b"))
            info = UnitInfo("relu", degenerate=poly.is_degenerate)
        elif kind == "lrelu":
            alpha = _num(_need(record, "alpha", where), f"{where}.alpha")
            poly = make_leaky_relu(_vector(_need(record, "w", where), n, f"{where}.w"),
                                   _num(_need(record, "b", where), f"{where}.b"), alpha)
            info = UnitInfo("lrelu", alpha=alpha, degenerate=poly.is_degenerate)
        elif kind == "maxout":
            W = _need(record, "W", where)
            if not isinstance(W, list) or not W:
                raise ValidationError(f"{where}.W: expected a nonempty list of rows")
            rows = [_vector(row, n, f"{where}.W[{j}]") for j, row in enumerate(W)]
            b = _vector(_need(record, "b", where), len(rows), f"{where}.b")
            poly = make_maxout(rows, b)
            info = UnitInfo("maxout", k=len(rows), degenerate=poly.is_degenerate)
        elif kind == "raw":
            terms = _need(record, "terms", where)
            if not isinstance(terms, list) or not terms:
                raise ValidationError(f"{where}.terms: expected a nonempty list")
            parsed = tuple(
                TropicalTerm(_num(_need(t, "b", f"{where}.terms[{j}]"), f"{where}.terms[{j}].b"),
                             tuple(_vector(_need(t, "c", f"{where}.terms[{j}]"), n,
                                           f"{where}.terms[{j}].c")))
                for j, t in enumerate(terms)
            )
            poly = TropicalPolynomial(n, parsed)
            info = UnitInfo("raw", degenerate=poly.is_degenerate)
        else:
            raise ValidationError(f"{where}: unknown kind {kind!r}")
    except ValidationError as exc:
        if str(exc).startswith(f"{where}"):
            raise
        raise ValidationError(f"{where}: {exc}") from exc
    return poly, info


def parse_layer(path: str) -> LayerSpec:
    """Load and validate a layer file into a LayerSpec."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read layer file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top level must be an object")
    version = _need(data, "schema_version", path)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{path}: unsupported schema_version {version!r}")
    n = _need(data, "inputs", path)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"{path}: 'inputs' must be a positive integer, got {n!r}")
    units = _need(data, "units", path)
    if not isinstance(units, list) or not units:
        raise ValidationError(f"{path}: 'units' must be a nonempty list")
    parsed = [_parse_unit(i, rec, n) for i, rec in enumerate(units)]
    return LayerSpec(n, tuple(p for p, _ in parsed), tuple(i for _, i in parsed))


def serialize_layer(layer: LayerSpec) -> dict:
    """LayerSpec back to the layer-file dict, honoring each unit's kind."""
    units = []
    for unit, info in zip(layer.units, layer.info):
        if info.kind == "relu":
            units.append({"kind": "relu", "w": list(unit.terms[1].coeffs),
                          "b": unit.terms[1].bias})
        elif info.kind == "lrelu":
            units.append({"kind": "lrelu", "w": list(unit.terms[1].coeffs),
                          "b": unit.terms[1].bias, "alpha": info.alpha})
        elif info.kind == "maxout":
            units.append({"kind": "maxout", "W": [list(t.coeffs) for t in unit.terms],
                          "b": [t.bias for t in unit.terms]})
        else:
            units.append({"kind": "raw", "terms": [
                {"b": t.bias, "c": list(t.coeffs)} for t in unit.terms]})
    return {"schema_version": SCHEMA_VERSION, "inputs": layer.input_dim, "units": units}


def generate_layer(kind: str, n: int, m: int, k: int | None, seed: int,
                   out_path: str, alpha: float = 0.1) -> dict:
    """Write a random layer file; weights/biases are standard normal from
    the deterministic (seed, index) substreams, so files are reproducible
    byte for byte."""
    if n < 1 or m < 1:
        raise ValidationError(f"need n, m >= 1, got n={n}, m={m}")
    if kind in ("relu", "lrelu"):
        draws = rng.standard_normal(seed, 0, m, n + 1)
        units = []
        for row in draws:
            rec = {"kind": kind, "w": [float(v) for v in row[:n]], "b": float(row[n])}
            if kind == "lrelu":
                rec["alpha"] = alpha
            units.append(rec)
    elif kind == "maxout":
        if k is None or k < 2:
            raise ValidationError(f"maxout rank must be >= 2, got {k}")
        draws = rng.standard_normal(seed, 0, m * k, n + 1)
        units = []
        for i in range(m):
            block = draws[i * k : (i + 1) * k]
            units.append({"kind": "maxout",
                          "W": [[float(v) for v in row[:n]] for row in block],
                          "b": [float(row[n]) for row in block]})
    else:
        raise ValidationError(f"cannot generate kind {kind!r} (use relu, lrelu or maxout)")
    data = {"schema_version": SCHEMA_VERSION, "inputs": n, "units": units}
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return data


GLOBAL_DEFAULTS = {
    "seed": 0,
    "tol": DEFAULT_TOL,
    "format": "human",
    "cap": DEFAULT_CAP,
    "delta": 0.01,
    "threads": 1,
}


def _build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after any subcommand; SUPPRESS
    # defaults keep a later occurrence from being clobbered by the parent's.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base RNG seed")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="strictness tolerance")
    common.add_argument("--format", choices=("human", "json", "csv"),
                        default=argparse.SUPPRESS)
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS,
                        help="max enumerated candidate configurations")
    common.add_argument("--delta", type=float, default=argparse.SUPPRESS,
                        help="sampling failure budget")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker thread cap (env TROPICAL_REGIONS_THREADS overrides)")

    top = argparse.ArgumentParser(prog="tropical-regions", parents=[common],
                                  description="Linear-region counting and bounds "
                                              "for piecewise-linear layers")
    sub = top.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("bounds", help="closed-form region bounds", parents=[common])
    b.add_argument("--kind", choices=("relu", "maxout", "conv"), required=True)
    b.add_argument("-n", type=int, help="inputs (relu/maxout)")
    b.add_argument("-m", type=int, help="outputs (relu/maxout)")
    b.add_argument("-k", type=int, help="maxout rank / conv filter size")
    b.add_argument("-d", type=int, help="image side (conv)")
    b.add_argument("-p", type=int, default=0, help="padding (conv)")

    c = sub.add_parser("count", help="count linear regions")
    csub = c.add_subparsers(dest="method", required=True)
    for name in ("exact", "arrangement"):
        p = csub.add_parser(name, parents=[common])
        p.add_argument("layer", help="layer JSON file")
    p = csub.add_parser("sample", parents=[common])
    p.add_argument("layer")
    p.add_argument("-K", type=int, required=True, help="number of sampled directions")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--upper", dest="mode", action="store_const", const="upper",
                      help="count region-defining (upper-hull) vertices [default]")
    mode.add_argument("--full", dest="mode", action="store_const", const="full",
                      help="count all Minkowski-sum vertices")
    p.set_defaults(mode="upper")
    p = csub.add_parser("input-sample", parents=[common])
    p.add_argument("layer")
    p.add_argument("-K", type=int, required=True, help="number of sampled inputs")
    p.add_argument("--input-scale", type=float, default=10.0)

    a = sub.add_parser("angles", parents=[common],
                       help="Monte-Carlo solid angles of the sum polytope")
    a.add_argument("layer")
    a.add_argument("--samples", type=int, default=1_000_000)

    g = sub.add_parser("gen", parents=[common], help="generate a random layer file")
    g.add_argument("--kind", choices=("relu", "lrelu", "maxout"), required=True)
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-m", type=int, required=True)
    g.add_argument("-k", type=int, help="maxout rank")
    g.add_argument("--alpha", type=float, default=0.1)
    g.add_argument("-o", "--out", required=True)
    return top


def _timed(entry: MethodEntry, fn):
    t0 = time.perf_counter()
    result = fn()
    entry.elapsed_ms = round((time.perf_counter() - t0) * 1000.0, 3)
    return result


def _cmd_bounds(args, report: RunReport) -> None:
    if args.kind == "relu":
        if args.n is None or args.m is None:
            raise ValidationError("bounds --kind relu needs -n and -m")
        entry = MethodEntry("bound-relu")
        rep = _timed(entry, lambda: relu_layer_bound(args.n, args.m))
        entry.bound, entry.branch = rep.bound, rep.formula_branch
        report.entries.append(entry)
    elif args.kind == "maxout":
        if args.n is None or args.m is None or args.k is None:
            raise ValidationError("bounds --kind maxout needs -n, -m and -k")
        entry = MethodEntry("bound-maxout")
        rep = _timed(entry, lambda: maxout_layer_bound(args.n, args.m, args.k))
        entry.bound, entry.branch = rep.bound, rep.formula_branch
        report.entries.append(entry)
        if rep.relu_refinement is not None:
            report.entries.append(MethodEntry("bound-relu-refinement",
                                              bound=rep.relu_refinement,
                                              branch="rank-2 refinement"))
    else:
        if args.d is None or args.k is None:
            raise ValidationError("bounds --kind conv needs -d and -k (and optional -p)")
        entry = MethodEntry("bound-conv")
        rep = _timed(entry, lambda: conv_layer_bound(args.d, args.k, args.p))
        entry.bound, entry.branch = rep.bound, rep.formula_branch
        report.entries.append(entry)


def _cmd_count(args, report: RunReport, threads: int) -> None:
    layer = parse_layer(args.layer)
    if args.method == "exact":
        entry = MethodEntry("exact")
        res = _timed(entry, lambda: count_regions_exact(layer, tol=args.tol, cap=args.cap))
        entry.count, entry.degenerate = res.count, res.degenerate
    elif args.method == "arrangement":
        entry = MethodEntry("arrangement")
        entry.count = _timed(entry, lambda: count_arrangement_regions(
            layer, tol=args.tol, cap=args.cap))
    elif args.method == "sample":
        entry = MethodEntry(f"sample-{args.mode}", seed=args.seed, K=args.K, delta=args.delta)
        plan = SamplePlan(K=args.K, delta=args.delta, mode=args.mode, seed=args.seed)
        res = _timed(entry, lambda: sample_configurations(layer, plan, tol=args.tol,
                                                          threads=threads))
        entry.count, entry.degenerate = res.count, res.degenerate_ties
    else:
        entry = MethodEntry("input-sample", seed=args.seed, K=args.K)
        entry.count = _timed(entry, lambda: count_by_input_sampling(
            layer, args.K, seed=args.seed, input_scale=args.input_scale))
    report.entries.append(entry)


def _cmd_angles(args, report: RunReport, threads: int) -> None:
    layer = parse_layer(args.layer)
    entry = MethodEntry("angles", seed=args.seed, K=args.samples)

    def run():
        candidates, _ = minkowski_candidates(layer_polytopes(layer), cap=args.cap)
        reduced = eliminate_redundant(candidates, tol=args.tol)
        return estimate_solid_angles(reduced, samples=args.samples, seed=args.seed,
                                     threads=threads)

    spectrum = _timed(entry, run)
    entry.count = len(spectrum.full)
    entry.angles = {
        "vertices": [list(v) for v in spectrum.vertices],
        "full": list(spectrum.full),
        "truncated": list(spectrum.truncated),
        "stderr_full": list(spectrum.stderr_full),
        "stderr_truncated": list(spectrum.stderr_truncated),
    }
    report.entries.append(entry)


def _cmd_gen(args, report: RunReport) -> None:
    entry = MethodEntry("gen", seed=args.seed, path=args.out)
    data = _timed(entry, lambda: generate_layer(args.kind, args.n, args.m, args.k,
                                                args.seed, args.out, alpha=args.alpha))
    entry.count = len(data["units"])
    report.entries.append(entry)


def _format_human(report: RunReport) -> str:
    lines = [f"command: {report.command}"]
    for e in report.entries:
        parts = [f"method={e.method}"]
        for name in ("count", "bound", "branch", "seed", "degenerate", "K", "delta"):
            value = getattr(e, name)
            if value is not None:
                parts.append(f"{name}={value}")
        parts.append(f"elapsed_ms={e.elapsed_ms:.1f}")
        if e.path is not None:
            parts.append(f"path={e.path}")
        lines.append("  ".join(parts))
    return "\n".join(lines)


def _format_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for e in report.entries:
        writer.writerow(["" if getattr(e, name) is None else getattr(e, name)
                         for name in CSV_HEADER])
    return buf.getvalue().rstrip("\n")


def run_command(argv, stdout=None, stderr=None) -> tuple[RunReport | None, int]:
    """Execute one CLI invocation; returns (report, exit_code) and prints
    the report in the requested format."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, int(exc.code) if exc.code else 0
    for name, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)

    threads = args.threads
    env_threads = os.environ.get("TROPICAL_REGIONS_THREADS")
    if env_threads is not None:
        try:
            threads = max(1, int(env_threads))
        except ValueError:
            print(f"warning: ignoring bad TROPICAL_REGIONS_THREADS={env_threads!r}",
                  file=stderr)

    report = RunReport(command=" ".join(argv), seed=args.seed)
    try:
        if args.cmd == "bounds":
            _cmd_bounds(args, report)
        elif args.cmd == "count":
            _cmd_count(args, report, threads)
        elif args.cmd == "angles":
            _cmd_angles(args, report, threads)
        else:
            _cmd_gen(args, report)
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return None, 2
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=stderr)
        return None, 3

    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2), file=stdout)
    elif args.format == "csv":
        print(_format_csv(report), file=stdout)
    else:
        print(_format_human(report), file=stdout)
    return report, 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:])[1])


if __name__ == "__main__":
    main()
