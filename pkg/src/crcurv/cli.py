"""Command line interface: ``crcurv catalog | run | explain``.

``run`` samples points of a chart, evaluates selected invariants and
inequality checks, and writes a JSON-lines report (one record per point
and computation, plus a header record).  Numeric fields are serialized
with 17 significant digits and keys are sorted, so identical
configuration and seed produce byte-identical files.  Exit status: 0 all
selected checks passed, 1 check failure, 2 configuration error, 3
computation error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__
from .catalog import catalog, catalog_entry, load_chart_file
from .errors import CrcurvError
from .geometry import ToleranceConfig, point_geometry
from .inequalities import (check_capped_mutual_bound, check_chen_type_bound,
                           check_flat_mean_bounds, check_holomorphic_bound,
                           check_min_mutual_bound, check_mixed_scalar_bound,
                           check_mutual_curvature_bound, d_minimality_scan)
from .invariants import (chen_delta, delta_h, delta_m, delta_m_aggregate,
                         mixed_scalar_curvature, normalized_delta,
                         normalized_delta_aggregate, script_H, tau_subspace)
from .optim import OptimizerConfig

EXPLAIN = {
    "mutual_bound": (
        "Maximal mutual curvature of k orthogonal subspaces of the complex "
        "distribution D against the ambient maximum plus (k-1)/(2k) times "
        "the squared best mean-curvature norm over sum(n_i)-dimensional "
        "subspaces of D (|H_D|^2 when the blocks fill D).  Equality "
        "diagnostics: mixed_tg_residual, mean_curvature_spread, "
        "script_H_gap, ambient_gap."),
    "capped_bound": (
        "Same left side with the ambient term replaced by the closed form "
        "(c/2)(s^2 - sum n_i^2) for a sampled-validated sectional bound c."),
    "chen_type": (
        "Chen-type bound for the distribution invariant delta_D(n_1..n_k) "
        "against d^2(d+k-1-s)/(2(d+k-s)) |H_D|^2 + (c/2)[d(d-1) - "
        "sum n_i(n_i-1)]."),
    "min_mutual": (
        "Aggregate minimum mutual-curvature invariant delta_m^-(k) against "
        "(k-1)/(2k(k+1)) |H_D|^2 plus the ambient aggregate with k+1 "
        "blocks; diagnostics include the leave-one-out excess."),
    "mixed_scalar": (
        "Mixed scalar curvature S_m(D, D_perp) against (1/4)|H|^2 plus the "
        "ambient (d,l) maximum; the mean term uses the full mean curvature "
        "of the submanifold.  Diagnostics: mixed_tg_residual, "
        "mean_curvature_split_diff, |H|^2, |H_D|^2, |H_Dperp|^2."),
    "holomorphic": (
        "Maximal holomorphic mutual curvature of k orthogonal J-invariant "
        "planes in D against the ambient value plus (k-1)/(4k) times the "
        "squared best mean-curvature norm over 2k-dimensional subspaces."),
    "flat_mean": (
        "Flat ambient only: for each s, the maximal normalized mutual "
        "invariant over partitions of s must not exceed script_H(s)^2 "
        "(|H_D|^2 at s = d)."),
    "d_minimal": (
        "Flat ambient only: sample-wise scan reporting max |H_D| and the "
        "positive-invariant witnesses whose coexistence with D-minimality "
        "is impossible; CONTRADICTION must never fire on valid charts."),
}


# ---------------------------------------------------------------------------
# deterministic JSON-lines writing

def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _dump(v):
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {v} in report")
        return format(v, ".17g")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ",".join(_dump(x) for x in v) + "]"
    if isinstance(v, dict):
        items = sorted(v.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_dump(x)}"
                              for k, x in items) + "}"
    raise TypeError(f"cannot serialize {type(v)}")


def record_line(record):
    return _dump(_jsonable(record))


_CSV_FIELDS = ("kind", "chart", "point_index", "name", "value", "lhs", "rhs",
               "slack", "passed", "equality", "gap")


def _csv_line(record):
    cells = []
    for f in _CSV_FIELDS:
        v = record.get(f)
        if v is None:
            cells.append("")
        elif isinstance(v, float):
            cells.append(format(v, ".17g"))
        else:
            cells.append(str(v))
    return ",".join(cells)


# ---------------------------------------------------------------------------
# selections

class ConfigError(Exception):
    pass


def _parse_sizes(text):
    try:
        sizes = tuple(int(x) for x in text.split(",") if x != "")
    except ValueError:
        raise ConfigError(f"bad block sizes {text!r}")
    return sizes


def _parse_invariant(spec):
    parts = spec.split(":")
    name = parts[0]
    known = {"tau", "mixed_scalar", "delta", "delta_hat", "delta_m",
             "delta_m_agg", "delta_h", "script_H", "normalized_delta",
             "normalized_delta_agg"}
    if name not in known:
        raise ConfigError(f"unknown invariant {name!r}")
    return (name, parts[1:])


def _parse_check(spec):
    parts = spec.split(":")
    name = parts[0]
    known = {"mutual_bound", "capped_bound", "chen_type", "min_mutual",
             "mixed_scalar", "holomorphic", "flat_mean", "d_minimal", "all"}
    if name not in known:
        raise ConfigError(f"unknown check {name!r}")
    return (name, parts[1:])


def _battery(geom_d, flat):
    """Default 'all' selection, gated on the chart's complex dimension."""
    checks = [("mutual_bound", ["1,1"])]
    if geom_d >= 3:
        checks.append(("mutual_bound", ["1,2"]))
    if geom_d >= 4:
        checks.append(("mutual_bound", ["2,2"]))
    if flat:
        checks.append(("capped_bound", ["0", "1,1"]))
        checks.append(("chen_type", ["0", "1"]))
        checks.append(("chen_type", ["0", "1,1"]))
    if geom_d >= 3:
        checks.append(("min_mutual", ["2"]))
    checks.append(("mixed_scalar", []))
    if geom_d >= 4:
        checks.append(("holomorphic", ["2"]))
    if flat:
        checks.append(("flat_mean", []))
        checks.append(("d_minimal", []))
    return checks


# ---------------------------------------------------------------------------
# evaluation

def _eval_invariant(geom, amb, name, args, cfg):
    D = geom.d_coeffs
    if name == "tau":
        return [("tau", float(tau_subspace(geom.R, D)), None)]
    if name == "mixed_scalar":
        val = mixed_scalar_curvature(geom.R, D, geom.dperp_coeffs)
        return [("mixed_scalar", float(val), None)]
    if name in ("delta", "delta_hat"):
        sizes = _parse_sizes(args[0]) if args else ()
        cd = chen_delta(geom.R, D, sizes, cfg)
        iv = cd.delta if name == "delta" else cd.delta_hat
        return [(f"{name}:{args[0] if args else ''}", iv.value, iv.gap)]
    if name == "delta_m":
        sign, sizes = args[0], _parse_sizes(args[1])
        iv = delta_m(geom.R, D, sizes, sign, cfg)
        return [(f"delta_m:{sign}:{args[1]}", iv.value, iv.gap)]
    if name == "delta_m_agg":
        sign, k = args[0], int(args[1])
        iv = delta_m_aggregate(geom.R, D, k, sign, cfg)
        return [(f"delta_m_agg:{sign}:{k}", iv.value, iv.gap)]
    if name == "delta_h":
        sign, k = args[0], int(args[1])
        iv = delta_h(geom.R_D, geom.phi_D, k, sign, cfg)
        return [(f"delta_h:{sign}:{k}", iv.value, iv.gap)]
    if name == "script_H":
        s = int(args[0])
        return [(f"script_H:{s}", float(script_H(geom, s, cfg)), None)]
    if name == "normalized_delta":
        sizes = _parse_sizes(args[0])
        val = normalized_delta(geom.R, D, sizes, cfg)
        return [(f"normalized_delta:{args[0]}", float(val), None)]
    if name == "normalized_delta_agg":
        s = int(args[0])
        iv = normalized_delta_aggregate(geom.R, D, s, cfg)
        return [(f"normalized_delta_agg:{s}", iv.value, None)]
    raise ConfigError(f"unknown invariant {name!r}")


def _eval_check(geom, amb, name, args, cfg, tol):
    if name == "mutual_bound":
        return [check_mutual_curvature_bound(geom, amb, _parse_sizes(args[0]),
                                             cfg, tol)]
    if name == "capped_bound":
        return [check_capped_mutual_bound(geom, amb, float(args[0]),
                                          _parse_sizes(args[1]), cfg, tol)]
    if name == "chen_type":
        return [check_chen_type_bound(geom, amb, float(args[0]),
                                      _parse_sizes(args[1]), cfg, tol)]
    if name == "min_mutual":
        return [check_min_mutual_bound(geom, amb, int(args[0]), cfg, tol)]
    if name == "mixed_scalar":
        return [check_mixed_scalar_bound(geom, amb, cfg, tol)]
    if name == "holomorphic":
        return [check_holomorphic_bound(geom, amb, int(args[0]), cfg, tol)]
    if name == "flat_mean":
        return check_flat_mean_bounds(geom, cfg, tol)
    raise ConfigError(f"unknown check {name!r}")


def _report_record(chart_name, idx, rep):
    return {
        "kind": "check", "chart": chart_name, "point_index": idx,
        "name": rep.check, "u": rep.u, "lhs": rep.lhs, "rhs": rep.rhs,
        "slack": rep.slack, "passed": rep.passed, "equality": rep.equality,
        "diagnostics": rep.diagnostics, "provenance": rep.provenance,
        "tol_slack": rep.tol_slack, "tol_eq": rep.tol_eq,
    }


def _point_task(payload):
    (chart, amb, u, idx, inv_specs, check_specs, cfg, tol) = payload
    geom = point_geometry(amb, chart, u, tol)
    records = []
    for name, args in inv_specs:
        for label, value, gap in _eval_invariant(geom, amb, name, args, cfg):
            records.append({"kind": "invariant", "chart": chart.name,
                            "point_index": idx, "name": label,
                            "u": np.asarray(u), "value": float(value),
                            "gap": None if gap is None else float(gap)})
    for name, args in check_specs:
        for rep in _eval_check(geom, amb, name, args, cfg, tol):
            records.append(_report_record(chart.name, idx, rep))
    return idx, records


# ---------------------------------------------------------------------------
# commands

def _cmd_catalog(args):
    for entry in catalog():
        print(f"{entry.name}")
        print(f"    {entry.doc}")
        if entry.expected:
            pairs = ", ".join(f"{k}={v:g}" for k, v in
                              sorted(entry.expected.items()))
            print(f"    expected: {pairs}")
    return 0


def _cmd_explain(args):
    name = args.check
    if name not in EXPLAIN:
        print(f"unknown check {name!r}; known: {', '.join(sorted(EXPLAIN))}",
              file=sys.stderr)
        return 2
    print(f"{name}: {EXPLAIN[name]}")
    return 0


def _resolve_chart(spec):
    if spec.startswith("file:"):
        return load_chart_file(spec[len("file:"):])
    entry = catalog_entry(spec)
    return entry.chart, entry.ambient


def _cmd_run(args):
    try:
        chart, amb = _resolve_chart(args.chart)
    except (KeyError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    tol = ToleranceConfig(
        rank=args.tol_rank, cr=args.tol_cr,
        slack=args.tol_slack, eq=args.tol_eq)
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed,
                          certify_samples=args.certify_samples)

    try:
        inv_specs = [_parse_invariant(s) for s in (args.invariant or [])]
        check_specs_raw = [_parse_check(s) for s in (args.check or [])]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not inv_specs and not check_specs_raw:
        check_specs_raw = [("all", [])]

    if args.grid:
        points = chart.grid_points(args.grid)
    else:
        points = chart.sample_points(args.points, args.seed)

    # expand 'all' and separate the chart-level scan
    d_declared = chart.cr_dims[0]
    check_specs, want_scan = [], False
    for name, cargs in check_specs_raw:
        if name == "all":
            for n2, a2 in _battery(d_declared, amb.is_flat):
                if n2 == "d_minimal":
                    want_scan = True
                else:
                    check_specs.append((n2, a2))
        elif name == "d_minimal":
            want_scan = True
        else:
            check_specs.append((name, cargs))

    header = {
        "kind": "header", "version": __version__, "chart": chart.name,
        "ambient": {"dim": amb.dim, "kind": amb.kind, "c": amb.c},
        "seed": args.seed, "points": len(points),
        "selection": {
            "invariants": [":".join([n] + a) for n, a in inv_specs],
            "checks": [":".join([n] + a) for n, a in check_specs]
            + (["d_minimal"] if want_scan else []),
        },
        "tolerances": dataclasses.asdict(tol),
        "optimizer": dataclasses.asdict(cfg),
    }

    payloads = [(chart, amb, u, i, inv_specs, check_specs, cfg, tol)
                for i, u in enumerate(points)]
    records = []
    try:
        if args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
                for idx, recs in sorted(pool.map(_point_task, payloads),
                                        key=lambda t: t[0]):
                    records.extend(recs)
        else:
            for payload in payloads:
                records.extend(_point_task(payload)[1])
        if want_scan:
            geoms = [point_geometry(amb, chart, u, tol) for u in points]
            scan = d_minimality_scan(geoms, cfg, tol)
            records.append({
                "kind": "scan", "chart": chart.name, "point_index": None,
                "name": "d_minimal", "max_norm_H_D": scan.max_norm_H_D,
                "witnesses": scan.witnesses,
                "is_d_minimal": scan.is_d_minimal,
                "passed": not scan.contradiction,
                "contradiction": scan.contradiction,
            })
    except CrcurvError as exc:
        print(f"computation error in chart {chart.name}: {exc}",
              file=sys.stderr)
        return 3

    lines = []
    if args.format == "jsonl":
        lines.append(record_line(header))
        lines.extend(record_line(r) for r in records)
    else:
        lines.append(",".join(_CSV_FIELDS))
        lines.extend(_csv_line(_jsonable(r)) for r in records)
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)

    failed = [r for r in records if r.get("passed") is False]
    if failed:
        print(f"{len(failed)} failing records", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crcurv",
        description="Curvature invariants and inequality certification for "
                    "CR charts in model almost Hermitian spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list built-in charts")

    p_explain = sub.add_parser("explain", help="describe a check")
    p_explain.add_argument("check")

    p_run = sub.add_parser("run", help="evaluate invariants/checks")
    p_run.add_argument("--chart", required=True,
                       help="catalog name or file:<path>")
    p_run.add_argument("--points", type=int, default=9,
                       help="number of seeded random sample points")
    p_run.add_argument("--grid", type=int, default=0,
                       help="per-axis grid resolution instead of sampling")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--check", action="append",
                       help="check spec, e.g. mutual_bound:1,1 or 'all'")
    p_run.add_argument("--invariant", action="append",
                       help="invariant spec, e.g. delta_m:+:1,1")
    p_run.add_argument("--tol-slack", type=float, default=1e-6)
    p_run.add_argument("--tol-eq", type=float, default=1e-6)
    p_run.add_argument("--tol-cr", type=float, default=0.1)
    p_run.add_argument("--tol-rank", type=float, default=1e-8)
    p_run.add_argument("--restarts", type=int, default=8)
    p_run.add_argument("--certify-samples", type=int, default=10_000)
    p_run.add_argument("--jobs", type=int,
                       default=int(os.environ.get("CRCURV_JOBS", "1")))
    p_run.add_argument("--out", default="-")
    p_run.add_argument("--format", choices=("jsonl", "csv"),
                       default="jsonl")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog":
        return _cmd_catalog(args)
    if args.command == "explain":
        return _cmd_explain(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
