"""Command-line entry point.

Subcommands:

    simulate <config>       run a configured scenario, write diagnostics CSV
                            plus a run-manifest JSON (and optional snapshot)
    verify-recursion        exact recursion verification -> JSON certificate
    analyze <csv>           drift / growth-fit / tail-inequality / envelope
                            report from a diagnostics CSV
    kernel-table            deterministic kernel value table for golden
                            cross-implementation comparison

Exit codes: 0 success (and certificate pass), 1 runtime abort or
certificate failure, 2 usage/config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    conservation_drift,
    empirical_tail_inequality,
    envelope_comparison,
    growth_fit_report,
)
from .config import load_run_config
from .ensemble import (
    csv_header,
    record_to_row,
    records_from_csv,
    save_snapshot,
)
from .envelope import envelope_constants, sandwich_constants
from .errors import ConfigError, SimulationAbort, SingularityError
from .kernels import Displacement, biot_savart_kernel, stream_kernel
from .recursion import (
    RecursionParams,
    compute_g_sequence,
    consistency_g_vs_b,
    hitting_times,
    verify_kur_bound,
)
from .scenarios import build_scenario
from .dynamics import simulate


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    try:
        cfg = load_run_config(args.config)
        ens = build_scenario(cfg.scenario)
    except ConfigError as exc:
        return _fail(str(exc), 2)

    base = Path(args.config)

    def resolve(flag, from_cfg, default):
        # flags are cwd-relative; config-file paths resolve from the config
        if flag:
            return Path(flag)
        if from_cfg:
            p = Path(from_cfg)
            return p if p.is_absolute() else base.parent / p
        return default

    csv_path = resolve(args.csv, cfg.csv_path, base.with_suffix(".csv"))
    manifest_path = resolve(
        args.manifest, cfg.manifest_path, base.with_suffix(".manifest.json")
    )
    snapshot_path = resolve(args.snapshot, cfg.snapshot_path, None)

    manifest = {
        "config_path": str(base),
        "config": cfg.raw,
        "blob_count": len(ens),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "cylvort": __version__,
        },
    }

    t_wall = time.perf_counter()
    n_records = 0
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(csv_header(cfg.sim.tail_exponents)) + "\n")

        def on_record(rec, state):
            nonlocal n_records
            fh.write(",".join(record_to_row(rec)) + "\n")
            fh.flush()
            n_records += 1

        try:
            records, final = simulate(ens, cfg.sim, on_record=on_record)
        except SimulationAbort as exc:
            manifest.update(
                status="aborted",
                error=str(exc),
                records=n_records,
                wall_time_s=time.perf_counter() - t_wall,
            )
            _write_json(manifest_path, manifest)
            return _fail(f"simulation aborted: {exc}; partial CSV in {csv_path}", 1)

    if snapshot_path:
        save_snapshot(snapshot_path, final)
    manifest.update(
        status="ok",
        records=n_records,
        wall_time_s=time.perf_counter() - t_wall,
        final_t=records[-1].t,
        final_diameter=records[-1].diameter,
    )
    _write_json(manifest_path, manifest)
    print(
        f"simulate: {len(ens)} blobs, t_end={cfg.sim.t_end:g}, "
        f"{n_records} records -> {csv_path}"
    )
    return 0


# -------------------------------------------------------- verify-recursion


def _single_verification(params: RecursionParams, levels, n_max, j_max) -> dict:
    gs = compute_g_sequence(params, levels)
    ts = hitting_times(params, gs)
    c5, c6p = sandwich_constants(ts)
    cert = verify_kur_bound(
        params, range(params.n0, n_max + 1), range(0, j_max + 1)
    )
    dominance = []
    for n in range(1, min(4, levels - 1) + 1):
        rep = consistency_g_vs_b(params, n, min(4, levels - n), gs=gs)
        dominance.append(
            {
                "n": n,
                "t_n": rep.t_n,
                "a_values": rep.a_values,
                "b_values": rep.b_values,
                "max_excess": rep.max_excess,
                "passed": rep.passed,
            }
        )
    doc = {
        "certificate": cert.to_dict(),
        "hitting_times": [
            {"n": n, "t": t, "t_scaled": t * 4.0 ** (-3 * n)}
            for n, t in enumerate(ts)
            if n >= 1
        ],
        "sandwich": {"c5": c5, "c6_prime": c6p, "spread": c6p / c5},
        "dominance": dominance,
        "envelope": envelope_constants(params, ts),
    }
    doc["passed"] = cert.passed and all(d["passed"] for d in dominance)
    return doc


def cmd_verify_recursion(args) -> int:
    try:
        params = RecursionParams(args.c1, args.c2, args.c6)
    except ValueError as exc:
        return _fail(str(exc), 2)

    if args.sweep:
        rng = np.random.default_rng(args.sweep_seed)
        failures = []
        for k in range(args.sweep):
            c2 = float(rng.uniform(2.0, 8.0))
            c6 = float(rng.uniform(0.1, 10.0))
            p = RecursionParams(args.c1, c2, c6)
            cert = verify_kur_bound(
                p, range(p.n0, p.n0 + 8), range(0, args.j_max + 1)
            )
            if not cert.passed:
                failures.append({"draw": k, "c2": c2, "c6": c6,
                                 "max_ratio": cert.max_ratio})
        doc = {
            "sweep": {
                "draws": args.sweep,
                "seed": args.sweep_seed,
                "c1": args.c1,
                "failures": failures,
                "all_passed": not failures,
            }
        }
        if args.json:
            _write_json(args.json, doc)
        print(
            f"verify-recursion sweep: {args.sweep} draws, "
            f"{len(failures)} failures"
        )
        return 0 if not failures else 1

    n_max = args.n_max if args.n_max is not None else params.n0 + 7
    try:
        doc = _single_verification(params, args.levels, n_max, args.j_max)
    except ValueError as exc:
        return _fail(str(exc), 2)
    doc["params"] = doc["certificate"]["params"] | doc["certificate"]["derived"]
    if args.json:
        _write_json(args.json, doc)
    cert = doc["certificate"]
    print(
        f"verify-recursion: c3={doc['params']['c3']:.6g} "
        f"c4={doc['params']['c4']:.6g} n0={doc['params']['n0']} | "
        f"max_ratio={cert['max_ratio']:.6g} "
        f"{'PASS' if doc['passed'] else 'FAIL'}"
    )
    return 0 if doc["passed"] else 1


# ----------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    try:
        records, exponents = records_from_csv(args.csv)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), 2)
    if not records:
        return _fail(f"{args.csv}: no data rows", 2)

    report: dict = {"csv": str(args.csv), "n_records": len(records)}
    report["conservation"] = conservation_drift(records)

    try:
        report["growth_fit"] = growth_fit_report(records)
    except ValueError as exc:
        report["growth_fit"] = {"error": str(exc)}

    tail_reports = []
    for n in exponents:
        if n >= 1 and (n + 1) in exponents:
            rep = empirical_tail_inequality(records, exponents, a=2.0 * 4.0**n)
            tail_reports.append(rep.to_dict())
    report["tail_inequality"] = tail_reports

    try:
        params = RecursionParams(args.c1, args.c2, args.c6)
        ts = hitting_times(params, compute_g_sequence(params, 5))
        c5, _ = sandwich_constants(ts)
        report["envelope_comparison"] = envelope_comparison(
            records, c5=c5, c4=params.c4, L=args.L, t_ref=args.t_ref
        )
    except ValueError as exc:
        report["envelope_comparison"] = {"error": str(exc)}

    out = Path(args.json or Path(args.csv).with_suffix(".report.json"))
    _write_json(out, report)

    fit = report["growth_fit"]
    fit_txt = (
        f"p={fit['exponent']:.4f}" if "exponent" in fit else f"({fit['error']})"
    )
    print(
        f"analyze: {len(records)} records, growth {fit_txt}, "
        f"report -> {out}"
    )
    return 0


# ------------------------------------------------------------ kernel-table


def _parse_range(spec: str, name: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--{name} expects min:max:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--{name}: cannot parse {spec!r}") from None
    if count < 1:
        raise ConfigError(f"--{name}: count must be >= 1")
    return np.linspace(lo, hi, count)


def cmd_kernel_table(args) -> int:
    try:
        xs = _parse_range(args.x, "x")
        ys = _parse_range(args.y, "y")
    except ConfigError as exc:
        return _fail(str(exc), 2)
    rows = []
    for dx in xs:
        for dy in ys:
            d = Displacement(float(dx), float(dy))
            try:
                vel = biot_savart_kernel(d)
                g = stream_kernel(d)
            except SingularityError:
                return _fail(
                    f"singular kernel point dx={float(dx)!r} dy={float(dy)!r}", 2
                )
            rows.append((dx, dy, vel.u1, vel.u2, g))
    lines = ["dx,dy,k1,k2,stream"]
    lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"kernel-table: {len(rows)} rows -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cylvort",
        description="Vortex-blob flow on the cylinder with confinement "
        "verification tools.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured scenario")
    p.add_argument("config", help="key-value config file")
    p.add_argument("--csv", help="diagnostics CSV path (overrides config)")
    p.add_argument("--manifest", help="manifest JSON path (overrides config)")
    p.add_argument("--snapshot", help="final-state snapshot path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-recursion", help="exact recursion certificate")
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=2.0)
    p.add_argument("--c6", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=8,
                   help="recursion depth for hitting times (default 8)")
    p.add_argument("--n-max", type=int, default=None,
                   help="top of the certificate n range (default n0+7)")
    p.add_argument("--j-max", type=int, default=14)
    p.add_argument("--json", help="write the full JSON report here")
    p.add_argument("--sweep", type=int, default=0, metavar="N",
                   help="instead verify N seeded draws c2 in [2,8], c6 in [0.1,10]")
    p.add_argument("--sweep-seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_recursion)

    p = sub.add_parser("analyze", help="report on a diagnostics CSV")
    p.add_argument("csv")
    p.add_argument("--json", help="report path (default <csv>.report.json)")
    p.add_argument("--L", type=float, default=None,
                   help="barrier rate L (default: smallest L dominating "
                   "every record past t_ref)")
    p.add_argument("--t-ref", type=float, default=20.0)
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=2.0)
    p.add_argument("--c6", type=float, default=1.0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("kernel-table", help="golden kernel-value table")
    # even count: a symmetric default grid must not contain dx=dy=0
    p.add_argument("--x", default="-5.5:5.5:12", help="dx range min:max:count")
    p.add_argument("--y", default="0:3.141592653589793:8",
                   help="dy range min:max:count")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_kernel_table)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
