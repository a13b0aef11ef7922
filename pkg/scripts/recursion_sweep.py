"""Sweep the decay certificate over constant choices.

Checks the doubly-exponential bound on the auxiliary recursion for a grid
of (c2, c6) pairs plus optional random draws, and reports the worst margin
(1 - max ratio to the bound) seen anywhere.

    python3 scripts/recursion_sweep.py --draws 200 --json sweep.json
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from cylvort import RecursionParams
from cylvort.recursion import verify_kur_bound


def check_one(c2: float, c6: float, n_span: int, j_max: int) -> dict:
    params = RecursionParams(c1=2.0, c2=c2, c6=c6)
    ns = range(params.n0, params.n0 + n_span)
    cert = verify_kur_bound(params, ns, range(j_max + 1))
    return {
        "c2": c2,
        "c6": c6,
        "n0": params.n0,
        "c3": params.c3,
        "c4": params.c4,
        "max_ratio": cert.max_ratio,
        "passed": cert.passed,
        "suspended": cert.suspended,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=5, help="grid points per axis")
    ap.add_argument("--draws", type=int, default=100, help="random (c2, c6) draws")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-span", type=int, default=8)
    ap.add_argument("--j-max", type=int, default=14)
    ap.add_argument("--json", help="write per-case results as JSON")
    args = ap.parse_args(argv)

    cases = []
    for c2 in np.linspace(2.0, 8.0, args.grid):
        for c6 in np.geomspace(0.1, 10.0, args.grid):
            cases.append((float(c2), float(c6)))
    rng = np.random.default_rng(args.seed)
    for _ in range(args.draws):
        cases.append((float(rng.uniform(2.0, 8.0)),
                      float(rng.uniform(0.1, 10.0))))

    results = [check_one(c2, c6, args.n_span, args.j_max) for c2, c6 in cases]
    worst = max(results, key=lambda r: r["max_ratio"])
    failures = [r for r in results if not r["passed"]]

    print(f"{len(results)} cases, {len(failures)} failures")
    print(f"worst margin: 1 - max_ratio = {1.0 - worst['max_ratio']:.3e} "
          f"at c2={worst['c2']:.4f}, c6={worst['c6']:.4f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
        print(f"results -> {args.json}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
