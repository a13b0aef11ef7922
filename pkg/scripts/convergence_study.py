"""Conserved-quantity drift under time-step refinement.

Runs the same random cloud at dt, dt/2, dt/4, ... and tabulates the drift
of mass, center-adjusted first moment, and interaction energy, with the
observed convergence order between consecutive levels.

    python3 scripts/convergence_study.py --levels 3 --t-end 5
"""

from __future__ import annotations

import argparse
import math
import sys

from cylvort import ScenarioSpec, SimConfig, build_scenario, simulate
from cylvort.analysis import conservation_drift


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blobs", type=int, default=100)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--dt", type=float, default=0.02, help="coarsest step")
    ap.add_argument("--t-end", type=float, default=5.0)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--integrator", default="rk4", choices=["rk4", "rk2"])
    args = ap.parse_args(argv)

    spec = ScenarioSpec(
        kind="random_cloud",
        blob_count=args.blobs,
        delta=args.delta,
        circulation_scale=1.0,
        seed=args.seed,
    )
    rows = []
    for k in range(args.levels):
        dt = args.dt / 2**k
        ens = build_scenario(spec)
        cfg = SimConfig(
            dt=dt,
            t_end=args.t_end,
            output_every=max(1, round(args.t_end / dt)),
            integrator=args.integrator,
        )
        records, _ = simulate(ens, cfg)
        rows.append((dt, conservation_drift(records)))
        print(f"dt={dt:.6g}: done ({len(records)} records)", flush=True)

    print()
    print(f"{'dt':>10}  {'mass':>10}  {'h':>10}  {'energy':>10}  "
          f"{'order(h)':>8}  {'order(e)':>8}")
    for k, (dt, d) in enumerate(rows):
        orders = ["", ""]
        if k > 0:
            prev = rows[k - 1][1]
            for i, key in enumerate(("h_drift", "energy_drift")):
                a, b = prev[key], d[key]
                if a and b:
                    orders[i] = f"{math.log2(abs(a) / abs(b)):8.2f}"
        e = d["energy_drift"]
        e_str = f"{e:10.3e}" if e is not None else "       nan"
        print(f"{dt:10.6f}  {d['mass_drift']:10.3e}  {d['h_drift']:10.3e}  "
              f"{e_str}  {orders[0]:>8}  {orders[1]:>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
