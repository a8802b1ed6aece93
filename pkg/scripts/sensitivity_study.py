"""How far apart do the two controllers get under alternative numerical settings?

Runs the nominal scenario for both controllers under a handful of variants and
prints TPL (3D and x-only), settling, overshoot and the fraction of
non-increasing backstepping Lyapunov steps after iteration 5.
"""
import argparse
import json

import numpy as np

from tdcr_sim.rod import DATASHEET_DENSITY, default_paper_rod
from tdcr_sim.scenarios import Scenario, compute_metrics, run_closed_loop

VARIANTS = {
    "baseline": {},
    "bdf2": {"alpha": 0.0},
    "coarse_grid": {"nodes": 40},
    "datasheet_density": {"density": DATASHEET_DENSITY},
    "tension_cap_100": {"t_max": 100.0},
}


def run_variant(name, opts, horizon):
    params, layout = default_paper_rod(density=opts.get("density", 17189.0), nodes=opts.get("nodes", 200))
    row = {}
    for ctrl in ("backstepping", "smc"):
        tr = run_closed_loop(ctrl, Scenario(), horizon=horizon, params=params, layout=layout,
                             alpha=opts.get("alpha", -0.2), t_max=opts.get("t_max", 50.0))
        m = compute_metrics(tr)
        V = np.asarray(tr.lyapunov)
        row[ctrl] = {**m.as_dict(), "lyapunov_nonincreasing": float(np.mean(np.diff(V[5:]) <= 0))}
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=100)
    ap.add_argument("--only", nargs="*", choices=sorted(VARIANTS))
    ap.add_argument("--json")
    args = ap.parse_args()
    results = {}
    for name in args.only or VARIANTS:
        results[name] = row = run_variant(name, VARIANTS[name], args.horizon)
        bs, smc = row["backstepping"], row["smc"]
        print(f"{name:<18} TPL bs/smc {bs['tpl_mm']:7.1f}/{smc['tpl_mm']:7.1f}  "
              f"TPLx {bs['tpl_x_mm']:6.1f}/{smc['tpl_x_mm']:6.1f}  "
              f"settle {bs['settling_iterations']:3d}/{smc['settling_iterations']:3d}  "
              f"OS {bs['overshoot_percent']:5.2f}/{smc['overshoot_percent']:5.2f}  "
              f"V-mono {bs['lyapunov_nonincreasing']:.3f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
