"""Tip-weight and disturbance scenarios for both controllers, with per-scenario plots."""
import argparse
import json
from pathlib import Path

import numpy as np

from tdcr_sim.io import write_trace
from tdcr_sim.plots import plot_traces
from tdcr_sim.rod import default_paper_rod
from tdcr_sim.scenarios import Scenario, compute_metrics, run_closed_loop

SCENARIOS = {
    "weight20": Scenario("tip-weight", weight_mass=0.02),
    "weight50": Scenario("tip-weight", weight_mass=0.05),
    "disturbance": Scenario("disturbance"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--out", default="runs/scenarios")
    ap.add_argument("--only", nargs="*", choices=sorted(SCENARIOS))
    args = ap.parse_args()
    params, layout = default_paper_rod(nodes=args.nodes)
    summary = {}
    for name in args.only or SCENARIOS:
        out = Path(args.out) / name
        out.mkdir(parents=True, exist_ok=True)
        traces = {}
        for ctrl in ("backstepping", "smc"):
            tr = run_closed_loop(ctrl, SCENARIOS[name], params=params, layout=layout)
            traces[ctrl] = tr
            write_trace(out / f"{ctrl}.csv", tr)
            err = 1e3 * np.abs(tr.error)
            summary[f"{name}/{ctrl}"] = row = {**compute_metrics(tr).as_dict(), "final_error_mm": float(err[-1]),
                                               "max_error_after_50_mm": float(err[50:].max())}
            print(f"{name:<12}{ctrl:<14}TPL {row['tpl_mm']:7.1f}  final err {row['final_error_mm']:7.3f} mm  "
                  f"max err after 50 {row['max_error_after_50_mm']:7.2f} mm")
        plot_traces(traces, out, target=340.0)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    (Path(args.out) / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
