"""Nominal backstepping vs SMC: metrics table, traces and plots."""
import argparse
import json
from pathlib import Path

from tdcr_sim.cli import format_table
from tdcr_sim.io import write_trace
from tdcr_sim.plots import plot_traces
from tdcr_sim.rod import default_paper_rod
from tdcr_sim.scenarios import Scenario, compute_metrics, run_closed_loop


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--horizon", type=int, default=100)
    ap.add_argument("--out", default="runs/compare_controllers")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params, layout = default_paper_rod(nodes=args.nodes)
    traces, reports = {}, []
    for ctrl in ("backstepping", "smc"):
        traces[ctrl] = tr = run_closed_loop(ctrl, Scenario(), horizon=args.horizon, params=params, layout=layout)
        reports.append(compute_metrics(tr).as_dict())
        write_trace(out / f"{ctrl}.csv", tr)
    print(format_table(list(traces), reports))
    print(f"{'TPL, x only (mm)':<26}" + "".join(f"{r['tpl_x_mm']:>14.4g}" for r in reports))
    (out / "metrics.json").write_text(json.dumps(dict(zip(traces, reports)), indent=2, sort_keys=True) + "\n")
    plot_traces(traces, out, target=340.0)


if __name__ == "__main__":
    main()
