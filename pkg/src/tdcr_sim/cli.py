"""Command-line entry point: simulate, compare, plot, rodshape, validate.

Exit codes: 0 success, 2 configuration or input error, 3 solver failure.
"""
import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import load_config
from .errors import ConfigError, InsufficientDataError, TdcrError, TraceParseError
from .io import read_shapes, read_trace, write_shapes, write_summary, write_trace
from .scenarios import compute_metrics, run_closed_loop

log = logging.getLogger("tdcr_sim")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
METRIC_ROWS = (("TPL (mm)", "tpl_mm"), ("Settling (iter, 5%)", "settling_iterations"),
               ("Overshoot (%)", "overshoot_percent"), ("Rise (iter, 0-90%)", "rise_iterations"),
               ("Steady-state error (mm)", "steady_state_error_mm"))


def _load(args, ref):
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if getattr(args, "store_shapes", False):
        overrides["store_shapes"] = True
    return load_config(ref, overrides=overrides)


def _target_mm(cfg):
    return 1e3 * cfg.reference.amplitude


def _simulate(cfg):
    trace = run_closed_loop(**cfg.run_kwargs())
    metrics = compute_metrics(trace, _target_mm(cfg)) if len(trace) >= 10 else None
    return trace, metrics


def _write_run(out, cfg, trace, metrics):
    out.mkdir(parents=True, exist_ok=True)
    write_trace(out / "trace.csv", trace)
    if trace.shapes is not None:
        write_shapes(out / "shapes.csv", trace)
    write_summary(out / "summary.json", cfg.to_dict(), metrics,
                  {"final_tip_mm": [float(v) for v in trace.tip_mm[-1]], "iterations": len(trace)})


def cmd_simulate(args):
    cfg = _load(args, args.config[0])
    if args.dry_run:
        print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    out = Path(args.out or cfg.output_dir)
    trace, metrics = _simulate(cfg)
    _write_run(out, cfg, trace, metrics)
    tip = trace.tip_mm[-1]
    print(f"wrote {out / 'trace.csv'}: {len(trace)} iterations, final tip "
          f"({tip[0]:.2f}, {tip[1]:.2f}, {tip[2]:.2f}) mm")
    if metrics is not None:
        for label, key in METRIC_ROWS:
            print(f"  {label:<26}{metrics.as_dict()[key]:>12.4g}")
    return EXIT_OK


def format_table(names, reports):
    width = max(14, *(len(n) + 2 for n in names))
    lines = [f"{'Metric':<26}" + "".join(f"{n:>{width}}" for n in names)]
    for label, key in METRIC_ROWS:
        lines.append(f"{label:<26}" + "".join(f"{r[key]:>{width}.4g}" for r in reports))
    return "\n".join(lines)


def cmd_compare(args):
    if len(args.config) != 2:
        raise ConfigError([("--config", "compare needs exactly two configs")])
    cfgs = [_load(args, ref) for ref in args.config]
    if cfgs[0].to_dict()["scenario"] != cfgs[1].to_dict()["scenario"]:
        raise ConfigError([("scenario", "compared configs must share the same scenario")])
    if args.dry_run:
        print(json.dumps([c.to_dict() for c in cfgs], indent=2, sort_keys=True))
        return EXIT_OK
    with ThreadPoolExecutor(max_workers=2) as pool:
        results = list(pool.map(_simulate, cfgs))
    names = [c.name or c.controller.kind for c in cfgs]
    if names[0] == names[1]:
        names = [f"{n} ({i + 1})" for i, n in enumerate(names)]
    reports = []
    for cfg, (trace, metrics) in zip(cfgs, results):
        if metrics is None:
            raise InsufficientDataError("horizon too short for metrics (need >= 10 iterations)")
        reports.append(metrics.as_dict())
    print(format_table(names, reports))
    out = Path(args.out or cfgs[0].output_dir)
    for name, cfg, (trace, metrics) in zip(names, cfgs, results):
        _write_run(out / name.replace(" ", "_").replace("(", "").replace(")", ""), cfg, trace, metrics)
    out.mkdir(parents=True, exist_ok=True)
    (out / "compare.json").write_text(json.dumps(dict(zip(names, reports)), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_plot(args):
    from .plots import plot_traces
    traces = {}
    for i, path in enumerate(args.traces):
        label = args.labels[i] if args.labels and i < len(args.labels) else Path(path).parent.name or Path(path).stem
        if label in traces:
            label = f"{label} ({i + 1})"
        traces[label] = read_trace(path)
    paths = plot_traces(traces, args.out or ".", target=args.target)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_rodshape(args):
    from .plots import plot_rod_shapes
    src = Path(args.run)
    shape_file = src / "shapes.csv" if src.is_dir() else src
    if not shape_file.exists():
        raise ConfigError([("shapes", f"{shape_file} not found; rerun simulate with --store-shapes")])
    out = Path(args.out) if args.out else shape_file.parent / "rod_shapes.svg"
    if out.suffix != ".svg":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "rod_shapes.svg"
    path, picks = plot_rod_shapes(read_shapes(shape_file), out, args.every)
    print(f"wrote {path} ({len(picks)} shapes)")
    return EXIT_OK


def cmd_validate(args):
    for ref in args.config:
        cfg = _load(args, ref)
        print(f"{ref}: ok ({cfg.controller.kind}, {cfg.scenario.kind}, N={cfg.discretization.nodes})")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tdcr", description="Tendon-driven continuum robot control simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, multi=False):
        sp.add_argument("--config", action="append", required=True,
                        help="JSON config path or preset name" + (" (give twice)" if multi else ""))
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--horizon", type=int, help="override the number of iterations")
        sp.add_argument("--dry-run", action="store_true", help="validate and print the resolved config")

    sp = sub.add_parser("simulate", help="run one closed-loop simulation")
    common(sp)
    sp.add_argument("--store-shapes", action="store_true", help="also save every rod centerline")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="run two configs and tabulate their metrics")
    common(sp, multi=True)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("plot", help="plot tip x, tip z, displacement and error panels")
    sp.add_argument("traces", nargs="+")
    sp.add_argument("--labels", nargs="*")
    sp.add_argument("--target", type=float, default=340.0, help="target x in mm (dashed line)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("rodshape", help="overlay rod centerlines from a run stored with --store-shapes")
    sp.add_argument("run", help="run directory or shapes.csv")
    sp.add_argument("--every", type=int, default=5)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rodshape)

    sp = sub.add_parser("validate", help="check configs without running")
    sp.add_argument("--config", action="append", required=True)
    sp.set_defaults(func=cmd_validate, horizon=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, TraceParseError, InsufficientDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TdcrError as exc:
        at = getattr(exc, "iteration", None)
        where = f" at iteration {at}" if at is not None else ""
        print(f"solver failure{where}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
