"""Trace, shape and summary files. Files use mm and N; everything in memory is SI."""
import csv
import json
from pathlib import Path

import numpy as np

from .errors import TraceParseError
from .scenarios import SimTrace

TRACE_HEADER = ["iteration", "t_s", "tip_x_mm", "tip_y_mm", "tip_z_mm", "tension_N", "displacement_mm",
                "error_mm", "lyapunov", "shoot_iters", "shoot_residual"]
SHAPE_HEADER = ["iteration", "node", "x_mm", "y_mm", "z_mm"]


def _fmt(x):
    return repr(float(x))


def write_trace(path, trace):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        tip = trace.tip_mm
        for k in range(len(trace)):
            w.writerow([k, _fmt(trace.t[k]), _fmt(tip[k, 0]), _fmt(tip[k, 1]), _fmt(tip[k, 2]),
                        _fmt(trace.tension[k]), _fmt(1e3 * trace.displacement[k]), _fmt(1e3 * trace.error[k]),
                        _fmt(trace.lyapunov[k]), int(trace.shoot_iters[k]), _fmt(trace.shoot_residual[k])])
    return path


def read_trace(path):
    """Parse a trace CSV back into a ``SimTrace`` (SI units)."""
    path = Path(path)
    trace = SimTrace()
    with path.open(newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None:
            raise TraceParseError(f"{path}: empty file", line=1)
        if header != TRACE_HEADER:
            raise TraceParseError(f"{path}: unexpected header {header}", line=1)
        for lineno, row in enumerate(rows, start=2):
            if len(row) != len(TRACE_HEADER):
                raise TraceParseError(f"{path}: expected {len(TRACE_HEADER)} fields, got {len(row)}", line=lineno)
            try:
                k = int(row[0])
                vals = [float(x) for x in row[1:9]]
                iters, res = int(row[9]), float(row[10])
            except ValueError as exc:
                raise TraceParseError(f"{path}: {exc}", line=lineno) from None
            if k != len(trace):
                raise TraceParseError(f"{path}: iteration {k} out of sequence", line=lineno)
            t, x, y, z, T, d, e, V = vals
            trace.append(t, 1e-3 * np.array([x, y, z]), T, 1e-3 * d, 1e-3 * e, V, iters, res)
    if len(trace) == 0:
        raise TraceParseError(f"{path}: trace has no rows", line=2)
    return trace


def write_shapes(path, trace):
    if trace.shapes is None:
        raise ValueError("trace carries no rod shapes")
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SHAPE_HEADER)
        for k, P in enumerate(trace.shapes):
            for j, p in enumerate(1e3 * P):
                w.writerow([k, j, _fmt(p[0]), _fmt(p[1]), _fmt(p[2])])
    return Path(path)


def read_shapes(path):
    """Return a list of ``(N, 3)`` centerlines in mm, one per iteration."""
    shapes = {}
    with Path(path).open(newline="") as fh:
        rows = csv.reader(fh)
        if next(rows, None) != SHAPE_HEADER:
            raise TraceParseError(f"{path}: unexpected header", line=1)
        for lineno, row in enumerate(rows, start=2):
            try:
                k, j = int(row[0]), int(row[1])
                shapes.setdefault(k, []).append([float(v) for v in row[2:5]])
            except (ValueError, IndexError) as exc:
                raise TraceParseError(f"{path}: {exc}", line=lineno) from None
    if not shapes:
        raise TraceParseError(f"{path}: no shapes", line=2)
    return [np.array(shapes[k]) for k in sorted(shapes)]


def write_summary(path, config_dict, metrics, extra=None):
    data = {"config": config_dict, "metrics": metrics.as_dict() if metrics is not None else None}
    if extra:
        data.update(extra)
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return Path(path)
