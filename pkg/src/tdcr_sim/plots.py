"""SVG figures: tip/tension/error panels and rod-shape fans."""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PANELS = (
    ("tip_x", "Tip x (mm)", lambda tr: tr.tip_mm[:, 0]),
    ("tip_z", "Tip z (mm)", lambda tr: tr.tip_mm[:, 2]),
    ("displacement", "Tendon displacement (mm)", lambda tr: 1e3 * np.asarray(tr.displacement)),
    ("error", "Position error (mm)", lambda tr: 1e3 * np.asarray(tr.error)),
)

# fixed ids and no timestamp so repeated runs give identical files
_RC = {"svg.hashsalt": "tdcr", "svg.fonttype": "none"}
_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return Path(path)


def plot_traces(traces, out_dir, target=None):
    """Write one SVG per panel; ``traces`` maps legend label to ``SimTrace``."""
    if not traces:
        raise ValueError("no traces to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    with plt.rc_context(_RC):
        for name, ylabel, get in PANELS:
            fig, ax = plt.subplots(figsize=(5, 3.5))
            for label, tr in traces.items():
                ax.plot(tr.iteration, get(tr), label=label)
            if name == "tip_x" and target is not None:
                ax.axhline(target, color="grey", ls="--", lw=0.8, label="target")
            ax.set_xlabel("Iteration")
            ax.set_ylabel(ylabel)
            ax.grid(alpha=0.3)
            ax.legend()
            fig.tight_layout()
            paths.append(_save(fig, out_dir / f"{name}.svg"))
    return paths


def plot_rod_shapes(shapes, path, stride=5):
    """Overlay x-z centerlines every ``stride`` iterations, always including the first and last."""
    if not shapes:
        raise ValueError("no rod shapes to plot")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    picks = list(range(0, len(shapes), stride))
    if stride >= len(shapes):
        picks = [len(shapes) - 1]
    elif picks[-1] != len(shapes) - 1:
        picks.append(len(shapes) - 1)
    colors = plt.cm.viridis(np.linspace(0, 1, len(picks)))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for c, k in zip(colors, picks):
            P = np.asarray(shapes[k])
            ax.plot(P[:, 0], P[:, 2], color=c, lw=1.2, label=f"iter {k}")
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("z (mm)")
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(alpha=0.3)
        if len(picks) <= 12:
            ax.legend(fontsize=7)
        fig.tight_layout()
        return _save(fig, path), picks
