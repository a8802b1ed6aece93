"""Convergence order of the BDF-alpha scheme on y' = -y, exact and cold start."""
import argparse

import numpy as np

from tdcr_sim.dynamics import integrate_linear_decay


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", type=float, nargs="*", default=[0.0, -0.1, -0.2, -0.3])
    ap.add_argument("--levels", type=int, default=5)
    args = ap.parse_args()
    dts = 0.04 / 2 ** np.arange(args.levels)
    for start in (True, False):
        print(f"{'exact' if start else 'cold'} start")
        for alpha in args.alphas:
            errs = [abs(integrate_linear_decay(1.0, 1.0, 1.0, dt, alpha, exact_start=start)[1][-1] - np.exp(-1.0))
                    for dt in dts]
            ratios = " ".join(f"{a / b:6.3f}" for a, b in zip(errs, errs[1:]))
            print(f"  alpha={alpha:+.2f}  err(dt={dts[-1]:.4g})={errs[-1]:.3e}  ratios {ratios}")


if __name__ == "__main__":
    main()
