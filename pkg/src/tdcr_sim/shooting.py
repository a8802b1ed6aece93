"""Shooting solution of the per-timestep boundary value problem.

The base force and moment are unknown; they are found by damped Newton
iteration on the mismatch between the propagated free-end loads and the loads
the tendon terminations (plus any tip force) impose there.
"""
from dataclasses import dataclass

import numpy as np

from .dynamics import HistoryBuffer, advance_history, propagate
from .errors import (DivergenceError, InvalidArgumentError, NonConvergenceError, SingularSystemError,
                     SingularTendonPathError)
from .mathkernel import COND_LIMIT, _solve6
from .tendons import _free_end_loads


@dataclass(frozen=True)
class ShootingConfig:
    tol: float = 1e-6
    max_iter: int = 50
    fd_rel_step: float = 1e-7
    fd_abs_step: float = 1e-9
    max_halvings: int = 8

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgumentError("shooting tolerance must be > 0")
        if self.max_iter < 1:
            raise InvalidArgumentError("max_iter must be >= 1")


@dataclass(frozen=True)
class ShootingReport:
    converged: bool
    iterations: int
    residual_norm: float
    condition: float


def _tip_residual(model, step, T, tip_force):
    lay = model.layout
    n_L, m_L, _ = _free_end_loads(step.R[-1], step.u[-1], step.v[-1], T, lay.offsets, lay.offset_rates, tip_force)
    return np.concatenate([step.n[-1] - n_L, step.m[-1] - m_L])


def residual(model, guess, tensions, tip_force=None, coeffs=None, hist_terms=None):
    """Free-end mismatch ``(n(L) - n_req, m(L) - m_req)`` for base loads ``guess``."""
    guess = np.asarray(guess, dtype=float).reshape(6)
    T = model.tensions(tensions)
    F = np.zeros(3) if tip_force is None else np.asarray(tip_force, float).reshape(3)
    step = propagate(model, guess[:3], guess[3:], T, coeffs, hist_terms)
    return _tip_residual(model, step, T, F), step


def solve(model, warm_start, tensions, tip_force=None, coeffs=None, hist_terms=None, config=None, t=0.0):
    """Damped Newton shooting. Returns ``(guess, step, report)``."""
    cfg = config or ShootingConfig()
    x = np.asarray(warm_start, dtype=float).reshape(6).copy()
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("warm start must be finite")
    T = model.tensions(tensions)
    F = np.zeros(3) if tip_force is None else np.asarray(tip_force, float).reshape(3)
    scale = np.array([1, 1, 1, 1 / model.params.length, 1 / model.params.length, 1 / model.params.length])

    def F_eval(xx):
        step = propagate(model, xx[:3], xx[3:], T, coeffs, hist_terms, t=t)
        return scale * _tip_residual(model, step, T, F), step

    r, step = F_eval(x)
    norm = np.linalg.norm(r)
    cond = float("nan")
    it = 0
    while norm > cfg.tol:
        if it >= cfg.max_iter:
            raise NonConvergenceError(
                f"shooting did not converge in {cfg.max_iter} iterations (residual {norm:.3e})",
                residual=norm)
        it += 1
        Jac = np.empty((6, 6))
        for k in range(6):
            h = max(cfg.fd_rel_step * abs(x[k]), cfg.fd_abs_step)
            xk = x.copy()
            xk[k] += h
            Jac[:, k] = (F_eval(xk)[0] - r) / h
        dx, cond = _solve6(Jac, -r)
        if not cond <= COND_LIMIT:
            raise SingularSystemError(f"shooting Jacobian singular (cond ~ {cond:.3e})", condition=cond)
        lam = 1.0
        best = None
        for _ in range(cfg.max_halvings + 1):
            x_try = x + lam * dx
            try:
                r_try, step_try = F_eval(x_try)
                n_try = np.linalg.norm(r_try)
            except (SingularSystemError, DivergenceError, SingularTendonPathError):
                n_try = np.inf
            if np.isfinite(n_try) and (best is None or n_try < best[0]):
                best = (n_try, x_try, r_try, step_try)
            if n_try < norm:
                break
            lam *= 0.5
        if best is None:
            raise NonConvergenceError("shooting step produced no finite residual", residual=norm)
        norm, x, r, step = best
    return x, step, ShootingReport(True, it, float(norm), float(cond))


def tension_predictor(model, step, dT):
    """Change of base loads implied by a tension change ``dT`` at fixed geometry.

    Rod and tendons together see only external loads, so to first order the
    rod's base force shifts by the change in tendon pull along the tendon
    tangents at the base, and the base moment by its lever arm.
    """
    lay = model.layout
    d_n, d_m, _ = _free_end_loads(step.R[0], step.u[0], step.v[0], np.asarray(dT, float), lay.offsets,
                                  lay.offset_rates, np.zeros(3))
    return np.concatenate([d_n, d_m])


class RodSimulator:
    """One rod advancing in time: owns the history buffer and the warm start."""

    def __init__(self, model, coeffs, config=None):
        self.model = model
        self.coeffs = coeffs
        self.config = config or ShootingConfig()
        self.history = None
        self.guess = np.zeros(6)
        self.tensions = None
        self.step = None
        self.t = 0.0
        self.iteration = 0

    def initialize(self, tensions, tip_force=None):
        """Static solve (time terms frozen) and cold-start history."""
        self.guess, self.step, report = solve(self.model, np.zeros(6), tensions, tip_force,
                                              coeffs=None, config=self.config)
        self.history = HistoryBuffer.cold_start(self.step)
        self.tensions = self.model.tensions(tensions).copy()
        self.t = 0.0
        self.iteration = 0
        return self.step, report

    def dynamic_step(self, tensions, tip_force=None):
        if self.history is None:
            raise InvalidArgumentError("simulator not initialized")
        t_next = self.t + self.coeffs.dt
        T = self.model.tensions(tensions)
        hist = self.history.history_terms(self.coeffs)
        start = self.guess + tension_predictor(self.model, self.step, T - self.tensions)
        guess, step, report = solve(self.model, start, T, tip_force, self.coeffs, hist,
                                    self.config, t=t_next)
        self.history = advance_history(step, self.history, self.coeffs)
        self.guess, self.step, self.t, self.tensions = guess, step, t_next, T.copy()
        self.iteration += 1
        return step, report
