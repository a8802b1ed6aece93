"""Tip-position controllers for planar motion along the global x axis.

The tip is modelled as a double integrator ``x1' = x2``, ``x2' = a_c + b_c U``
where ``U`` is the tension of the actuated tendon; ``a_c`` and ``b_c`` are
read off the last converged rod state.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UncontrollableConfigurationError
from .tendons import _alpha_columns

X_AXIS = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class PlantTerms:
    a_c: float
    b_c: float
    X1: float
    X2: float


@dataclass(frozen=True)
class SmcGains:
    c: float = 2100.0
    k: float = 12.0
    eps: float = 0.005

    def __post_init__(self):
        if not (self.c > 0 and self.k > 0 and self.eps >= 0):
            raise InvalidArgumentError("SMC gains need c > 0, k > 0, eps >= 0")


@dataclass(frozen=True)
class BacksteppingGains:
    alpha1: float = 1500.0
    alpha2: float = 12.5

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise InvalidArgumentError("backstepping gains must be positive")


@dataclass(frozen=True)
class ControlCommand:
    tensions: np.ndarray
    displacements: np.ndarray
    clamped: bool
    raw: float


def plant_terms(step, model, tendon=0, axis=X_AXIS, b_min=1e-8):
    """Tip position/velocity along ``axis`` and the affine input model there.

    Raises ``UncontrollableConfigurationError`` when ``|b_c| <= b_min``;
    ``b_min=None`` skips the check.
    """
    lay = model.layout
    rho_a = model.rho_a
    R = step.R[-1]
    q = step.q[-1]
    f_e = rho_a * model.params.gravity - R @ (model.params.C @ (q * np.abs(q)))
    alpha, ok = _alpha_columns(step.u[-1], step.v[-1], step.u_s[-1], step.v_s[-1],
                               lay.offsets, lay.offset_rates, lay.offset_accels)
    if not ok:
        raise UncontrollableConfigurationError("tendon path degenerate at the tip")
    a_c = float(axis @ (step.n_s[-1] + f_e)) / rho_a
    b_c = float(axis @ (-R @ alpha[:, tendon])) / rho_a
    if b_min is not None and not abs(b_c) > b_min:
        raise UncontrollableConfigurationError(f"|b_c| = {abs(b_c):.3e} below floor {b_min:.1e}")
    return PlantTerms(a_c=a_c, b_c=b_c, X1=float(axis @ step.p[-1]), X2=float(axis @ (R @ q)))


def smc_control(plant, ref, gains):
    x_d, xd_d, xdd_d = ref
    e = x_d - plant.X1
    e_dot = xd_d - plant.X2
    S = e_dot + gains.c * e
    return (gains.c * e_dot + xdd_d - plant.a_c + gains.eps * np.sign(S) + gains.k * S) / plant.b_c


def backstepping_control(plant, ref, gains):
    x_d, xd_d, xdd_d = ref
    a1, a2 = gains.alpha1, gains.alpha2
    z1 = x_d - plant.X1
    z2 = plant.X2 - xd_d - a1 * z1
    return (-plant.a_c + z1 - a1 * z2 - a1**2 * z1 - a2 * z2 + xdd_d) / plant.b_c


def tendon_displacements(step, layout, length):
    """Shortening of every tendon path relative to the straight rod (trapezoid rule)."""
    s = np.linspace(0.0, length, step.nodes)
    out = np.empty(layout.count)
    for i in range(layout.count):
        p_is = np.cross(step.u, layout.offsets[i]) + layout.offset_rates[i] + step.v
        out[i] = length - np.trapezoid(np.linalg.norm(p_is, axis=1), s)
    return out


def clamp_and_convert(U, step, layout, length, tendon=0, t_max=50.0):
    tension = float(np.clip(U, 0.0, t_max))
    T = np.zeros(layout.count)
    T[tendon] = tension
    return ControlCommand(tensions=T, displacements=tendon_displacements(step, layout, length),
                          clamped=tension != U, raw=float(U))


def lyapunov_values(plant, ref, smc_gains=None, bs_gains=None):
    """Backstepping ``V = (z1^2 + z2^2)/2`` and sliding-mode ``V = S^2/2``."""
    bs_gains = bs_gains or BacksteppingGains()
    smc_gains = smc_gains or SmcGains()
    x_d, xd_d, _ = ref
    z1 = x_d - plant.X1
    z2 = plant.X2 - xd_d - bs_gains.alpha1 * z1
    S = (xd_d - plant.X2) + smc_gains.c * (x_d - plant.X1)
    return {"backstepping": 0.5 * (z1**2 + z2**2), "smc": 0.5 * S**2}
