"""Reference trajectory, test scenarios, closed-loop runs and tracking metrics."""
from dataclasses import dataclass, field
import logging

import numpy as np

from .controllers import (BacksteppingGains, PlantTerms, SmcGains, backstepping_control, clamp_and_convert,
                          lyapunov_values, plant_terms, smc_control, tendon_displacements)
from .dynamics import RodModel, bdf_coeffs
from .errors import InsufficientDataError, InvalidArgumentError, TdcrError
from .rod import default_paper_rod
from .shooting import RodSimulator, ShootingConfig

log = logging.getLogger(__name__)

CONTROLLERS = ("backstepping", "smc", "zero")
SCENARIOS = ("nominal", "tip-weight", "disturbance")


@dataclass(frozen=True)
class ReferenceTrajectory:
    amplitude: float = 0.340
    rate: float = 20.0

    def __post_init__(self):
        if not (self.amplitude > 0 and self.rate > 0):
            raise InvalidArgumentError("reference amplitude and rate must be > 0")

    def __call__(self, t):
        return reference(t, self)


def reference(t, traj=ReferenceTrajectory()):
    """Desired tip x position, velocity and acceleration at time ``t`` (SI)."""
    if t < 0:
        raise InvalidArgumentError("reference time must be >= 0")
    decay = np.exp(-traj.rate * t)
    A, lam = traj.amplitude, traj.rate
    return A * (1 - decay), A * lam * decay, -A * lam**2 * decay


@dataclass(frozen=True)
class Scenario:
    kind: str = "nominal"
    weight_mass: float = 0.0
    weight_direction: tuple = (-1.0, 0.0, 0.0)
    disturbance_force: tuple = (10.0, 0.0, -10.0)
    disturbance_start: int = 50
    disturbance_duration: int = 1

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise InvalidArgumentError(f"unknown scenario kind {self.kind!r}")
        if self.weight_mass < 0:
            raise InvalidArgumentError("weight mass must be >= 0")
        if self.disturbance_duration < 1:
            raise InvalidArgumentError("disturbance duration must be >= 1")

    def tip_force(self, iteration, g_norm=9.81):
        """External tip force (N) acting during the step that produces ``iteration``."""
        F = np.zeros(3)
        if self.kind == "tip-weight" and self.weight_mass > 0:
            d = np.asarray(self.weight_direction, float)
            F += self.weight_mass * g_norm * d / np.linalg.norm(d)
        if self.kind == "disturbance":
            if self.disturbance_start <= iteration < self.disturbance_start + self.disturbance_duration:
                F += np.asarray(self.disturbance_force, float)
        return F


@dataclass
class SimTrace:
    """Per-iteration record of a closed-loop run, SI units.

    Row 0 is the static initial state; row ``k`` is the state after the
    ``k``-th control update.
    """

    t: list = field(default_factory=list)
    tip: list = field(default_factory=list)
    tension: list = field(default_factory=list)
    displacement: list = field(default_factory=list)
    error: list = field(default_factory=list)
    lyapunov: list = field(default_factory=list)
    shoot_iters: list = field(default_factory=list)
    shoot_residual: list = field(default_factory=list)
    shapes: list = None

    def __len__(self):
        return len(self.t)

    def append(self, t, tip, tension, displacement, error, lyapunov, iters, res, shape=None):
        self.t.append(float(t))
        self.tip.append(np.asarray(tip, float).copy())
        self.tension.append(float(tension))
        self.displacement.append(float(displacement))
        self.error.append(float(error))
        self.lyapunov.append(float(lyapunov))
        self.shoot_iters.append(int(iters))
        self.shoot_residual.append(float(res))
        if self.shapes is not None and shape is not None:
            self.shapes.append(np.asarray(shape, float).copy())

    @property
    def iteration(self):
        return np.arange(len(self.t))

    @property
    def tip_mm(self):
        return 1e3 * np.asarray(self.tip).reshape(-1, 3)


@dataclass(frozen=True)
class MetricsReport:
    tpl: float
    settling: int
    overshoot: float
    rise: int
    steady_state_error: float
    tpl_x: float

    def as_dict(self):
        return {"tpl_mm": self.tpl, "settling_iterations": self.settling, "overshoot_percent": self.overshoot,
                "rise_iterations": self.rise, "steady_state_error_mm": self.steady_state_error,
                "tpl_x_mm": self.tpl_x}


def compute_metrics(trace, target=340.0, band=0.05, tail=10):
    """Table-style tracking metrics; positions in mm, times in iterations.

    ``tpl`` is the 3D tip path length and ``tpl_x`` the path length of the
    x coordinate alone.
    """
    if len(trace) < tail:
        raise InsufficientDataError(f"need at least {tail} iterations, got {len(trace)}")
    tip = trace.tip_mm
    x = tip[:, 0]
    H = len(x)
    tpl = float(np.sum(np.linalg.norm(np.diff(tip, axis=0), axis=1)))
    tpl_x = float(np.sum(np.abs(np.diff(x))))

    outside = np.nonzero(np.abs(x - target) > band * target)[0]
    settling = 0 if outside.size == 0 else int(outside[-1]) + 1

    overshoot = max(0.0, (float(x.max()) - target) / target) * 100.0

    def first(mask):
        idx = np.nonzero(mask)[0]
        return int(idx[0]) if idx.size else H

    rise = max(first(x >= 0.9 * target) - first(x >= 0.0), 0)
    sse = abs(float(np.mean(1e3 * np.asarray(trace.error[-tail:]))))
    return MetricsReport(tpl=tpl, settling=settling, overshoot=overshoot, rise=rise,
                         steady_state_error=sse, tpl_x=tpl_x)


def _control(kind, plant, ref, gains):
    if kind == "backstepping":
        return backstepping_control(plant, ref, gains)
    if kind == "smc":
        return smc_control(plant, ref, gains)
    return 0.0


def run_closed_loop(controller="backstepping", scenario=None, horizon=100, params=None, layout=None,
                    dt=0.01, alpha=-0.2, gains=None, t_max=50.0, tendon=0, traj=None,
                    shooting=None, store_shapes=False, b_min=1e-8):
    """Simulate the closed loop for ``horizon`` iterations (including the initial row)."""
    if controller not in CONTROLLERS:
        raise InvalidArgumentError(f"unknown controller {controller!r}")
    if horizon < 1:
        raise InvalidArgumentError("horizon must be >= 1")
    scenario = scenario or Scenario()
    traj = traj or ReferenceTrajectory()
    if params is None or layout is None:
        p0, l0 = default_paper_rod()
        params = params or p0
        layout = layout or l0
    if gains is None:
        gains = SmcGains() if controller == "smc" else BacksteppingGains()
    g_norm = float(np.linalg.norm(params.gravity))
    model = RodModel(params, layout)
    sim = RodSimulator(model, bdf_coeffs(dt, alpha), shooting or ShootingConfig())
    trace = SimTrace(shapes=[] if store_shapes else None)

    def lyap(step, t):
        X1 = float(step.p[-1, 0])
        X2 = float((step.R[-1] @ step.q[-1])[0])
        vals = lyapunov_values(PlantTerms(0.0, 1.0, X1, X2), traj(t),
                               smc_gains=gains if controller == "smc" else None,
                               bs_gains=gains if controller == "backstepping" else None)
        return vals["smc"] if controller == "smc" else vals["backstepping"]

    def record(step, t, T, report):
        x_d = traj(t)[0]
        disp = tendon_displacements(step, layout, params.length)[tendon]
        trace.append(t, step.tip, T[tendon], disp, x_d - step.tip[0], lyap(step, t),
                     report.iterations, report.residual_norm, step.p)

    T = np.zeros(layout.count)
    try:
        step, report = sim.initialize(T, scenario.tip_force(0, g_norm))
    except TdcrError as exc:
        exc.iteration = 0
        raise
    record(step, 0.0, T, report)
    for k in range(1, horizon):
        try:
            if controller == "zero":
                T = np.zeros(layout.count)
            else:
                plant = plant_terms(step, model, tendon, b_min=b_min)
                U = _control(controller, plant, traj(sim.t), gains)
                T = clamp_and_convert(U, step, layout, params.length, tendon, t_max).tensions
            step, report = sim.dynamic_step(T, scenario.tip_force(k, g_norm))
        except TdcrError as exc:
            exc.iteration = k
            log.error("run failed at iteration %d: %s", k, exc)
            raise
        record(step, sim.t, T, report)
    return trace
