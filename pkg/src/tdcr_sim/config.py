"""Run configuration: JSON loading, validation with key paths, named presets."""
from dataclasses import asdict, dataclass, field, fields
import copy
import json
import os
from pathlib import Path

import numpy as np

from .controllers import BacksteppingGains, SmcGains
from .errors import ConfigError, InvalidArgumentError, TdcrError
from .rod import ADJUSTED_DENSITY, RodParams, TendonLayout
from .scenarios import CONTROLLERS, SCENARIOS, ReferenceTrajectory, Scenario
from .shooting import ShootingConfig

PRESET_DIR = Path(__file__).resolve().parents[2] / "configs"
PROFILES = {"fast": 40, "paper": 200}
PROFILE_ENV = "COSSERAT_PROFILE"


@dataclass
class RodSection:
    length: float = 0.5
    radius: float = 0.001
    density: float = ADJUSTED_DENSITY
    youngs_modulus: float = 190e9
    poisson: float = 0.3
    gravity: list = field(default_factory=lambda: [-9.81, 0.0, 0.0])
    B_se: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    B_bt: list = field(default_factory=lambda: [0.008, 0.008, 0.008])
    C: list = field(default_factory=lambda: [0.1, 0.1, 0.1])


@dataclass
class TendonSection:
    count: int = 4
    offset: float = 0.02
    phase: float = 0.0


@dataclass
class DiscretizationSection:
    nodes: int = None
    dt: float = 0.01
    alpha: float = -0.2


@dataclass
class ControllerSection:
    kind: str = None
    gains: dict = field(default_factory=dict)
    t_max: float = 50.0
    tendon: int = 0


@dataclass
class ScenarioSection:
    kind: str = None
    weight_mass: float = 0.0
    weight_direction: list = field(default_factory=lambda: [-1.0, 0.0, 0.0])
    disturbance_force: list = field(default_factory=lambda: [10.0, 0.0, -10.0])
    disturbance_start: int = 50
    disturbance_duration: int = 1


@dataclass
class ReferenceSection:
    amplitude: float = 0.340
    rate: float = 20.0


@dataclass
class ShootingSection:
    tol: float = 1e-6
    max_iter: int = 50
    fd_rel_step: float = 1e-7
    fd_abs_step: float = 1e-9
    max_halvings: int = 8


SECTIONS = {"rod": RodSection, "tendons": TendonSection, "discretization": DiscretizationSection,
            "controller": ControllerSection, "scenario": ScenarioSection, "reference": ReferenceSection,
            "shooting": ShootingSection}
TOP_LEVEL = {"horizon": 100, "output_dir": "runs", "seed": 0, "store_shapes": False, "name": ""}
REQUIRED = (("controller", "kind"), ("scenario", "kind"))
GAIN_KEYS = {"backstepping": {"alpha1", "alpha2"}, "smc": {"c", "k", "eps"}, "zero": set()}


@dataclass
class RunConfig:
    rod: RodSection = field(default_factory=RodSection)
    tendons: TendonSection = field(default_factory=TendonSection)
    discretization: DiscretizationSection = field(default_factory=DiscretizationSection)
    controller: ControllerSection = field(default_factory=ControllerSection)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    reference: ReferenceSection = field(default_factory=ReferenceSection)
    shooting: ShootingSection = field(default_factory=ShootingSection)
    horizon: int = 100
    output_dir: str = "runs"
    seed: int = 0
    store_shapes: bool = False
    name: str = ""

    @classmethod
    def from_dict(cls, data, profile=None):
        """Build and validate; every problem is reported with its key path."""
        problems = []
        if not isinstance(data, dict):
            raise ConfigError([("", "config must be a JSON object")])
        kwargs = {}
        for key, value in data.items():
            if key in SECTIONS:
                kwargs[key] = _section(SECTIONS[key], key, value, problems)
            elif key in TOP_LEVEL:
                kwargs[key] = value
            else:
                problems.append((key, "unknown key"))
        missing = []
        for sec, key in REQUIRED:
            if not isinstance(data.get(sec), dict) or key not in data[sec]:
                missing.append(f"{sec}.{key}")
                problems.append((f"{sec}.{key}", "missing required key"))
        cfg = cls(**kwargs)
        if cfg.discretization.nodes is None:
            cfg.discretization.nodes = resolve_profile(profile)
        problems += [(k, m) for k, m in cfg.problems() if k not in missing]
        if problems:
            raise ConfigError(problems)
        return cfg

    def to_dict(self):
        return asdict(self)

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def problems(self):
        """Every violated invariant as ``(key_path, message)``."""
        problems = []
        c, s, d = self.controller, self.scenario, self.discretization
        if c.kind not in CONTROLLERS:
            problems.append(("controller.kind", f"must be one of {list(CONTROLLERS)}"))
        else:
            for g in c.gains:
                if g not in GAIN_KEYS[c.kind]:
                    problems.append((f"controller.gains.{g}", f"unknown gain for {c.kind}"))
        for g, v in c.gains.items():
            if not _positive(v) and not (g == "eps" and _number(v) and v == 0):
                problems.append((f"controller.gains.{g}", "must be a positive number"))
        if not _positive(c.t_max):
            problems.append(("controller.t_max", "must be a positive number"))
        if not (isinstance(c.tendon, int) and 0 <= c.tendon < _int_or(self.tendons.count, 0)):
            problems.append(("controller.tendon", "must index an existing tendon"))
        if s.kind not in SCENARIOS:
            problems.append(("scenario.kind", f"must be one of {list(SCENARIOS)}"))
        if not (_number(s.weight_mass) and s.weight_mass >= 0):
            problems.append(("scenario.weight_mass", "must be >= 0"))
        if not (isinstance(s.disturbance_duration, int) and s.disturbance_duration >= 1):
            problems.append(("scenario.disturbance_duration", "must be an integer >= 1"))
        if not (isinstance(s.disturbance_start, int) and s.disturbance_start >= 0):
            problems.append(("scenario.disturbance_start", "must be an integer >= 0"))
        for key in ("weight_direction", "disturbance_force"):
            if not _vec3(getattr(s, key)):
                problems.append((f"scenario.{key}", "must be a list of 3 numbers"))
        if _vec3(s.weight_direction) and np.linalg.norm(s.weight_direction) == 0:
            problems.append(("scenario.weight_direction", "must be non-zero"))
        if not (isinstance(d.nodes, int) and d.nodes >= 2):
            problems.append(("discretization.nodes", "must be an integer >= 2"))
        if not _positive(d.dt):
            problems.append(("discretization.dt", "must be > 0"))
        if not (_number(d.alpha) and d.alpha > -1):
            problems.append(("discretization.alpha", "must be > -1"))
        if not (isinstance(self.horizon, int) and self.horizon >= 1):
            problems.append(("horizon", "must be an integer >= 1"))
        if not (isinstance(self.tendons.count, int) and self.tendons.count >= 1):
            problems.append(("tendons.count", "must be an integer >= 1"))
        if not _positive(self.tendons.offset):
            problems.append(("tendons.offset", "must be > 0"))
        if not (_positive(self.reference.amplitude) and _positive(self.reference.rate)):
            problems.append(("reference", "amplitude and rate must be > 0"))
        if isinstance(d.nodes, int):
            try:
                self.rod_params()
            except ConfigError as exc:
                problems.extend(p for p in exc.problems if p[0] != "discretization.nodes")
        gains_ok = c.kind in CONTROLLERS and not any(k.startswith("controller.gains") for k, _ in problems)
        checks = [("shooting", lambda: ShootingConfig(**asdict(self.shooting)))]
        if gains_ok:
            checks.append(("controller.gains", self.gains))
        for key, build in checks:
            try:
                build()
            except (TdcrError, TypeError) as exc:
                problems.append((key, str(exc)))
        return problems

    def rod_params(self):
        r = self.rod
        try:
            return RodParams(nodes=self.discretization.nodes, **asdict(r))
        except InvalidArgumentError as exc:
            bad = getattr(exc, "problems", [("", str(exc))])
            raise ConfigError([(f"rod.{k}" if k != "nodes" else "discretization.nodes", m)
                               for k, m in bad]) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError([("rod", str(exc))]) from None

    def layout(self):
        return TendonLayout.symmetric(self.tendons.count, self.tendons.offset, self.tendons.phase)

    def gains(self):
        if self.controller.kind == "smc":
            return SmcGains(**self.controller.gains)
        if self.controller.kind == "backstepping":
            return BacksteppingGains(**self.controller.gains)
        return None

    def scenario_obj(self):
        s = self.scenario
        return Scenario(kind=s.kind, weight_mass=float(s.weight_mass), weight_direction=tuple(s.weight_direction),
                        disturbance_force=tuple(s.disturbance_force), disturbance_start=s.disturbance_start,
                        disturbance_duration=s.disturbance_duration)

    def run_kwargs(self):
        """Keyword arguments for ``run_closed_loop``."""
        return dict(controller=self.controller.kind, scenario=self.scenario_obj(), horizon=self.horizon,
                    params=self.rod_params(), layout=self.layout(), dt=self.discretization.dt,
                    alpha=self.discretization.alpha, gains=self.gains(), t_max=self.controller.t_max,
                    tendon=self.controller.tendon,
                    traj=ReferenceTrajectory(self.reference.amplitude, self.reference.rate),
                    shooting=ShootingConfig(**asdict(self.shooting)), store_shapes=self.store_shapes)


def _number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def _positive(v):
    return _number(v) and v > 0


def _int_or(v, default):
    return v if isinstance(v, int) else default


def _vec3(v):
    return isinstance(v, (list, tuple)) and len(v) == 3 and all(_number(x) for x in v)


def _section(cls, name, value, problems):
    if not isinstance(value, dict):
        problems.append((name, "must be an object"))
        return cls()
    known = {f.name for f in fields(cls)}
    for k in value:
        if k not in known:
            problems.append((f"{name}.{k}", "unknown key"))
    return cls(**{k: copy.deepcopy(v) for k, v in value.items() if k in known})


def resolve_profile(profile=None):
    """Node count for a named discretization profile (``fast`` or ``paper``)."""
    profile = profile or os.environ.get(PROFILE_ENV, "paper")
    if profile not in PROFILES:
        raise ConfigError([(PROFILE_ENV, f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}")])
    return PROFILES[profile]


def load_config(ref, profile=None, overrides=None):
    """Load a config from a JSON path or a preset name in the ``configs`` directory."""
    path = Path(ref)
    if not path.exists() and (PRESET_DIR / f"{ref}.json").exists():
        path = PRESET_DIR / f"{ref}.json"
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError([("config", f"no such file or preset: {ref}")]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([("config", f"invalid JSON at line {exc.lineno}: {exc.msg}")]) from None
    if overrides:
        data = {**data, **overrides}
    return RunConfig.from_dict(data, profile=profile)


def presets():
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))
