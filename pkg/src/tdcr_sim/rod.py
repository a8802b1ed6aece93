"""Rod parameters, cross-section state, stiffness matrices and constitutive law."""
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError

DATASHEET_DENSITY = 6366.0
ADJUSTED_DENSITY = 17189.0


def _vec(x):
    return np.asarray(x, dtype=float).reshape(3).copy()


def _mat(x):
    x = np.asarray(x, dtype=float)
    if x.shape == (3,):
        return np.diag(x)
    return x.reshape(3, 3).copy()


@dataclass
class RodParams:
    length: float = 0.5
    radius: float = 1e-3
    density: float = ADJUSTED_DENSITY
    youngs_modulus: float = 190e9
    poisson: float = 0.3
    gravity: np.ndarray = field(default_factory=lambda: np.array([-9.81, 0.0, 0.0]))
    B_se: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    B_bt: np.ndarray = field(default_factory=lambda: 0.008 * np.eye(3))
    C: np.ndarray = field(default_factory=lambda: 0.1 * np.eye(3))
    nodes: int = 200
    v_star: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    u_star: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.gravity = _vec(self.gravity)
        self.v_star = _vec(self.v_star)
        self.u_star = _vec(self.u_star)
        self.B_se = _mat(self.B_se)
        self.B_bt = _mat(self.B_bt)
        self.C = _mat(self.C)
        problems = self.problems()
        if problems:
            exc = InvalidArgumentError("; ".join(f"{k}: {m}" for k, m in problems))
            exc.problems = problems
            raise exc

    def problems(self):
        """List of ``(field, message)`` for every violated invariant."""
        out = []
        for name in ("length", "radius", "density", "youngs_modulus"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                out.append((name, f"must be > 0, got {val}"))
        if not 0.0 <= self.poisson < 0.5:
            out.append(("poisson", f"must lie in [0, 0.5), got {self.poisson}"))
        if int(self.nodes) != self.nodes or self.nodes < 3:
            out.append(("nodes", f"must be an integer >= 3, got {self.nodes}"))
        for name in ("B_se", "B_bt", "C"):
            M = getattr(self, name)
            if not np.all(np.isfinite(M)):
                out.append((name, "non-finite entries"))
            elif np.any(M != np.diag(np.diag(M))) or np.any(np.diag(M) < 0):
                out.append((name, "must be diagonal with non-negative entries"))
        for name in ("gravity", "v_star", "u_star"):
            if not np.all(np.isfinite(getattr(self, name))):
                out.append((name, "non-finite entries"))
        return out

    @property
    def ds(self):
        return self.length / (self.nodes - 1)

    @property
    def area(self):
        return np.pi * self.radius**2

    @property
    def rho_a(self):
        return self.density * self.area

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class TendonLayout:
    """Tendon offsets in the cross-section frame, plus their arc-length rates."""

    offsets: np.ndarray
    offset_rates: np.ndarray = None
    offset_accels: np.ndarray = None

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1, 3).copy()
        n = len(self.offsets)
        if self.offset_rates is None:
            self.offset_rates = np.zeros((n, 3))
        if self.offset_accels is None:
            self.offset_accels = np.zeros((n, 3))
        self.offset_rates = np.asarray(self.offset_rates, dtype=float).reshape(n, 3).copy()
        self.offset_accels = np.asarray(self.offset_accels, dtype=float).reshape(n, 3).copy()
        if n == 0:
            raise InvalidArgumentError("at least one tendon is required")
        if np.any(np.linalg.norm(self.offsets, axis=1) <= 0):
            raise InvalidArgumentError("every tendon needs a non-zero offset")
        if np.any(self.offsets[:, 2] != 0):
            raise InvalidArgumentError("tendon offsets must lie in the cross-section plane")

    @property
    def count(self):
        return len(self.offsets)

    @classmethod
    def symmetric(cls, count=4, offset=0.02, phase=0.0):
        ang = phase + 2 * np.pi * np.arange(count) / count
        r = np.column_stack([offset * np.cos(ang), offset * np.sin(ang), np.zeros(count)])
        r[np.abs(r) < 1e-15] = 0.0
        return cls(r)


@dataclass
class NodeState:
    """State of one cross-section. ``n``, ``m``, ``p`` global; ``q``, ``w``, ``v``, ``u`` body."""

    p: np.ndarray
    R: np.ndarray
    n: np.ndarray
    m: np.ndarray
    q: np.ndarray
    w: np.ndarray
    v: np.ndarray
    u: np.ndarray

    @classmethod
    def straight(cls, s=0.0):
        z = np.zeros(3)
        return cls(np.array([0.0, 0.0, s]), np.eye(3), z.copy(), z.copy(), z.copy(), z.copy(),
                   np.array([0.0, 0.0, 1.0]), z.copy())


@dataclass(frozen=True)
class StiffnessSet:
    K_se: np.ndarray
    K_bt: np.ndarray
    area: float
    second_moment: float
    J: np.ndarray
    shear_modulus: float


def build_stiffness(params):
    A = np.pi * params.radius**2
    I = np.pi * params.radius**4 / 4
    E = params.youngs_modulus
    G = E / (2 * (1 + params.poisson))
    return StiffnessSet(
        K_se=np.diag([G * A, G * A, E * A]),
        K_bt=np.diag([E * I, E * I, 2 * G * I]),
        area=A,
        second_moment=I,
        J=np.diag([I, I, 2 * I]),
        shear_modulus=G,
    )


def constitutive(v, u, v_t, u_t, stiff, params):
    """Body-frame internal force and moment from strains and strain rates."""
    n_body = stiff.K_se @ (np.asarray(v) - params.v_star) + params.B_se @ np.asarray(v_t)
    m_body = stiff.K_bt @ (np.asarray(u) - params.u_star) + params.B_bt @ np.asarray(u_t)
    return n_body, m_body


def default_paper_rod(density=ADJUSTED_DENSITY, nodes=200):
    """Stainless-steel backbone with four tendons at 2 cm, 90 degrees apart."""
    params = RodParams(density=density, nodes=nodes)
    return params, TendonLayout.symmetric(4, 0.02)
