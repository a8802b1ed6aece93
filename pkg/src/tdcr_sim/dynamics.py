"""Semi-discretized rod dynamics.

Time derivatives are replaced by the BDF-alpha implicit rate
``y_t = c0 * y + y_h`` with ``y_h`` built from two lagged values and one lagged
rate. What remains is an ODE in arc length, integrated node to node with
forward Euler from the clamped base. Internal force and moment ``(n, m)`` are
the propagated variables; strains ``(v, u)`` are recovered from them through
the damped constitutive law at each node.
"""
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DivergenceError, InvalidArgumentError, SingularSystemError, SingularTendonPathError
from .mathkernel import COND_LIMIT, _hat, _polar, _solve6
from .rod import NodeState, build_stiffness
from .tendons import _tendon_loads

# order of the per-node tracked fields in history arrays
HIST_FIELDS = ("v", "u", "q", "w", "v_s", "u_s")

# rows of the packed per-node output array
P, N_, M_, Q, W, V, U, VS, US, NS, MS = range(11)
N_OUT = 11

_STATUS_OK, _STATUS_SINGULAR, _STATUS_NONFINITE, _STATUS_TENDON = 0, 1, 2, 3


@dataclass(frozen=True)
class BdfCoeffs:
    c0: float
    c1: float
    c2: float
    d1: float
    alpha: float
    dt: float


def bdf_coeffs(dt, alpha=-0.2):
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be > 0, got {dt}")
    if not alpha > -1:
        raise InvalidArgumentError(f"alpha must be > -1, got {alpha}")
    return BdfCoeffs(
        c0=(1.5 + alpha) / (dt * (1 + alpha)),
        c1=-2.0 / dt,
        c2=(0.5 + alpha) / (dt * (1 + alpha)),
        d1=alpha / (1 + alpha),
        alpha=alpha,
        dt=dt,
    )


def implicit_rate(y, y_hist, coeffs):
    return coeffs.c0 * np.asarray(y) + np.asarray(y_hist)


def history_term(prev1, prev2, rate1, coeffs):
    """``y_h = c1 y^(i-1) + c2 y^(i-2) + d1 y_t^(i-1)``."""
    return coeffs.c1 * prev1 + coeffs.c2 * prev2 + coeffs.d1 * rate1


def integrate_linear_decay(lam, y0, t_end, dt, alpha=-0.2, exact_start=True):
    """Integrate ``y' = -lam * y`` with the same BDF-alpha update the rod uses.

    With ``exact_start`` the lagged value and rate are taken from the exact
    solution; otherwise the static cold start (``y^(-1) = y0``, zero rate) is
    used. Returns ``(t, y)`` arrays.
    """
    k = bdf_coeffs(dt, alpha)
    steps = int(round(t_end / dt))
    if steps < 1 or abs(steps * dt - t_end) > 1e-9 * t_end:
        raise InvalidArgumentError("t_end must be a positive multiple of dt")
    y = np.empty(steps + 1)
    y[0] = y0
    prev2 = y0 * np.exp(lam * dt) if exact_start else y0
    rate1 = -lam * y0 if exact_start else 0.0
    for i in range(1, steps + 1):
        y_h = history_term(y[i - 1], prev2, rate1, k)
        y[i] = -y_h / (k.c0 + lam)
        rate1 = implicit_rate(y[i], y_h, k)
        prev2 = y[i - 1]
    return dt * np.arange(steps + 1), y


@dataclass
class HistoryBuffer:
    """Lagged values ``prev1 = y^(i-1)``, ``prev2 = y^(i-2)`` and rate ``rate1 = y_t^(i-1)``.

    Each array has shape ``(6, N, 3)`` following ``HIST_FIELDS``.
    """

    prev1: np.ndarray
    prev2: np.ndarray
    rate1: np.ndarray

    @classmethod
    def zeros(cls, nodes):
        z = np.zeros((len(HIST_FIELDS), nodes, 3))
        return cls(z, z.copy(), z.copy())

    @classmethod
    def cold_start(cls, step):
        """Static start: both lagged values equal ``step``, lagged rates zero."""
        y = _tracked(step)
        return cls(y.copy(), y.copy(), np.zeros_like(y))

    @property
    def nodes(self):
        return self.prev1.shape[1]

    def history_terms(self, coeffs):
        return history_term(self.prev1, self.prev2, self.rate1, coeffs)


@dataclass
class RodTrajectoryStep:
    """All node states of one converged (or trial) spatial sweep."""

    p: np.ndarray
    R: np.ndarray
    n: np.ndarray
    m: np.ndarray
    q: np.ndarray
    w: np.ndarray
    v: np.ndarray
    u: np.ndarray
    v_s: np.ndarray
    u_s: np.ndarray
    n_s: np.ndarray
    m_s: np.ndarray
    t: float = 0.0
    hist_terms: np.ndarray = field(default=None, repr=False)
    c0: float = 0.0

    @property
    def nodes(self):
        return self.p.shape[0]

    def node(self, j):
        return NodeState(self.p[j], self.R[j], self.n[j], self.m[j], self.q[j], self.w[j],
                         self.v[j], self.u[j])

    @property
    def tip(self):
        return self.p[-1]

    def rates(self):
        """Implicit time rates ``(6, N, 3)`` of the tracked fields for this step."""
        return self.c0 * _tracked(self) + self.hist_terms


def _tracked(step):
    return np.stack([step.v, step.u, step.q, step.w, step.v_s, step.u_s])


def advance_history(step, buffer, coeffs):
    y = _tracked(step)
    y_t = coeffs.c0 * y + buffer.history_terms(coeffs)
    return HistoryBuffer(prev1=y, prev2=buffer.prev1.copy(), rate1=y_t)


# ---------------------------------------------------------------- kernels


@njit(cache=True, nogil=True)
def _node_rhs(R, n, m, q, w, hist, T, r, rd, rdd, mats, vecs, Kv_inv, Ku_inv, rho, rho_a, c0):
    """Spatial derivatives at one node.

    ``mats`` stacks (K_se, K_bt, B_se, B_bt, C, J); ``vecs`` stacks
    (g, v*, u*, l_e); ``hist`` holds the history terms (v, u, q, w, v_s, u_s).
    Returns ``(v, u, v_s, u_s, p_s, R_s, n_s, m_s, q_s, w_s, status, cond)``.
    """
    K_se, K_bt, B_se, B_bt, C, J = mats[0], mats[1], mats[2], mats[3], mats[4], mats[5]
    g, v_star, u_star, l_e = vecs[0], vecs[1], vecs[2], vecs[3]
    v_h, u_h, q_h, w_h, vs_h, us_h = hist[0], hist[1], hist[2], hist[3], hist[4], hist[5]

    Rt = R.T
    n_b = Rt @ n
    m_b = Rt @ m
    v = Kv_inv @ (n_b + K_se @ v_star - B_se @ v_h)
    u = Ku_inv @ (m_b + K_bt @ u_star - B_bt @ u_h)
    v_t = c0 * v + v_h
    u_t = c0 * u + u_h
    q_t = c0 * q + q_h
    w_t = c0 * w + w_h

    A, B, G, H, a, b, _, ok = _tendon_loads(u, v, T, r, rd, rdd)
    z3 = np.zeros(3)
    if not ok:
        return v, u, z3, z3, z3, np.zeros((3, 3)), z3, z3, z3, z3, 3, np.inf

    uh = _hat(u)
    wh = _hat(w)
    qabs = q * np.abs(q)
    Jw = J @ w
    inertia_b = rho * (wh @ Jw + J @ w_t)
    pi_n = rho_a * (wh @ q + q_t) - rho_a * (Rt @ g) + C @ qabs - a
    pi_m = inertia_b - _hat(v) @ n_b - Rt @ l_e - b
    sig_n = uh @ n_b + B_se @ vs_h
    sig_m = uh @ m_b + B_bt @ us_h

    theta = np.zeros((6, 6))
    theta[:3, :3] = K_se + c0 * B_se + A
    theta[:3, 3:] = G
    theta[3:, :3] = B
    theta[3:, 3:] = K_bt + c0 * B_bt + H
    rhs = np.empty(6)
    rhs[:3] = pi_n - sig_n
    rhs[3:] = pi_m - sig_m
    x, cond = _solve6(theta, rhs)
    if not cond <= COND_LIMIT:
        return v, u, z3, z3, z3, np.zeros((3, 3)), z3, z3, z3, z3, 1, cond
    v_s = x[:3]
    u_s = x[3:]

    p_s = R @ v
    R_s = R @ uh
    q_s = v_t - uh @ q + wh @ v
    w_s = u_t - uh @ w
    n_s = rho_a * (R @ (wh @ q + q_t)) - R @ (a + A @ v_s + G @ u_s) - rho_a * g + R @ (C @ qabs)
    m_s = R @ inertia_b - np.cross(p_s, n) - R @ (b + B @ v_s + H @ u_s) - l_e
    return v, u, v_s, u_s, p_s, R_s, n_s, m_s, q_s, w_s, 0, cond


@njit(cache=True, nogil=True)
def _propagate(n0, m0, hist, T, r, rd, rdd, mats, vecs, Kv_inv, Ku_inv, rho, rho_a, c0, ds,
               reortho, out, R_out):
    """Forward-Euler sweep from the clamped base; returns ``(status, node)``."""
    N = out.shape[1]
    p = np.zeros(3)
    R = np.eye(3)
    n = n0.copy()
    m = m0.copy()
    q = np.zeros(3)
    w = np.zeros(3)
    for j in range(N):
        v, u, v_s, u_s, p_s, R_s, n_s, m_s, q_s, w_s, status, cond = _node_rhs(
            R, n, m, q, w, np.ascontiguousarray(hist[:, j, :]), T, r, rd, rdd, mats, vecs, Kv_inv, Ku_inv,
            rho, rho_a, c0)
        out[0, j] = p
        out[1, j] = n
        out[2, j] = m
        out[3, j] = q
        out[4, j] = w
        out[5, j] = v
        out[6, j] = u
        out[7, j] = v_s
        out[8, j] = u_s
        out[9, j] = n_s
        out[10, j] = m_s
        R_out[j] = R
        if status != 0:
            return status, j
        if j == N - 1:
            break
        p = p + p_s * ds
        R = R + R_s * ds
        n = n + n_s * ds
        m = m + m_s * ds
        q = q + q_s * ds
        w = w + w_s * ds
        if reortho:
            R = _polar(R)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(R)) and np.all(np.isfinite(n))
                and np.all(np.isfinite(m)) and np.all(np.isfinite(q)) and np.all(np.isfinite(w))):
            return 2, j + 1
    return 0, N - 1


# ---------------------------------------------------------------- model


class RodModel:
    """Packed constants for the spatial kernels of one rod and tendon layout."""

    def __init__(self, params, layout, reorthonormalize=True):
        self.params = params
        self.layout = layout
        self.stiff = build_stiffness(params)
        self.reorthonormalize = reorthonormalize
        s = self.stiff
        self.mats = np.ascontiguousarray(np.stack([s.K_se, s.K_bt, params.B_se, params.B_bt, params.C, s.J]))
        self.vecs = np.ascontiguousarray(np.stack([params.gravity, params.v_star, params.u_star, np.zeros(3)]))
        self.rho = params.density
        self.rho_a = params.density * s.area
        self.ds = params.ds
        self.nodes = params.nodes
        self._inv_cache = {}

    def inverses(self, c0):
        if c0 not in self._inv_cache:
            p, s = self.params, self.stiff
            self._inv_cache[c0] = (np.linalg.inv(s.K_se + c0 * p.B_se), np.linalg.inv(s.K_bt + c0 * p.B_bt))
        return self._inv_cache[c0]

    def tensions(self, tensions):
        T = np.ascontiguousarray(tensions, dtype=float).reshape(-1)
        if T.shape[0] != self.layout.count:
            raise InvalidArgumentError(f"expected {self.layout.count} tensions, got {T.shape[0]}")
        if np.any(T < 0) or not np.all(np.isfinite(T)):
            raise InvalidArgumentError("tensions must be finite and non-negative")
        return T


def _c0(coeffs):
    return 0.0 if coeffs is None else float(coeffs.c0)


def spatial_rhs(node, hist_at_node, tensions, model, coeffs=None):
    """Arc-length derivatives at a single node.

    ``hist_at_node`` is a ``(6, 3)`` array of history terms ordered as
    ``HIST_FIELDS`` (``None`` for zeros). ``coeffs=None`` gives statics.
    Returns a dict with the recovered strains and every derivative.
    """
    T = model.tensions(tensions)
    c0 = _c0(coeffs)
    hist = np.zeros((6, 3)) if hist_at_node is None else np.ascontiguousarray(hist_at_node, float).reshape(6, 3)
    Kv_inv, Ku_inv = model.inverses(c0)
    lay = model.layout
    res = _node_rhs(np.ascontiguousarray(node.R, float), np.asarray(node.n, float), np.asarray(node.m, float),
                    np.asarray(node.q, float), np.asarray(node.w, float), hist, T, lay.offsets,
                    lay.offset_rates, lay.offset_accels, model.mats, model.vecs, Kv_inv, Ku_inv,
                    model.rho, model.rho_a, c0)
    status, cond = res[10], res[11]
    if status == _STATUS_TENDON:
        raise SingularTendonPathError("tendon path tangent vanishes")
    if status == _STATUS_SINGULAR:
        raise SingularSystemError(f"strain-gradient system singular (cond ~ {cond:.3e})", condition=cond)
    keys = ("v", "u", "v_s", "u_s", "p_s", "R_s", "n_s", "m_s", "q_s", "w_s")
    return dict(zip(keys, res[:10]))


def propagate(model, n0, m0, tensions, coeffs=None, hist_terms=None, t=0.0):
    """Integrate base-to-tip from guessed base loads ``(n0, m0)``.

    ``hist_terms`` is the ``(6, N, 3)`` array from
    :meth:`HistoryBuffer.history_terms`; ``None`` means zero history.
    """
    T = model.tensions(tensions)
    N = model.nodes
    c0 = _c0(coeffs)
    if hist_terms is None:
        hist_terms = np.zeros((6, N, 3))
    hist_terms = np.ascontiguousarray(hist_terms, dtype=float)
    Kv_inv, Ku_inv = model.inverses(c0)
    out = np.empty((N_OUT, N, 3))
    R_out = np.empty((N, 3, 3))
    lay = model.layout
    status, j = _propagate(np.asarray(n0, float).reshape(3), np.asarray(m0, float).reshape(3), hist_terms, T,
                           lay.offsets, lay.offset_rates, lay.offset_accels, model.mats, model.vecs,
                           Kv_inv, Ku_inv, model.rho, model.rho_a, c0, model.ds,
                           model.reorthonormalize, out, R_out)
    if status == _STATUS_SINGULAR:
        raise SingularSystemError(f"strain-gradient system singular at node {j}", node=j)
    if status == _STATUS_NONFINITE:
        raise DivergenceError(f"non-finite state at node {j}", node=j)
    if status == _STATUS_TENDON:
        raise SingularTendonPathError(f"tendon path tangent vanishes at node {j}")
    return RodTrajectoryStep(p=out[0], R=R_out, n=out[1], m=out[2], q=out[3], w=out[4], v=out[5], u=out[6],
                             v_s=out[7], u_s=out[8], n_s=out[9], m_s=out[10], t=t,
                             hist_terms=hist_terms, c0=c0)
