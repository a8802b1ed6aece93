"""Distributed tendon loads, the tendon input matrix, and the free-end condition.

Tendons are assumed to keep a fixed place in the cross-section and carry a
constant tension along their length. All quantities are body-frame unless
noted otherwise.
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidArgumentError, SingularTendonPathError
from .mathkernel import _hat

PATH_EPS = 1e-9


@njit(cache=True)
def _tendon_tangents(u, v, r, rd):
    nt = r.shape[0]
    out = np.empty((nt, 3))
    uh = _hat(u)
    for i in range(nt):
        out[i] = uh @ r[i] + rd[i] + v
    return out


@njit(cache=True)
def _tendon_loads(u, v, T, r, rd, rdd):
    """Return ``(A, B, G, H, a, b, p_is, ok)``; ``ok`` is False on a degenerate path."""
    A = np.zeros((3, 3))
    B = np.zeros((3, 3))
    G = np.zeros((3, 3))
    H = np.zeros((3, 3))
    a = np.zeros(3)
    b = np.zeros(3)
    uh = _hat(u)
    p_is = _tendon_tangents(u, v, r, rd)
    for i in range(r.shape[0]):
        ps = p_is[i]
        nrm = np.sqrt(ps[0] ** 2 + ps[1] ** 2 + ps[2] ** 2)
        if nrm <= PATH_EPS:
            return A, B, G, H, a, b, p_is, False
        if T[i] == 0.0:
            continue
        ph = _hat(ps)
        Ai = -T[i] * (ph @ ph) / nrm**3
        rh = _hat(r[i])
        Bi = rh @ Ai
        ai = Ai @ (uh @ ps + uh @ rd[i] + rdd[i])
        A += Ai
        B += Bi
        G -= Ai @ rh
        H -= Bi @ rh
        a += ai
        b += rh @ ai
    return A, B, G, H, a, b, p_is, True


@njit(cache=True)
def _alpha_columns(u, v, u_s, v_s, r, rd, rdd):
    """Columns ``alpha_i`` such that the body-frame tendon force is ``-alpha @ T``."""
    nt = r.shape[0]
    alpha = np.zeros((3, nt))
    uh = _hat(u)
    ush = _hat(u_s)
    p_is = _tendon_tangents(u, v, r, rd)
    for i in range(nt):
        ps = p_is[i]
        nrm = np.sqrt(ps[0] ** 2 + ps[1] ** 2 + ps[2] ** 2)
        if nrm <= PATH_EPS:
            return alpha, False
        p_iss = uh @ ps + ush @ r[i] + uh @ rd[i] + rdd[i] + v_s
        ph = _hat(ps)
        alpha[:, i] = (ph @ ph) @ p_iss / nrm**3
    return alpha, True


@njit(cache=True)
def _free_end_loads(R, u, v, T, r, rd, tip_force):
    """Global tip force/moment required by tendon terminations plus a centroidal tip force."""
    n_L = tip_force.copy()
    m_L = np.zeros(3)
    p_is = _tendon_tangents(u, v, r, rd)
    for i in range(r.shape[0]):
        ps = p_is[i]
        nrm = np.sqrt(ps[0] ** 2 + ps[1] ** 2 + ps[2] ** 2)
        if nrm <= PATH_EPS:
            return n_L, m_L, False
        if T[i] == 0.0:
            continue
        F = -T[i] * (R @ ps) / nrm
        n_L += F
        m_L += np.cross(R @ r[i], F)
    return n_L, m_L, True


@dataclass(frozen=True)
class TendonLoadSet:
    A: np.ndarray
    B: np.ndarray
    G: np.ndarray
    H: np.ndarray
    a: np.ndarray
    b: np.ndarray
    p_is_body: np.ndarray

    def force(self, v_s, u_s):
        """Body-frame distributed tendon force for given strain gradients."""
        return self.a + self.A @ v_s + self.G @ u_s

    def moment(self, v_s, u_s):
        return self.b + self.B @ v_s + self.H @ u_s


def _check_tensions(tensions, layout):
    T = np.ascontiguousarray(tensions, dtype=float).reshape(-1)
    if T.shape[0] != layout.count:
        raise InvalidArgumentError(f"expected {layout.count} tensions, got {T.shape[0]}")
    if np.any(T < 0) or not np.all(np.isfinite(T)):
        raise InvalidArgumentError("tensions must be finite and non-negative")
    return T


def assemble(state, tensions, layout):
    T = _check_tensions(tensions, layout)
    A, B, G, H, a, b, p_is, ok = _tendon_loads(
        np.asarray(state.u, float), np.asarray(state.v, float), T,
        layout.offsets, layout.offset_rates, layout.offset_accels)
    if not ok:
        raise SingularTendonPathError("tendon path tangent vanishes")
    return TendonLoadSet(A, B, G, H, a, b, p_is)


def alpha_matrix(state, layout, u_s, v_s):
    """3 x n tendon input matrix at a node, given the strain gradients there."""
    alpha, ok = _alpha_columns(
        np.asarray(state.u, float), np.asarray(state.v, float),
        np.asarray(u_s, float).reshape(3), np.asarray(v_s, float).reshape(3),
        layout.offsets, layout.offset_rates, layout.offset_accels)
    if not ok:
        raise SingularTendonPathError("tendon path tangent vanishes")
    return alpha


def free_end_bc(state_at_L, tensions, layout, tip_force=None):
    """Force and moment (global) the rod must carry at its free end."""
    T = _check_tensions(tensions, layout)
    F = np.zeros(3) if tip_force is None else np.asarray(tip_force, float).reshape(3).copy()
    n_L, m_L, ok = _free_end_loads(
        np.ascontiguousarray(state_at_L.R, dtype=float), np.asarray(state_at_L.u, float),
        np.asarray(state_at_L.v, float), T, layout.offsets, layout.offset_rates, F)
    if not ok:
        raise SingularTendonPathError("tendon path tangent vanishes at the free end")
    return n_L, m_L
