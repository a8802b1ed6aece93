"""Small fixed-size linear algebra: hat/vee, SO(3) projection, 6x6 solves.

The underscore-prefixed functions are numba kernels shared with the spatial
integrator; the public wrappers add argument checking and raise the package
exceptions.
"""
import numpy as np
from numba import njit

from .errors import DegenerateRotationError, InvalidArgumentError, SingularSystemError

SKEW_TOL = 1e-9
COND_LIMIT = 1e12


@njit(cache=True)
def _hat(a):
    out = np.zeros((3, 3))
    out[0, 1] = -a[2]
    out[0, 2] = a[1]
    out[1, 0] = a[2]
    out[1, 2] = -a[0]
    out[2, 0] = -a[1]
    out[2, 1] = a[0]
    return out


@njit(cache=True)
def _polar(R):
    U, _, Vt = np.linalg.svd(R)
    return U @ Vt


@njit(cache=True)
def _lu_factor(M):
    n = M.shape[0]
    LU = M.copy()
    piv = np.arange(n)
    for k in range(n):
        p = k
        best = abs(LU[k, k])
        for i in range(k + 1, n):
            if abs(LU[i, k]) > best:
                best = abs(LU[i, k])
                p = i
        if p != k:
            for j in range(n):
                tmp = LU[k, j]
                LU[k, j] = LU[p, j]
                LU[p, j] = tmp
            tmp_i = piv[k]
            piv[k] = piv[p]
            piv[p] = tmp_i
        if LU[k, k] == 0.0:
            continue
        for i in range(k + 1, n):
            LU[i, k] /= LU[k, k]
            f = LU[i, k]
            for j in range(k + 1, n):
                LU[i, j] -= f * LU[k, j]
    return LU, piv


@njit(cache=True)
def _lu_apply(LU, piv, b):
    n = LU.shape[0]
    x = np.empty(n)
    for i in range(n):
        x[i] = b[piv[i]]
    for i in range(n):
        for j in range(i):
            x[i] -= LU[i, j] * x[j]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            x[i] -= LU[i, j] * x[j]
        x[i] /= LU[i, i]
    return x


@njit(cache=True)
def _solve6(M, rhs):
    """Solve ``M x = rhs``; returns ``(x, cond1)`` with the 1-norm condition number.

    ``cond1`` is ``inf`` when a zero pivot is met (``x`` is then garbage).
    """
    n = M.shape[0]
    LU, piv = _lu_factor(M)
    for k in range(n):
        if LU[k, k] == 0.0 or not np.isfinite(LU[k, k]):
            return np.full(n, np.nan), np.inf
    x = _lu_apply(LU, piv, rhs)
    norm_m = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(M[i, j])
        norm_m = max(norm_m, col)
    norm_inv = 0.0
    e = np.zeros(n)
    for j in range(n):
        e[:] = 0.0
        e[j] = 1.0
        c = _lu_apply(LU, piv, e)
        col = 0.0
        for i in range(n):
            col += abs(c[i])
        norm_inv = max(norm_inv, col)
    return x, norm_m * norm_inv


def hat(a):
    """Skew-symmetric matrix with ``hat(a) @ b == np.cross(a, b)``."""
    return _hat(np.asarray(a, dtype=float).reshape(3))


def vee(M, tol=SKEW_TOL):
    M = np.asarray(M, dtype=float).reshape(3, 3)
    asym = np.abs(M + M.T).max()
    if asym > tol:
        raise InvalidArgumentError(f"matrix is not skew-symmetric (|M + M^T|max = {asym:.3e})")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def reorthonormalize(R):
    """Nearest rotation matrix to ``R`` in the Frobenius sense (polar factor)."""
    R = np.asarray(R, dtype=float).reshape(3, 3)
    if not np.all(np.isfinite(R)):
        raise DegenerateRotationError("rotation has non-finite entries")
    det = np.linalg.det(R)
    if det <= 0.0:
        raise DegenerateRotationError(f"det(R) = {det:.3e} <= 0")
    return _polar(np.ascontiguousarray(R))


def solve6(M, rhs, cond_limit=COND_LIMIT):
    M = np.ascontiguousarray(M, dtype=float).reshape(6, 6)
    rhs = np.ascontiguousarray(rhs, dtype=float).reshape(6)
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(rhs))):
        raise InvalidArgumentError("non-finite entries in 6x6 system")
    x, cond = _solve6(M, rhs)
    if not cond <= cond_limit:
        raise SingularSystemError(f"6x6 system is singular (cond ~ {cond:.3e})", condition=cond)
    return x
