"""Pure-Python/NumPy implementations of the numerical kernels.

Signatures match :mod:`optoent._ckernels` exactly; :mod:`optoent.kernels`
picks one at import time.
"""
import math
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from ._dop853 import A_DOP, B_DOP, E3_DOP, E5_DOP, N_STAGES

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0


def kron_lyapunov_solve(c, d):
    """Solve ``C Z + Z C^T = -D`` through the Kronecker-vectorised system.

    Returns ``(Z, pivot_ratio)`` where ``pivot_ratio`` is the smallest over the
    largest absolute pivot of the LU factorisation (0 for an exactly singular
    system).
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    eye = np.eye(n)
    # row-major ravel: (C Z).ravel() = (C kron I) z, (Z C^T).ravel() = (I kron C) z
    m = np.kron(c, eye) + np.kron(eye, c)
    with warnings.catch_warnings():
        # singularity is reported through the pivot ratio instead
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=False)
    diag = np.abs(np.diag(lu))
    big = diag.max()
    ratio = 0.0 if big == 0 else float(diag.min() / big)
    if ratio == 0.0:
        return np.full((n, n), np.nan), 0.0
    z = lu_solve((lu, piv), -np.asarray(d, dtype=float).ravel(), check_finite=False)
    return z.reshape(n, n), ratio


def theta_minus_parts(r):
    """Return ``(chi, det_r, radicand)`` of a 4x4 reduced covariance matrix."""
    r = np.asarray(r, dtype=float)
    det1 = r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]
    det2 = r[2, 2] * r[3, 3] - r[2, 3] * r[3, 2]
    detc = r[0, 2] * r[1, 3] - r[0, 3] * r[1, 2]
    chi = det1 + det2 - 2.0 * detc
    det_r = float(np.linalg.det(r))
    return chi, det_r, chi * chi - 4.0 * det_r


def _rhs(c, d, z):
    m = c @ z
    return m + m.T + d


def integrate_lyapunov_ode(c, d, z0, t_end, rtol, atol, max_steps):
    """Adaptive DOP853 integration of ``dZ/dt = C Z + Z C^T + D``.

    Returns ``(Z, n_steps, status)``; status 0 ok, 1 step-size underflow,
    2 step budget exhausted.
    """
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    z = np.array(z0, dtype=float)
    n = z.shape[0]
    if t_end <= 0:
        return z, 0, 0
    norm_c = float(np.abs(c).sum(axis=1).max())
    h = t_end if norm_c == 0 else min(t_end, 0.05 / norm_c)
    k = np.empty((N_STAGES + 1, n, n))
    t = 0.0
    f = _rhs(c, d, z)
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            return z, steps, 2
        if h < 10.0 * np.finfo(float).eps * max(t, 1.0):
            return z, steps, 1
        h = min(h, t_end - t)
        k[0] = f
        for s in range(1, N_STAGES):
            dz = np.tensordot(A_DOP[s, :s], k[:s], axes=1)
            k[s] = _rhs(c, d, z + h * dz)
        z_new = z + h * np.tensordot(B_DOP, k[:N_STAGES], axes=1)
        f_new = _rhs(c, d, z_new)
        k[N_STAGES] = f_new
        scale = atol + np.maximum(np.abs(z), np.abs(z_new)) * rtol
        err5 = np.tensordot(E5_DOP, k, axes=1) / scale
        err3 = np.tensordot(E3_DOP, k, axes=1) / scale
        e5 = float(np.sum(err5 * err5))
        e3 = float(np.sum(err3 * err3))
        denom = e5 + 0.01 * e3
        err = 0.0 if denom == 0 else h * e5 / math.sqrt(denom * z.size)
        if err < 1.0:
            factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** ERROR_EXPONENT)
            t += h
            z = 0.5 * (z_new + z_new.T)
            f = _rhs(c, d, z)
            steps += 1
            h *= factor
        else:
            h *= max(MIN_FACTOR, SAFETY * err ** ERROR_EXPONENT)
    return z, steps, 0
