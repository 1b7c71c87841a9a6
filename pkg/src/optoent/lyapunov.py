"""Steady-state covariance from ``C Z + Z C^T = -D``.

The direct solver vectorises the equation with the Kronecker identity and
solves the resulting ``n**2 x n**2`` system with partial pivoting. The
transient matrix ODE ``dZ/dt = C Z + Z C^T + D`` is integrated independently
as a cross-check.
"""
from __future__ import annotations

import warnings

import numpy as np

from . import kernels
from .dynamics import stability
from .errors import (IndefiniteCovarianceWarning, SingularSystem, StepSizeUnderflow,
                     UnstableDrift)

PIVOT_RTOL = 1e-13
INDEFINITE_TOL = -1e-12


def solve_lyapunov(c, d, *, allow_unstable: bool = False) -> np.ndarray:
    """Symmetric solution ``Z`` of ``C Z + Z C^T = -D``.

    Parameters
    ----------
    c, d : (n, n) array_like
        Drift and diffusion matrices.
    allow_unstable : bool
        Skip the Hurwitz precondition and return the formal solution. The
        result then need not be positive semidefinite or physical.

    Raises
    ------
    UnstableDrift
        ``c`` is not Hurwitz and ``allow_unstable`` is false.
    SingularSystem
        The vectorised system is numerically singular (some pair of
        eigenvalues of ``c`` sums to ~0).
    """
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    if not allow_unstable:
        report = stability(c)
        if not report.stable:
            raise UnstableDrift(
                f"drift matrix not Hurwitz (spectral abscissa {report.spectral_abscissa:.3e})")
    z, ratio = kernels.kron_lyapunov_solve(c, d)
    if ratio < PIVOT_RTOL:
        raise SingularSystem(f"Kronecker system singular (pivot ratio {ratio:.2e})")
    z = 0.5 * (z + z.T)
    if not allow_unstable:
        lo = float(np.linalg.eigvalsh(z).min())
        if lo < INDEFINITE_TOL * max(1.0, float(np.abs(z).max())):
            warnings.warn(f"steady-state covariance is indefinite (min eigenvalue {lo:.3e})",
                          IndefiniteCovarianceWarning, stacklevel=2)
    return z


def lyapunov_residual(c, d, z) -> float:
    """``||C Z + Z C^T + D||_F``."""
    c = np.asarray(c)
    return float(np.linalg.norm(c @ z + z @ c.T + d))


def integrate_covariance_ode(c, d, z0, t: float, *, rtol: float = 1e-10,
                             atol: float = 1e-13, max_steps: int = 2_000_000) -> np.ndarray:
    """Covariance at time ``t`` from ``dZ/dt = C Z + Z C^T + D``, ``Z(0) = z0``.

    Adaptive Dormand-Prince 8(5,3) with per-step relative tolerance ``rtol``;
    the state is re-symmetrised after every accepted step.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    z0 = np.asarray(z0, dtype=float)
    z, _, status = kernels.integrate_lyapunov_ode(np.asarray(c, dtype=float),
                                                  np.asarray(d, dtype=float), z0,
                                                  float(t), rtol, atol, max_steps)
    if status == 1:
        raise StepSizeUnderflow("step size fell below machine resolution")
    if status == 2:
        raise StepSizeUnderflow(f"step budget of {max_steps} exhausted before t={t}")
    return z
