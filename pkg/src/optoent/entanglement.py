"""Two-mode entanglement of bipartitions of the 8x8 covariance matrix.

Quadratures follow the vacuum-variance-1/2 convention, so a two-mode
Gaussian state is entangled iff the smallest symplectic eigenvalue of its
partial transpose, ``theta_minus``, is below 1/2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NegativeRadicand

RADICAND_TOL = 1e-12
BOUNDARY_TOL = 1e-10
PHYSICALITY_TOL = 1e-10


class Bipartition(enum.Enum):
    """Mode pairs; values are the 0-based row/column indices into ``Z``."""

    intracavity_1 = (0, 1, 2, 3)
    intracavity_2 = (4, 5, 6, 7)
    mech_mech = (0, 1, 4, 5)
    opt_opt = (2, 3, 6, 7)

    @property
    def indices(self) -> tuple[int, ...]:
        return self.value

    @classmethod
    def parse(cls, name) -> "Bipartition":
        if isinstance(name, cls):
            return name
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown bipartition {name!r}; "
                             f"expected one of {[b.name for b in cls]}") from None


ALL_BIPARTITIONS = tuple(Bipartition)


@dataclass(frozen=True)
class ReducedCM:
    z1: np.ndarray
    z2: np.ndarray
    zc: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.z1, self.zc], [self.zc.T, self.z2]])

    @classmethod
    def from_matrix(cls, r) -> "ReducedCM":
        r = np.asarray(r, dtype=float)
        return cls(r[:2, :2].copy(), r[2:, 2:].copy(), r[:2, 2:].copy())


@dataclass(frozen=True)
class EntanglementResult:
    theta_minus: float
    log_negativity: float
    simon_entangled: bool
    boundary: bool = False


def extract_bipartition(z, b: Bipartition) -> ReducedCM:
    idx = np.array(Bipartition.parse(b).indices)
    return ReducedCM.from_matrix(np.asarray(z)[np.ix_(idx, idx)])


def _matrix(r) -> np.ndarray:
    return r.matrix if isinstance(r, ReducedCM) else np.asarray(r, dtype=float)


def chi_and_det(r) -> tuple[float, float]:
    """``(chi, det Z_R)`` with ``chi = det Z1 + det Z2 - 2 det Zc``."""
    chi, det_r, _ = kernels.theta_minus_parts(_matrix(r))
    return chi, det_r


def theta_minus(r) -> float:
    """Smallest partially-transposed symplectic eigenvalue from block determinants.

    ``theta_minus = sqrt((chi - sqrt(chi**2 - 4 det Z_R)) / 2)``. A negative
    radicand within ``1e-12 * max(1, chi**2)`` is roundoff and clamped to zero;
    the scale factor keeps the test meaningful for large thermal variances.
    """
    chi, det_r, rad = kernels.theta_minus_parts(_matrix(r))
    if rad < 0:
        if rad < -RADICAND_TOL * max(1.0, chi * chi):
            raise NegativeRadicand(f"chi**2 - 4 det Z_R = {rad:.3e} < 0; not a covariance matrix")
        rad = 0.0
    inner = 0.5 * (chi - math.sqrt(rad))
    if inner < 0:
        if inner < -RADICAND_TOL * max(1.0, abs(chi)):
            raise NegativeRadicand(f"chi - sqrt(chi**2 - 4 det Z_R) = {2 * inner:.3e} < 0")
        inner = 0.0
    return math.sqrt(inner)


def log_negativity_from_theta(theta: float) -> float:
    if theta <= 0:
        return math.inf
    return max(0.0, -math.log(2.0 * theta))


def log_negativity(r) -> float:
    """``max(0, -ln(2 theta_minus))``."""
    return log_negativity_from_theta(theta_minus(r))


def simon_criterion(r) -> bool:
    """Raw PPT test ``4 det Z_R < chi - 1/4``."""
    chi, det_r, _ = kernels.theta_minus_parts(_matrix(r))
    return 4.0 * det_r < chi - 0.25


def entanglement(r) -> EntanglementResult:
    """Full result with the boundary convention applied.

    States with ``|2 theta_minus - 1| <= 1e-10`` report zero negativity and
    not entangled, with ``boundary`` set.
    """
    th = theta_minus(r)
    if abs(2.0 * th - 1.0) <= BOUNDARY_TOL:
        return EntanglementResult(th, 0.0, False, boundary=True)
    return EntanglementResult(th, log_negativity_from_theta(th), simon_criterion(r))


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def check_physicality(z, tol: float = PHYSICALITY_TOL) -> bool:
    """Uncertainty relation ``Z + (i/2) Omega >= 0`` up to ``-tol``."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    if n % 2 or z.shape != (n, n):
        raise ValueError("covariance matrix must be square with even dimension")
    h = z + 0.5j * symplectic_form(n // 2)
    return bool(np.linalg.eigvalsh(h).min() >= -tol)
