"""Drift and diffusion matrices of the linearised fluctuation dynamics.

Quadrature ordering is ``(dq1, dp1, dX1, dY1, dq2, dp2, dX2, dY2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenSolverFailure
from .model import EffectiveParams

MARGINAL_RTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_drift(p: EffectiveParams) -> np.ndarray:
    """8x8 drift matrix ``C`` (rad/s), read-only.

    Per cavity block::

        [[ 0,   wm,   0,   0 ],
         [-wm, -gm,   G,   0 ],
         [ 0,   0,  -k,    D ],
         [ G,   0,  -D,   -k ]]

    Hopping enters only as ``C[2, 7] = C[6, 3] = -xi`` and
    ``C[3, 6] = C[7, 2] = +xi`` (0-based).
    """
    c = np.zeros((8, 8))
    for j, o in enumerate((0, 4)):
        wm = p.mech_freq[j]
        g = p.effective_coupling[j]
        d = p.effective_detuning[j]
        k = p.cavity_decay[j]
        c[o, o + 1] = wm
        c[o + 1, o] = -wm
        c[o + 1, o + 1] = -p.mech_damping[j]
        c[o + 1, o + 2] = g
        c[o + 2, o + 2] = -k
        c[o + 2, o + 3] = d
        c[o + 3, o] = g
        c[o + 3, o + 2] = -d
        c[o + 3, o + 3] = -k
    xi = p.hopping
    c[2, 7] = -xi
    c[3, 6] = xi
    c[6, 3] = -xi
    c[7, 2] = xi
    return _frozen(c)


def build_diffusion(p: EffectiveParams) -> np.ndarray:
    """``diag(0, gm1(2n1+1), k1, k1, 0, gm2(2n2+1), k2, k2)``, read-only."""
    diag = []
    for j in range(2):
        k = p.cavity_decay[j]
        diag += [0.0, p.mech_damping[j] * (2.0 * p.thermal_occupation[j] + 1.0), k, k]
    return _frozen(np.diag(diag))


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    spectral_abscissa: float
    margin_note: str = ""


def spectral_abscissa(c) -> float:
    """Largest real part of the eigenvalues of ``c``."""
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise EigenSolverFailure("drift matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(c)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(str(exc)) from exc
    return float(ev.real.max())


def stability(c) -> StabilityReport:
    """Hurwitz test of the drift matrix by dense eigenvalues.

    Points with ``|abscissa| < 1e-10 * ||C||`` are reported unstable since the
    Lyapunov equation is ill-posed there.
    """
    a = spectral_abscissa(c)
    norm = float(np.linalg.norm(c))
    if abs(a) <= MARGINAL_RTOL * norm or a == 0.0:
        return StabilityReport(False, a, "marginal: spectral abscissa within roundoff of zero")
    if a < 0:
        return StabilityReport(True, a)
    return StabilityReport(False, a, "unstable: eigenvalue with positive real part")
