"""Stationary mean fields of the two driven, hopping-coupled cavities.

The intracavity amplitudes solve

    a_j = (alpha_k E_j + i xi E_k) / (alpha_j alpha_k + xi**2),
    alpha_j = kappa_j + i Delta_j,
    Delta_j = Delta0_j - g_j**2 |a_j|**2 / omega_mj,

which is closed once the two effective detunings are known. The solver
iterates on ``(Delta_1, Delta_2)`` and reaches the target drive by
continuation in laser power from zero, where the solution is ``Delta = Delta0``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MultistableAmbiguous, NoConvergence, ParameterError
from .model import ModelInput, PhysicalCavityParams, drive_amplitude, single_photon_coupling

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MAX_ITER = 10_000
DAMPING = 0.5


@dataclass(frozen=True)
class StationaryProblem:
    """Coefficients of the stationary equations for both cavities (rad/s)."""

    g: np.ndarray
    drive: np.ndarray
    kappa: np.ndarray
    detuning0: np.ndarray
    mech_freq: np.ndarray
    hopping: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "detuning0", "mech_freq"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (2,)).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        drive = np.broadcast_to(np.asarray(self.drive, dtype=complex), (2,)).copy()
        drive.setflags(write=False)
        object.__setattr__(self, "drive", drive)
        object.__setattr__(self, "hopping", float(self.hopping))
        if np.any(self.kappa <= 0) or np.any(self.mech_freq <= 0):
            raise ParameterError("kappa and mech_freq must be > 0")

    @classmethod
    def from_physical(cls, p1: PhysicalCavityParams, p2: PhysicalCavityParams, hopping: float):
        ps = (p1, p2)
        return cls(
            g=[single_photon_coupling(p) for p in ps],
            drive=[drive_amplitude(p) for p in ps],
            kappa=[p.cavity_decay for p in ps],
            detuning0=[p.cavity_detuning_bare for p in ps],
            mech_freq=[p.mech_freq for p in ps],
            hopping=hopping,
        )

    @classmethod
    def from_input(cls, model_input: ModelInput):
        if model_input.mode != "physical":
            raise ParameterError("stationary problem needs physical-mode input")
        return cls.from_physical(*model_input.physical, model_input.hopping)

    @property
    def shift(self) -> np.ndarray:
        """Detuning shift per intracavity photon, ``g**2 / omega_m``."""
        return self.g ** 2 / self.mech_freq

    @property
    def amp_scale(self) -> np.ndarray:
        return np.maximum(1.0, np.abs(self.drive) / self.kappa)

    def scaled(self, power_fraction: float) -> "StationaryProblem":
        """Same problem with both input powers multiplied by ``power_fraction``."""
        return StationaryProblem(self.g, self.drive * math.sqrt(power_fraction), self.kappa,
                                 self.detuning0, self.mech_freq, self.hopping)

    def swapped(self) -> "StationaryProblem":
        s = slice(None, None, -1)
        return StationaryProblem(self.g[s], self.drive[s], self.kappa[s], self.detuning0[s],
                                 self.mech_freq[s], self.hopping)

    def amplitude(self, detuning) -> np.ndarray:
        """Intracavity amplitudes for given effective detunings."""
        alpha = self.kappa + 1j * np.asarray(detuning, dtype=float)
        e1, e2 = self.drive
        xi = self.hopping
        den = alpha[0] * alpha[1] + xi * xi
        return np.array([(alpha[1] * e1 + 1j * xi * e2) / den,
                         (alpha[0] * e2 + 1j * xi * e1) / den])

    def detuning_from_amp(self, amp) -> np.ndarray:
        return self.detuning0 - self.shift * np.abs(np.asarray(amp)) ** 2

    def defect(self, detuning) -> np.ndarray:
        """Fixed-point defect ``F(Delta) - Delta``."""
        return self.detuning_from_amp(self.amplitude(detuning)) - detuning

    def map_jacobian(self, detuning) -> np.ndarray:
        """Jacobian of the map ``F(Delta) = Delta0 - shift * |a(Delta)|**2``."""
        alpha = self.kappa + 1j * np.asarray(detuning, dtype=float)
        e1, e2 = self.drive
        xi = self.hopping
        den = alpha[0] * alpha[1] + xi * xi
        num = np.array([alpha[1] * e1 + 1j * xi * e2, alpha[0] * e2 + 1j * xi * e1])
        a = num / den
        # da[j]/dDelta[m]
        da = np.empty((2, 2), dtype=complex)
        da[0, 0] = -num[0] * 1j * alpha[1] / den ** 2
        da[0, 1] = 1j * e1 / den - num[0] * 1j * alpha[0] / den ** 2
        da[1, 1] = -num[1] * 1j * alpha[0] / den ** 2
        da[1, 0] = 1j * e2 / den - num[1] * 1j * alpha[1] / den ** 2
        dn = 2.0 * np.real(np.conj(a)[:, None] * da)
        return -self.shift[:, None] * dn


def decoupled_intensity_roots(problem: StationaryProblem) -> list[np.ndarray]:
    """Positive real roots (photon numbers) of each cavity's cubic at zero hopping.

    With ``xi = 0`` the intensity ``n = |a|**2`` of cavity ``j`` obeys
    ``n (kappa**2 + (Delta0 - s n)**2) = |E|**2`` with ``s = g**2 / omega_m``.
    """
    out = []
    for j in range(2):
        s = problem.shift[j]
        d0 = problem.detuning0[j]
        k = problem.kappa[j]
        e2 = abs(problem.drive[j]) ** 2
        if e2 == 0:
            out.append(np.array([0.0]))
            continue
        if s == 0:
            out.append(np.array([e2 / (k * k + d0 * d0)]))
            continue
        roots = np.roots([s * s, -2.0 * d0 * s, k * k + d0 * d0, -e2])
        real = roots[np.abs(roots.imag) <= 1e-9 * np.abs(roots)].real
        real = np.sort(real[real > 0])
        # polish, np.roots is only backward stable
        poly = np.poly1d([s * s, -2.0 * d0 * s, k * k + d0 * d0, -e2])
        dpoly = poly.deriv()
        for _ in range(3):
            d = dpoly(real)
            safe = d != 0
            real[safe] = real[safe] - poly(real[safe]) / d[safe]
        out.append(np.unique(real) if real.size else real)
    return out


@dataclass(frozen=True)
class SteadyState:
    """Stationary mean values.

    ``amp`` holds the raw complex amplitudes; ``branch`` is one of
    ``"unique"``, ``"lower"``, ``"upper"`` (per-cavity flags in
    ``cavity_branches``). ``fold_fractions`` lists the power fractions at
    which the continuation jumped between branches.
    """

    amp: tuple[complex, complex]
    mech_pos: tuple[float, float]
    mech_mom: tuple[float, float]
    eff_detuning: tuple[float, float]
    residual: float
    branch: str
    cavity_branches: tuple[str, str] = ("unique", "unique")
    fold_fractions: tuple[float, ...] = ()
    iterations: int = field(default=0, compare=False)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(np.asarray(self.amp)) ** 2


def fixed_point_residual(candidate, problem: StationaryProblem) -> float:
    """Scaled mismatch of a candidate against the stationary equations.

    Returns ``max_j |a_j - target_j| / max(1, |E_j| / kappa_j)`` where the
    target amplitude is evaluated at the detunings implied by the candidate's
    own intensities.
    """
    amp = np.asarray(candidate.amp if hasattr(candidate, "amp") else candidate, dtype=complex)
    if not np.all(np.isfinite(amp)):
        return math.inf
    target = problem.amplitude(problem.detuning_from_amp(amp))
    return float(np.max(np.abs(amp - target) / problem.amp_scale))


def _defect_and_jacobian(c, x1, x2):
    """Scalar evaluation of the defect ``F(Delta) - Delta`` and ``dF/dDelta``.

    ``c`` is the tuple ``(kappa1, kappa2, E1, E2, xi, shift1, shift2, d01, d02)``.
    """
    k1, k2, e1, e2, xi, s1, s2, d01, d02 = c
    a1 = complex(k1, x1)
    a2 = complex(k2, x2)
    den = a1 * a2 + xi * xi
    n1 = a2 * e1 + 1j * xi * e2
    n2 = a1 * e2 + 1j * xi * e1
    amp1 = n1 / den
    amp2 = n2 / den
    den2 = den * den
    da11 = -n1 * 1j * a2 / den2
    da12 = 1j * e1 / den - n1 * 1j * a1 / den2
    da22 = -n2 * 1j * a1 / den2
    da21 = 1j * e2 / den - n2 * 1j * a2 / den2
    c1 = amp1.conjugate()
    c2 = amp2.conjugate()
    j11 = -2.0 * s1 * (c1 * da11).real
    j12 = -2.0 * s1 * (c1 * da12).real
    j21 = -2.0 * s2 * (c2 * da21).real
    j22 = -2.0 * s2 * (c2 * da22).real
    f1 = d01 - s1 * (amp1.real ** 2 + amp1.imag ** 2) - x1
    f2 = d02 - s2 * (amp2.real ** 2 + amp2.imag ** 2) - x2
    return f1, f2, j11, j12, j21, j22, amp1, amp2


def _amp_scalar(c, x1, x2):
    k1, k2, e1, e2, xi = c[:5]
    a1 = complex(k1, x1)
    a2 = complex(k2, x2)
    den = a1 * a2 + xi * xi
    return (a2 * e1 + 1j * xi * e2) / den, (a1 * e2 + 1j * xi * e1) / den


def _eig_real_parts(j11, j12, j21, j22):
    half_tr = 0.5 * (j11 + j22)
    disc = half_tr * half_tr - (j11 * j22 - j12 * j21)
    if disc >= 0:
        r = math.sqrt(disc)
        return half_tr - r, half_tr + r
    return half_tr, half_tr


def _iterate(problem: StationaryProblem, detuning, tol, max_iter):
    """Adaptively relaxed fixed-point iteration on the detunings.

    Where the damped map contracts (all eigenvalues of its Jacobian have real
    part below one) the relaxation is chosen from the Jacobian, which makes the
    step Newton-like; elsewhere a damped step is taken, which pushes the
    iterate off statically unstable branches.
    """
    c = (float(problem.kappa[0]), float(problem.kappa[1]), complex(problem.drive[0]),
         complex(problem.drive[1]), problem.hopping, float(problem.shift[0]),
         float(problem.shift[1]), float(problem.detuning0[0]), float(problem.detuning0[1]))
    sc1 = c[0] + abs(c[7])
    sc2 = c[1] + abs(c[8])
    x1, x2 = float(detuning[0]), float(detuning[1])
    as1, as2 = (float(v) for v in problem.amp_scale)
    n_free = 0
    for it in range(1, max_iter + 1):
        f1, f2, j11, j12, j21, j22, amp1, amp2 = _defect_and_jacobian(c, x1, x2)
        # residual of the amplitudes against the map evaluated at their intensities
        t1, t2 = _amp_scalar(c, x1 + f1, x2 + f2)
        if max(abs(amp1 - t1) / as1, abs(amp2 - t2) / as2) < tol:
            amp = np.array([amp1, amp2])
            res = fixed_point_residual(amp, problem)
            if res < tol:
                return np.array([x1, x2]), amp, res, it
        lo, hi = _eig_real_parts(j11, j12, j21, j22)
        dnorm = max(abs(f1) / sc1, abs(f2) / sc2)
        if hi < 1.0:
            # Newton step on Delta - F(Delta) = 0 with backtracking
            m11, m12, m21, m22 = 1.0 - j11, -j12, -j21, 1.0 - j22
            det = m11 * m22 - m12 * m21
            if det != 0.0:
                s1 = (m22 * f1 - m12 * f2) / det
                s2 = (m11 * f2 - m21 * f1) / det
                lam = 1.0
                while lam > 1e-8:
                    t1, t2 = x1 + lam * s1, x2 + lam * s2
                    g = _defect_and_jacobian(c, t1, t2)
                    if max(abs(g[0]) / sc1, abs(g[1]) / sc2) < dnorm:
                        break
                    lam *= 0.5
                else:
                    t1 = None
                if t1 is not None:
                    x1, x2 = t1, t2
                    n_free = 0
                    continue
        # Damped step. Directions with eigenvalue < 1 must stay contracting,
        # which bounds the relaxation; along eigenvalues >= 1 the iterate is
        # being pushed off a fold, so the relaxation grows to cross the slow
        # region quickly.
        bound = 1.5 / (1.0 - lo) if lo < 1.0 else math.inf
        cap = 1.0 / max(dnorm, 1e-300)
        lam = min(DAMPING * 2.0 ** min(n_free, 60), bound, cap)
        n_free += 1
        x1 += lam * f1
        x2 += lam * f2
    amp = problem.amplitude((x1, x2))
    raise NoConvergence(
        f"stationary iteration did not reach tol={tol:.1e} in {max_iter} steps "
        f"(residual {fixed_point_residual(amp, problem):.3e})")


def _classify(problem: StationaryProblem, amp) -> tuple[str, str]:
    roots = decoupled_intensity_roots(problem)
    flags = []
    n = np.abs(np.asarray(amp)) ** 2
    for j in range(2):
        r = roots[j]
        if r.size <= 1:
            flags.append("unique")
        else:
            flags.append("lower" if abs(n[j] - r[0]) <= abs(n[j] - r[-1]) else "upper")
    return tuple(flags)


def _combined(flags) -> str:
    if all(f == "unique" for f in flags):
        return "unique"
    return "upper" if "upper" in flags else "lower"


def _build(problem, delta, amp, res, it, folds=()) -> SteadyState:
    flags = _classify(problem, amp)
    n = np.abs(amp) ** 2
    q = problem.g * n / problem.mech_freq
    return SteadyState(
        amp=(complex(amp[0]), complex(amp[1])),
        mech_pos=(float(q[0]), float(q[1])),
        mech_mom=(0.0, 0.0),
        eff_detuning=(float(delta[0]), float(delta[1])),
        residual=float(res),
        branch=_combined(flags),
        cavity_branches=flags,
        fold_fractions=tuple(folds),
        iterations=it,
    )


def _root_guesses(problem: StationaryProblem, near):
    """Detuning guesses from the decoupled cubic roots, nearest to ``near`` first."""
    roots = decoupled_intensity_roots(problem)
    guesses = [problem.detuning0 - problem.shift * np.array([n1, n2])
               for n1 in roots[0] for n2 in roots[1]]
    guesses.sort(key=lambda g: float(np.max(np.abs(g - near) / problem.kappa)))
    return guesses


def _restart(problem: StationaryProblem, near, tol, max_iter):
    for guess in _root_guesses(problem, near):
        try:
            return _iterate(problem, guess, tol, max_iter)
        except NoConvergence:
            continue
    raise NoConvergence("no stationary solution found from any cubic-root guess")


def _continue(problem: StationaryProblem, tol, max_iter, n_steps=32, jump_tol=0.25,
              min_step=1e-7, step_iter=200):
    """Follow the solution from zero power to full power.

    Returns ``(detuning, amp, residual, iterations, folds, jumped)``, where
    ``jumped`` marks the cavities whose detuning moved by more than
    ``jump_tol`` (in units of kappa) at some fold. The power step is bisected
    whenever the solution jumps or the iteration stalls. At ``min_step`` a
    jump is accepted as a fold, restarting from the decoupled cubic roots if
    needed.
    """
    delta = problem.detuning0.copy()
    frac = 0.0
    step = 1.0 / n_steps
    folds = []
    jumped = np.zeros(2, dtype=bool)
    total_it = 0
    amp = np.zeros(2, dtype=complex)
    res = 0.0
    while frac < 1.0:
        if total_it > max_iter:
            raise NoConvergence(f"power continuation exceeded {max_iter} iterations")
        nxt = min(1.0, frac + step)
        sub = problem.scaled(nxt)
        try:
            new_delta, new_amp, new_res, it = _iterate(sub, delta, tol, step_iter)
            total_it += it
            jump = np.max(np.abs(new_delta - delta) / problem.kappa)
        except NoConvergence:
            total_it += step_iter
            new_delta = None
        if (new_delta is None or jump > jump_tol) and step > min_step:
            step *= 0.5
            continue
        if new_delta is None:
            new_delta, new_amp, new_res, it = _restart(sub, delta, tol, max_iter)
            total_it += it
            jump = np.max(np.abs(new_delta - delta) / problem.kappa)
        if jump > jump_tol:
            log.debug("fold at power fraction %.12g (jump %.3g kappa)", nxt, jump)
            folds.append(nxt)
            jumped |= np.abs(new_delta - delta) / problem.kappa > jump_tol
        delta, amp, res, frac = new_delta, new_amp, new_res, nxt
        step = min(step * 2.0, 1.0 / n_steps)
    return delta, amp, res, total_it, folds, jumped


def solve_stationary(problem: StationaryProblem, *, branch: str | None = None,
                     tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> SteadyState:
    """Solve the stationary equations of ``problem``.

    Parameters
    ----------
    branch : {None, "lower", "upper"}
        ``None`` follows the branch reached adiabatically from zero power. If
        a cavity jumps across a fold on that path and is still multistable at
        the target power, :class:`MultistableAmbiguous` is raised. ``"lower"`` and
        ``"upper"`` start from the smallest/largest root of each cavity's
        zero-hopping intensity cubic instead.
    """
    if branch is None:
        delta, amp, res, it, folds, jumped = _continue(problem, tol, max_iter)
        state = _build(problem, delta, amp, res, it, folds)
        if any(j and f != "unique" for j, f in zip(jumped, state.cavity_branches)):
            raise MultistableAmbiguous(
                "power continuation crossed a fold and the target is multistable; "
                "pass branch='lower' or 'upper'",
                branches=decoupled_intensity_roots(problem), fold_fractions=folds)
        return state
    if branch not in ("lower", "upper"):
        raise ParameterError(f"unknown branch {branch!r}")
    roots = decoupled_intensity_roots(problem)
    n0 = np.array([r[0] if branch == "lower" else r[-1] for r in roots])
    delta0 = problem.detuning0 - problem.shift * n0
    delta, amp, res, it = _iterate(problem, delta0, tol, max_iter)
    return _build(problem, delta, amp, res, it)


def solve_steady_state(model_input: ModelInput, *, tol: float = DEFAULT_TOL,
                       max_iter: int = MAX_ITER) -> SteadyState:
    """Stationary state for physical-mode input (uses ``model_input.branch``)."""
    problem = StationaryProblem.from_input(model_input)
    return solve_stationary(problem, branch=model_input.branch, tol=tol, max_iter=max_iter)
