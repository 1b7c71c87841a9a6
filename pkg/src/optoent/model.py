"""Domain types and lab-frame to model-parameter conversions.

All rates are stored in rad/s. Normalised views (everything divided by the
first mechanical frequency) are computed on demand.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy import constants as _sc

from .errors import LowQualityFactorError, ParameterError, SteadyStateNotConverged

# CODATA 2018; hbar, k_B and c are exact in the 2019 SI so later tables agree.
HBAR = _sc.hbar
K_B = _sc.k
C_LIGHT = _sc.c
TWO_PI = 2.0 * math.pi

MIN_MECH_QUALITY = 100.0


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class PhysicalCavityParams:
    """Lab-frame description of one optomechanical cavity.

    Parameters
    ----------
    cavity_length : float
        Rest length of the cavity [m].
    mirror_mass : float
        Effective mass of the movable mirror [kg].
    mech_freq : float
        Mechanical angular frequency [rad/s].
    mech_quality : float
        Mechanical quality factor, sets the damping ``mech_freq / mech_quality``.
    cavity_decay : float
        Field decay rate kappa [rad/s].
    laser_wavelength : float
        Drive wavelength [m].
    laser_power : float
        Input power [W]; zero is allowed (undriven cavity).
    cavity_detuning_bare : float
        Bare detuning ``omega_c - omega_L`` [rad/s].
    temperature : float
        Mechanical bath temperature [K].
    """

    cavity_length: float
    mirror_mass: float
    mech_freq: float
    mech_quality: float
    cavity_decay: float
    laser_wavelength: float
    laser_power: float
    cavity_detuning_bare: float
    temperature: float
    allow_low_q: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("cavity_length", "mirror_mass", "mech_freq", "mech_quality",
                     "cavity_decay", "laser_wavelength"):
            _positive(name, getattr(self, name))
        if not (np.isfinite(self.laser_power) and self.laser_power >= 0):
            raise ParameterError(f"laser_power must be >= 0, got {self.laser_power!r}")
        if not (np.isfinite(self.temperature) and self.temperature >= 0):
            raise ParameterError(f"temperature must be >= 0, got {self.temperature!r}")
        if not np.isfinite(self.cavity_detuning_bare):
            raise ParameterError("cavity_detuning_bare must be finite")
        if self.mech_quality < MIN_MECH_QUALITY:
            msg = (f"mech_quality={self.mech_quality:g} < {MIN_MECH_QUALITY:g}: "
                   "the Markovian thermal-noise limit is not valid")
            if not self.allow_low_q:
                raise LowQualityFactorError(msg)
            warnings.warn(msg, UserWarning, stacklevel=3)

    @property
    def mech_damping(self) -> float:
        return self.mech_freq / self.mech_quality

    @property
    def laser_freq(self) -> float:
        return TWO_PI * C_LIGHT / self.laser_wavelength

    @property
    def cavity_freq(self) -> float:
        return self.laser_freq + self.cavity_detuning_bare


Pair = tuple[float, float]


def _pair(value) -> Pair:
    arr = np.broadcast_to(np.asarray(value, dtype=float), (2,))
    return (float(arr[0]), float(arr[1]))


@dataclass(frozen=True)
class EffectiveParams:
    """Linearised-model parameters, per cavity where applicable, in rad/s.

    Scalars passed for per-cavity fields are broadcast to both cavities.
    """

    mech_freq: Pair
    mech_damping: Pair
    cavity_decay: Pair
    effective_detuning: Pair
    effective_coupling: Pair
    hopping: float
    thermal_occupation: Pair

    def __post_init__(self):
        for name in ("mech_freq", "mech_damping", "cavity_decay", "effective_detuning",
                     "effective_coupling", "thermal_occupation"):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        object.__setattr__(self, "hopping", float(self.hopping))
        for j in range(2):
            if not self.mech_freq[j] > 0:
                raise ParameterError(f"mech_freq[{j}] must be > 0")
            if not self.cavity_decay[j] > 0:
                raise ParameterError(f"cavity_decay[{j}] must be > 0")
            # zero damping is accepted so the undamped limit can be studied
            if not self.mech_damping[j] >= 0:
                raise ParameterError(f"mech_damping[{j}] must be >= 0")
            if not self.thermal_occupation[j] >= 0:
                raise ParameterError(f"thermal_occupation[{j}] must be >= 0")
        values = (self.effective_detuning + self.effective_coupling
                  + (self.hopping,) + self.mech_freq + self.mech_damping
                  + self.cavity_decay + self.thermal_occupation)
        if not all(math.isfinite(v) for v in values):
            raise ParameterError("all effective parameters must be finite")

    @classmethod
    def from_normalized(cls, mech_freq, *, gamma_m, kappa, detuning, coupling,
                        hopping, thermal_occupation=0.0, mech_freq_ratio=1.0):
        """Build from rates given in units of the first mechanical frequency.

        ``mech_freq`` is the reference angular frequency [rad/s]; the second
        resonator runs at ``mech_freq * mech_freq_ratio``.
        """
        wm = float(mech_freq)
        ratio = np.asarray(_pair(1.0), dtype=float)
        ratio[1] = mech_freq_ratio
        return cls(
            mech_freq=tuple(wm * ratio),
            mech_damping=tuple(wm * np.asarray(_pair(gamma_m))),
            cavity_decay=tuple(wm * np.asarray(_pair(kappa))),
            effective_detuning=tuple(wm * np.asarray(_pair(detuning))),
            effective_coupling=tuple(wm * np.asarray(_pair(coupling))),
            hopping=wm * float(hopping),
            thermal_occupation=thermal_occupation,
        )

    @property
    def reference_freq(self) -> float:
        return self.mech_freq[0]

    def normalized(self) -> dict[str, float]:
        """Flat dict of every rate divided by ``mech_freq[0]``."""
        wm = self.reference_freq
        out = {}
        for j in range(2):
            k = j + 1
            out[f"mech_freq{k}"] = self.mech_freq[j] / wm
            out[f"gamma_m{k}"] = self.mech_damping[j] / wm
            out[f"kappa{k}"] = self.cavity_decay[j] / wm
            out[f"detuning{k}"] = self.effective_detuning[j] / wm
            out[f"coupling{k}"] = self.effective_coupling[j] / wm
            out[f"n_th{k}"] = self.thermal_occupation[j]
        out["hopping"] = self.hopping / wm
        return out

    def swapped(self) -> "EffectiveParams":
        """Same system with the cavity labels exchanged."""
        flip = lambda p: (p[1], p[0])  # noqa: E731
        return EffectiveParams(
            mech_freq=flip(self.mech_freq),
            mech_damping=flip(self.mech_damping),
            cavity_decay=flip(self.cavity_decay),
            effective_detuning=flip(self.effective_detuning),
            effective_coupling=flip(self.effective_coupling),
            hopping=self.hopping,
            thermal_occupation=flip(self.thermal_occupation),
        )

    def replace(self, **changes) -> "EffectiveParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelInput:
    """Either a physical description of both cavities or effective parameters.

    In physical mode ``hopping`` is the photon-hopping rate [rad/s] and
    ``branch`` optionally selects a stationary branch (``"lower"``/``"upper"``).
    """

    mode: Literal["physical", "effective"]
    physical: tuple[PhysicalCavityParams, PhysicalCavityParams] | None = None
    hopping: float = 0.0
    effective: EffectiveParams | None = None
    branch: str | None = None

    def __post_init__(self):
        if self.mode == "physical":
            if self.physical is None or self.effective is not None:
                raise ParameterError("physical mode needs `physical` and no `effective`")
            if len(self.physical) != 2:
                raise ParameterError("physical mode needs exactly two cavities")
            object.__setattr__(self, "physical", tuple(self.physical))
            l1, l2 = (p.laser_wavelength for p in self.physical)
            if l1 != l2:
                raise ParameterError(
                    f"both cavities must be driven at the same wavelength ({l1} != {l2})")
            if not math.isfinite(self.hopping):
                raise ParameterError("hopping must be finite")
            if self.branch not in (None, "lower", "upper"):
                raise ParameterError(f"unknown branch {self.branch!r}")
        elif self.mode == "effective":
            if self.effective is None or self.physical is not None:
                raise ParameterError("effective mode needs `effective` and no `physical`")
        else:
            raise ParameterError(f"unknown mode {self.mode!r}")


def single_photon_coupling(p: PhysicalCavityParams) -> float:
    """Radiation-pressure coupling ``g = (omega_c / L) sqrt(hbar / (m omega_m))`` [rad/s]."""
    return p.cavity_freq / p.cavity_length * math.sqrt(HBAR / (p.mirror_mass * p.mech_freq))


def drive_amplitude(p: PhysicalCavityParams) -> float:
    """``|E| = sqrt(2 P kappa / (hbar omega_L))`` [rad/s]."""
    return math.sqrt(2.0 * p.laser_power * p.cavity_decay / (HBAR * p.laser_freq))


def mean_thermal_occupation(temperature: float, mech_freq: float) -> float:
    """Bose-Einstein occupation of a mode at ``mech_freq`` [rad/s].

    ``temperature == 0`` returns exactly 0.
    """
    if temperature < 0:
        raise ParameterError("temperature must be >= 0")
    if not mech_freq > 0:
        raise ParameterError("mech_freq must be > 0")
    if temperature == 0:
        return 0.0
    x = HBAR * mech_freq / (K_B * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def to_effective(model_input: ModelInput, steady=None, *, tol: float = 1e-9) -> EffectiveParams:
    """Resolve a :class:`ModelInput` to :class:`EffectiveParams`.

    In physical mode ``steady`` must be a converged
    :class:`~optoent.steady_state.SteadyState`; its residual is re-evaluated
    against the input and :class:`SteadyStateNotConverged` is raised above
    ``tol``. The coupling uses the modulus convention ``G = sqrt(2) g |a|``.
    """
    if model_input.mode == "effective":
        return model_input.effective
    if steady is None:
        raise SteadyStateNotConverged("physical mode needs a steady state")
    from .steady_state import StationaryProblem, fixed_point_residual

    problem = StationaryProblem.from_input(model_input)
    residual = fixed_point_residual(steady, problem)
    if not residual <= tol:
        raise SteadyStateNotConverged(f"steady-state residual {residual:.3e} > {tol:.1e}")
    p1, p2 = model_input.physical
    amp_mod = np.abs(np.asarray(steady.amp))
    return EffectiveParams(
        mech_freq=(p1.mech_freq, p2.mech_freq),
        mech_damping=(p1.mech_damping, p2.mech_damping),
        cavity_decay=(p1.cavity_decay, p2.cavity_decay),
        effective_detuning=tuple(problem.detuning_from_amp(steady.amp)),
        effective_coupling=tuple(math.sqrt(2.0) * problem.g * amp_mod),
        hopping=model_input.hopping,
        thermal_occupation=(mean_thermal_occupation(p1.temperature, p1.mech_freq),
                            mean_thermal_occupation(p2.temperature, p2.mech_freq)),
    )
