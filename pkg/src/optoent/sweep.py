"""Pipeline evaluation over parameter grids.

A grid point goes through: (physical input -> stationary state ->) effective
parameters -> drift/diffusion -> stability -> Lyapunov covariance ->
bipartition entanglement. Unstable points are recorded with their spectral
abscissa and no entanglement values.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import build_diffusion, build_drift, stability
from .entanglement import (ALL_BIPARTITIONS, Bipartition, check_physicality, entanglement,
                           extract_bipartition)
from .errors import NegativeRadicand, OptoEntError, ParameterError
from .lyapunov import solve_lyapunov
from .model import EffectiveParams, ModelInput, mean_thermal_occupation, to_effective
from .steady_state import solve_steady_state
from .units import parse_path, split_rate_key, to_rad_s

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_UNSTABLE = "unstable"
STATUS_ERROR = "solver_error"

UNSTABLE_POLICIES = ("flag", "formal")

_EFFECTIVE_RATES = {
    "mech_freq": "mech_freq",
    "gamma_m": "mech_damping",
    "kappa": "cavity_decay",
    "detuning": "effective_detuning",
    "coupling": "effective_coupling",
    "hopping": "hopping",
}
_PHYSICAL_RATES = {
    "mech_freq": "mech_freq",
    "kappa": "cavity_decay",
    "detuning0": "cavity_detuning_bare",
    "gamma_m": None,  # stored as a quality factor
    "hopping": None,  # lives on ModelInput
}
_PHYSICAL_PLAIN = {
    "cavity_length_m": "cavity_length",
    "mirror_mass_kg": "mirror_mass",
    "mech_quality": "mech_quality",
    "laser_wavelength_m": "laser_wavelength",
    "laser_power_w": "laser_power",
    "temperature_k": "temperature",
}


def _set_pair(pair, cavity, value):
    if cavity is None:
        return (value, value)
    out = list(pair)
    out[cavity] = value
    return tuple(out)


def _apply_effective(p: EffectiveParams, key, cavity, value) -> EffectiveParams:
    if key == "thermal_occupation":
        return p.replace(thermal_occupation=_set_pair(p.thermal_occupation, cavity, value))
    if key == "temperature_k":
        nth = [mean_thermal_occupation(value, w) for w in p.mech_freq]
        new = nth if cavity is None else _set_pair(p.thermal_occupation, cavity, nth[cavity])
        return p.replace(thermal_occupation=tuple(new))
    split = split_rate_key(key)
    if split is None or split[0] not in _EFFECTIVE_RATES:
        raise ParameterError(f"unknown effective parameter {key!r}")
    base, suffix = split
    if base == "mech_freq" and suffix == "_over_omega_m":
        raise ParameterError("mech_freq cannot be given relative to itself")
    rate = to_rad_s(value, suffix, p.reference_freq)
    name = _EFFECTIVE_RATES[base]
    if name == "hopping":
        if cavity is not None:
            raise ParameterError("hopping is shared by both cavities")
        return p.replace(hopping=rate)
    return p.replace(**{name: _set_pair(getattr(p, name), cavity, rate)})


def _apply_physical(mi: ModelInput, key, cavity, value) -> ModelInput:
    cavs = list(mi.physical)
    targets = range(2) if cavity is None else (cavity,)
    if key in _PHYSICAL_PLAIN:
        for j in targets:
            cavs[j] = replace(cavs[j], **{_PHYSICAL_PLAIN[key]: float(value)})
        return replace(mi, physical=tuple(cavs))
    split = split_rate_key(key)
    if split is None or split[0] not in _PHYSICAL_RATES:
        raise ParameterError(f"unknown physical parameter {key!r}")
    base, suffix = split
    if base == "mech_freq" and suffix == "_over_omega_m":
        raise ParameterError("mech_freq cannot be given relative to itself")
    rate = to_rad_s(value, suffix, cavs[0].mech_freq)
    if base == "hopping":
        if cavity is not None:
            raise ParameterError("hopping is shared by both cavities")
        return replace(mi, hopping=rate)
    for j in targets:
        if base == "gamma_m":
            cavs[j] = replace(cavs[j], mech_quality=cavs[j].mech_freq / rate)
        else:
            cavs[j] = replace(cavs[j], **{_PHYSICAL_RATES[base]: rate})
    return replace(mi, physical=tuple(cavs))


def apply_parameter(model_input: ModelInput, path: str, value: float) -> ModelInput:
    """Return a copy of ``model_input`` with the parameter at ``path`` set.

    Paths are unit-suffixed names, optionally restricted to one cavity with
    ``[1]`` or ``[2]``; without a selector the value applies to both cavities.
    Examples: ``"hopping_over_omega_m"``, ``"temperature_k"``,
    ``"kappa_hz[2]"``, ``"laser_power_w"``.
    """
    key, cavity = parse_path(path)
    if model_input.mode == "effective":
        return replace(model_input,
                       effective=_apply_effective(model_input.effective, key, cavity, value))
    return _apply_physical(model_input, key, cavity, value)


@dataclass(frozen=True)
class Axis:
    path: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ParameterError(f"axis {self.path!r} has no values")
        parse_path(self.path)

    @classmethod
    def linspace(cls, path, start, stop, num):
        return cls(path, tuple(np.linspace(start, stop, int(num))))


@dataclass(frozen=True)
class SweepSpec:
    base: ModelInput
    axes: tuple[Axis, ...]
    bipartitions: tuple[Bipartition, ...] = ALL_BIPARTITIONS
    unstable_policy: str = "flag"

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "bipartitions",
                           tuple(Bipartition.parse(b) for b in self.bipartitions))
        if not 1 <= len(self.axes) <= 2:
            raise ParameterError("a sweep needs one or two axes")
        if not self.bipartitions:
            raise ParameterError("at least one bipartition is required")
        if self.unstable_policy not in UNSTABLE_POLICIES:
            raise ParameterError(f"unstable_policy must be one of {UNSTABLE_POLICIES}")
        # fail on bad paths before any work is scheduled
        for ax in self.axes:
            apply_parameter(self.base, ax.path, ax.values[0])

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)

    def grid(self):
        """Row-major iterator of ``(grid_index, axis_values)``."""
        for idx in itertools.product(*(range(n) for n in self.shape)):
            yield idx, tuple(ax.values[i] for ax, i in zip(self.axes, idx))


@dataclass(frozen=True)
class SweepRecord:
    """Outcome at one grid point.

    ``entanglement`` maps each requested :class:`Bipartition` to its result,
    or to None when the point is unstable (under the default policy) or failed.
    """

    grid_index: tuple[int, ...]
    axis_values: tuple[float, ...]
    resolved_params: EffectiveParams | None
    stable: bool
    spectral_abscissa: float
    entanglement: dict = field(default_factory=dict)
    physical: bool | None = None
    status: str = STATUS_OK
    message: str = ""
    covariance: np.ndarray | None = field(default=None, compare=False, repr=False)

    def log_negativity(self, b: Bipartition | str) -> float | None:
        res = self.entanglement.get(Bipartition.parse(b))
        return None if res is None else res.log_negativity


def _entangle_all(z, bipartitions, *, tolerant=False):
    out = {}
    for b in bipartitions:
        try:
            out[b] = entanglement(extract_bipartition(z, b))
        except NegativeRadicand:
            if not tolerant:
                raise
            out[b] = None
    return out


def evaluate_point(model_input: ModelInput,
                   bipartitions=ALL_BIPARTITIONS,
                   unstable_policy: str = "flag",
                   grid_index: tuple[int, ...] = (),
                   axis_values: tuple[float, ...] = (),
                   keep_covariance: bool = False) -> SweepRecord:
    """Run the full pipeline at one parameter point. Never raises on solver errors.

    With ``keep_covariance`` the 8x8 matrix ``Z`` is attached to the record
    (also for the formal solution of an unstable point).
    """
    bipartitions = tuple(Bipartition.parse(b) for b in bipartitions)
    blank = {b: None for b in bipartitions}
    nan = float("nan")
    try:
        if model_input.mode == "physical":
            steady = solve_steady_state(model_input)
            params = to_effective(model_input, steady)
        else:
            params = model_input.effective
    except OptoEntError as exc:
        return SweepRecord(grid_index, axis_values, None, False, nan, blank,
                           status=STATUS_ERROR, message=f"{type(exc).__name__}: {exc}")
    try:
        c = build_drift(params)
        d = build_diffusion(params)
        report = stability(c)
        if not report.stable:
            ent, z = blank, None
            if unstable_policy == "formal":
                z = solve_lyapunov(c, d, allow_unstable=True)
                ent = _entangle_all(z, bipartitions, tolerant=True)
            return SweepRecord(grid_index, axis_values, params, False, report.spectral_abscissa,
                               ent, status=STATUS_UNSTABLE, message=report.margin_note,
                               covariance=z if keep_covariance else None)
        z = solve_lyapunov(c, d)
        ent = _entangle_all(z, bipartitions)
        return SweepRecord(grid_index, axis_values, params, True, report.spectral_abscissa,
                           ent, physical=check_physicality(z),
                           covariance=z if keep_covariance else None)
    except OptoEntError as exc:
        return SweepRecord(grid_index, axis_values, params, False, nan, blank,
                           status=STATUS_ERROR, message=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRecord]:
    """Evaluate every grid point; records come back in row-major grid order."""

    def task(item):
        idx, vals = item
        mi = spec.base
        for ax, v in zip(spec.axes, vals):
            mi = apply_parameter(mi, ax.path, v)
        return evaluate_point(mi, spec.bipartitions, spec.unstable_policy, idx, vals)

    points = list(spec.grid())
    if threads <= 1:
        records = [task(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(task, points))
    records.sort(key=lambda r: r.grid_index)
    n_unstable = sum(r.status == STATUS_UNSTABLE for r in records)
    log.info("sweep: %d points, %d unstable", len(records), n_unstable)
    return records


def records_to_array(records, spec: SweepSpec, bipartition, attr="log_negativity"):
    """Reshape one per-bipartition quantity to the grid shape (NaN where absent)."""
    b = Bipartition.parse(bipartition)
    out = np.full(spec.shape, np.nan)
    for r in records:
        res = r.entanglement.get(b)
        if res is not None:
            out[r.grid_index] = getattr(res, attr)
    return out
