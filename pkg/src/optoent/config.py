"""TOML run configuration.

Every frequency-like key carries a unit suffix: ``_hz`` (cycles per second,
converted with a factor 2*pi), ``_rad_s`` (angular) or ``_over_omega_m``
(relative to the mechanical frequency of cavity 1). Per-cavity quantities
accept a scalar (shared) or a two-element list.

Effective mode::

    [model]
    mode = "effective"
    mech_freq_hz = 10e6
    gamma_m_over_omega_m = 1e-5
    kappa_over_omega_m = 0.5
    detuning_over_omega_m = 1.0
    coupling_over_omega_m = 4.0
    hopping_over_omega_m = 0.5
    temperature_k = 0.6          # or thermal_occupation = ...

    [sweep]
    unstable_policy = "flag"     # or "formal"

    [[sweep.axis]]
    path = "hopping_over_omega_m"
    start = 0.0
    stop = 1.2
    num = 201                    # or values = [...]

    [output]
    path = "out.csv"
    precision = 17               # omit for shortest round-trip repr
    bipartitions = ["mech_mech", "opt_opt"]

Physical mode uses ``cavity_length_m``, ``mirror_mass_kg``, ``mech_freq_*``,
``mech_quality`` (or ``gamma_m_*``), ``kappa_*``, ``laser_wavelength_m``,
``laser_power_w``, ``detuning0_*``, ``temperature_k``, ``hopping_*`` and the
optional ``branch`` and ``allow_low_q``.
"""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .entanglement import ALL_BIPARTITIONS, Bipartition
from .errors import ConfigError, OptoEntError
from .model import (EffectiveParams, ModelInput, PhysicalCavityParams,
                    mean_thermal_occupation)
from .sweep import UNSTABLE_POLICIES, Axis, SweepSpec
from .units import split_rate_key, to_rad_s

_EFFECTIVE_RATE_KEYS = ("gamma_m", "kappa", "detuning", "coupling")
_PHYSICAL_PLAIN_KEYS = {
    "cavity_length_m": "cavity_length",
    "mirror_mass_kg": "mirror_mass",
    "laser_wavelength_m": "laser_wavelength",
    "laser_power_w": "laser_power",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration: one model point plus optional sweep axes and output options."""

    model: ModelInput
    axes: tuple[Axis, ...] = ()
    unstable_policy: str = "flag"
    output_path: str | None = None
    precision: int | None = None
    bipartitions: tuple[Bipartition, ...] = field(default=ALL_BIPARTITIONS)

    def sweep_spec(self) -> SweepSpec:
        if not self.axes:
            raise ConfigError("configuration defines no [[sweep.axis]] entries")
        return SweepSpec(self.model, self.axes, self.bipartitions, self.unstable_policy)


class _Ctx:
    """Error reporting with the source line of the offending key when known."""

    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def line_of(self, key: str) -> int | None:
        pat = re.compile(rf'^\s*"?{re.escape(key)}"?\s*=')
        for n, line in enumerate(self.lines, 1):
            if pat.match(line):
                return n
        return None

    def error(self, where: str, msg: str, key: str | None = None) -> ConfigError:
        line = self.line_of(key or where.rsplit(".", 1)[-1])
        loc = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{loc}: {where}: {msg}")


def _number(ctx, where, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ctx.error(where, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ctx.error(where, f"must be finite, got {value!r}")
    return v


def _pair(ctx, where, value) -> tuple[float, float]:
    if isinstance(value, list):
        if len(value) != 2:
            raise ctx.error(where, f"per-cavity list needs 2 entries, got {len(value)}")
        return (_number(ctx, where, value[0]), _number(ctx, where, value[1]))
    v = _number(ctx, where, value)
    return (v, v)


class _Model:
    """Consumes keys from the ``[model]`` table, tracking what is left over."""

    def __init__(self, ctx, table):
        self.ctx = ctx
        self.left = dict(table)

    def check_keys(self, rate_bases, plain):
        for key in self.left:
            split = split_rate_key(key)
            if key not in plain and not (split and split[0] in rate_bases):
                raise self.ctx.error(f"model.{key}", "unknown key")

    def rate_key(self, base):
        found = [k for k in self.left if (s := split_rate_key(k)) and s[0] == base]
        if len(found) > 1:
            raise self.ctx.error(f"model.{found[1]}", f"{base} given twice ({', '.join(found)})")
        return found[0] if found else None

    def rate(self, base, omega_ref, *, required=True, shared=False, relative=True):
        key = self.rate_key(base)
        if key is None:
            if required:
                raise self.ctx.error(
                    "model", f"missing {base}_<unit> (one of _hz, _rad_s, _over_omega_m)", base)
            return None
        where = f"model.{key}"
        suffix = split_rate_key(key)[1]
        if suffix == "_over_omega_m" and not relative:
            raise self.ctx.error(where, f"{base} must be given in _hz or _rad_s")
        raw = self.left.pop(key)
        vals = (_number(self.ctx, where, raw),) if shared else _pair(self.ctx, where, raw)
        out = tuple(to_rad_s(v, suffix, omega_ref) for v in vals)
        return out[0] if shared else out

    def plain(self, key, *, required=True, default=None, pair=True):
        if key not in self.left:
            if required:
                raise self.ctx.error("model", f"missing {key}", key)
            return default
        raw = self.left.pop(key)
        where = f"model.{key}"
        return _pair(self.ctx, where, raw) if pair else _number(self.ctx, where, raw)

    def finish(self):
        if self.left:
            key = sorted(self.left)[0]
            raise self.ctx.error(f"model.{key}", "unknown key")


def _parse_effective(m: _Model) -> ModelInput:
    m.check_keys({"mech_freq", "hopping", *_EFFECTIVE_RATE_KEYS},
                 {"thermal_occupation", "temperature_k"})
    wm = m.rate("mech_freq", None, relative=False)
    ref = wm[0]
    rates = {k: m.rate(k, ref) for k in _EFFECTIVE_RATE_KEYS}
    hopping = m.rate("hopping", ref, required=False, shared=True) or 0.0
    if "thermal_occupation" in m.left and "temperature_k" in m.left:
        raise m.ctx.error("model.temperature_k",
                          "give thermal_occupation or temperature_k, not both")
    temps = m.plain("temperature_k", required=False)
    if temps is not None:
        nth = tuple(mean_thermal_occupation(t, w) for t, w in zip(temps, wm))
    else:
        nth = m.plain("thermal_occupation", required=False, default=(0.0, 0.0))
    m.finish()
    try:
        params = EffectiveParams(
            mech_freq=wm, mech_damping=rates["gamma_m"], cavity_decay=rates["kappa"],
            effective_detuning=rates["detuning"], effective_coupling=rates["coupling"],
            hopping=hopping, thermal_occupation=nth)
    except OptoEntError as exc:
        raise m.ctx.error("model", str(exc), "mode") from exc
    return ModelInput("effective", effective=params)


def _parse_physical(m: _Model) -> ModelInput:
    ctx = m.ctx
    m.check_keys({"mech_freq", "kappa", "detuning0", "gamma_m", "hopping"},
                 {*_PHYSICAL_PLAIN_KEYS, "mech_quality", "temperature_k", "branch",
                  "allow_low_q"})
    wm = m.rate("mech_freq", None, relative=False)
    ref = wm[0]
    plain = {name: m.plain(key) for key, name in _PHYSICAL_PLAIN_KEYS.items()}
    kappa = m.rate("kappa", ref)
    det0 = m.rate("detuning0", ref)
    gamma = m.rate("gamma_m", ref, required=False)
    if gamma is not None and "mech_quality" in m.left:
        raise ctx.error("model.mech_quality", "give mech_quality or gamma_m_<unit>, not both")
    if gamma is not None:
        if min(gamma) <= 0:
            raise ctx.error("model", "gamma_m must be positive", "gamma_m")
        quality = tuple(w / g for w, g in zip(wm, gamma))
    else:
        quality = m.plain("mech_quality")
    temps = m.plain("temperature_k", required=False, default=(0.0, 0.0))
    hopping = m.rate("hopping", ref, required=False, shared=True) or 0.0
    branch = m.left.pop("branch", None)
    allow_low_q = m.left.pop("allow_low_q", False)
    if not isinstance(allow_low_q, bool):
        raise ctx.error("model.allow_low_q", "expected true or false")
    m.finish()
    cavs = []
    for j in range(2):
        try:
            cavs.append(PhysicalCavityParams(
                cavity_length=plain["cavity_length"][j], mirror_mass=plain["mirror_mass"][j],
                mech_freq=wm[j], mech_quality=quality[j], cavity_decay=kappa[j],
                laser_wavelength=plain["laser_wavelength"][j], laser_power=plain["laser_power"][j],
                cavity_detuning_bare=det0[j], temperature=temps[j], allow_low_q=allow_low_q))
        except OptoEntError as exc:
            raise ctx.error(f"model (cavity {j + 1})", str(exc), "mode") from exc
    try:
        return ModelInput("physical", physical=tuple(cavs), hopping=hopping, branch=branch)
    except OptoEntError as exc:
        raise ctx.error("model", str(exc), "mode") from exc


def _parse_axes(ctx, sweep) -> tuple[Axis, ...]:
    raw = sweep.get("axis", [])
    if not isinstance(raw, list):
        raise ctx.error("sweep.axis", "use [[sweep.axis]] array-of-tables entries", "axis")
    axes = []
    for n, entry in enumerate(raw):
        where = f"sweep.axis[{n}]"
        unknown = set(entry) - {"path", "values", "start", "stop", "num"}
        if unknown:
            raise ctx.error(f"{where}.{sorted(unknown)[0]}", "unknown key")
        path = entry.get("path")
        if not isinstance(path, str):
            raise ctx.error(f"{where}.path", "missing or non-string path", "path")
        if "values" in entry:
            if {"start", "stop", "num"} & set(entry):
                raise ctx.error(f"{where}.values", "give values or start/stop/num, not both")
            if not isinstance(entry["values"], list):
                raise ctx.error(f"{where}.values", "expected a list")
            values = tuple(_number(ctx, f"{where}.values", v) for v in entry["values"])
        else:
            try:
                start, stop, num = entry["start"], entry["stop"], entry["num"]
            except KeyError as exc:
                raise ctx.error(where, f"missing {exc.args[0]}", "path") from None
            if isinstance(num, bool) or not isinstance(num, int) or num < 1:
                raise ctx.error(f"{where}.num", "expected a positive integer")
            values = tuple(np.linspace(_number(ctx, f"{where}.start", start),
                                       _number(ctx, f"{where}.stop", stop), num).tolist())
        try:
            axes.append(Axis(path, values))
        except (OptoEntError, ValueError) as exc:
            raise ctx.error(f"{where}.path", str(exc), "path") from exc
    if len(axes) > 2:
        raise ctx.error("sweep.axis", f"at most 2 axes are supported, got {len(axes)}", "path")
    return tuple(axes)


def loads(text: str, source: str = "<config>") -> RunConfig:
    """Parse a configuration string.

    Raises
    ------
    ConfigError
        With ``source:line: field: reason`` diagnostics.
    """
    ctx = _Ctx(text, source)
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    unknown = set(doc) - {"model", "sweep", "output"}
    if unknown:
        key = sorted(unknown)[0]
        raise ctx.error(key, "unknown section or key")
    model_tbl = doc.get("model")
    if not isinstance(model_tbl, dict):
        raise ConfigError(f"{source}: missing [model] section")
    m = _Model(ctx, model_tbl)
    mode = m.left.pop("mode", "effective")
    if mode == "effective":
        if "branch" in m.left:
            raise ctx.error("model.branch", "only meaningful in physical mode")
        model = _parse_effective(m)
    elif mode == "physical":
        model = _parse_physical(m)
    else:
        raise ctx.error("model.mode", f"expected 'effective' or 'physical', got {mode!r}")

    sweep = doc.get("sweep", {})
    unknown = set(sweep) - {"axis", "unstable_policy"}
    if unknown:
        raise ctx.error(f"sweep.{sorted(unknown)[0]}", "unknown key")
    axes = _parse_axes(ctx, sweep)
    policy = sweep.get("unstable_policy", "flag")
    if policy not in UNSTABLE_POLICIES:
        raise ctx.error("sweep.unstable_policy", f"expected one of {UNSTABLE_POLICIES}")

    out = doc.get("output", {})
    unknown = set(out) - {"path", "precision", "bipartitions"}
    if unknown:
        raise ctx.error(f"output.{sorted(unknown)[0]}", "unknown key")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ctx.error("output.path", "expected a string")
    precision = out.get("precision")
    if precision is not None and (isinstance(precision, bool) or not isinstance(precision, int)
                                  or not 1 <= precision <= 17):
        raise ctx.error("output.precision", "expected an integer in [1, 17]")
    try:
        bps = tuple(Bipartition.parse(b) for b in out.get("bipartitions",
                                                          [b.name for b in ALL_BIPARTITIONS]))
    except ValueError as exc:
        raise ctx.error("output.bipartitions", str(exc)) from None
    if not bps:
        raise ctx.error("output.bipartitions", "must not be empty")

    cfg = RunConfig(model, axes, policy, path, precision, bps)
    if axes:
        try:
            cfg.sweep_spec()
        except OptoEntError as exc:
            raise ctx.error("sweep.axis", str(exc), "path") from exc
    return cfg


def load(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
    return loads(text, source=str(p))


def _emit(pair):
    return pair[0] if pair[0] == pair[1] else list(pair)


def to_dict(cfg: RunConfig) -> dict:
    """Canonical document: rates in rad/s, axes as explicit value lists."""
    mi = cfg.model
    if mi.mode == "effective":
        p = mi.effective
        model = {
            "mode": "effective",
            "mech_freq_rad_s": _emit(p.mech_freq),
            "gamma_m_rad_s": _emit(p.mech_damping),
            "kappa_rad_s": _emit(p.cavity_decay),
            "detuning_rad_s": _emit(p.effective_detuning),
            "coupling_rad_s": _emit(p.effective_coupling),
            "hopping_rad_s": p.hopping,
            "thermal_occupation": _emit(p.thermal_occupation),
        }
    else:
        c1, c2 = mi.physical

        def both(attr):
            return _emit((getattr(c1, attr), getattr(c2, attr)))

        model = {
            "mode": "physical",
            "cavity_length_m": both("cavity_length"),
            "mirror_mass_kg": both("mirror_mass"),
            "mech_freq_rad_s": both("mech_freq"),
            "mech_quality": both("mech_quality"),
            "kappa_rad_s": both("cavity_decay"),
            "laser_wavelength_m": both("laser_wavelength"),
            "laser_power_w": both("laser_power"),
            "detuning0_rad_s": both("cavity_detuning_bare"),
            "temperature_k": both("temperature"),
            "hopping_rad_s": mi.hopping,
        }
        if mi.branch is not None:
            model["branch"] = mi.branch
        if c1.allow_low_q or c2.allow_low_q:
            model["allow_low_q"] = True
    doc = {"model": model}
    sweep = {"unstable_policy": cfg.unstable_policy}
    if cfg.axes:
        sweep["axis"] = [{"path": a.path, "values": list(a.values)} for a in cfg.axes]
    doc["sweep"] = sweep
    out = {"bipartitions": [b.name for b in cfg.bipartitions]}
    if cfg.output_path is not None:
        out["path"] = cfg.output_path
    if cfg.precision is not None:
        out["precision"] = cfg.precision
    doc["output"] = out
    return doc


def dumps(cfg: RunConfig) -> str:
    return tomli_w.dumps(to_dict(cfg))


def dump(cfg: RunConfig, path) -> None:
    Path(path).write_text(dumps(cfg), encoding="utf-8", newline="\n")
