"""Unit-suffixed parameter names shared by the sweep axes and config files.

Frequency-like quantities carry one of three suffixes: ``_hz`` (the value
divided by 2 pi), ``_rad_s`` (angular) or ``_over_omega_m`` (in units of the
first mechanical frequency).
"""
from __future__ import annotations

import math
import re

from .errors import ConfigError

RATE_SUFFIXES = ("_rad_s", "_hz", "_over_omega_m")

_PATH_RE = re.compile(r"^(?P<key>[a-z0-9_]+?)(?:\[(?P<cav>[12])\])?$")


def split_rate_key(key: str) -> tuple[str, str] | None:
    """``"kappa_over_omega_m"`` -> ``("kappa", "_over_omega_m")``; None if unsuffixed."""
    for suffix in RATE_SUFFIXES:
        if key.endswith(suffix):
            return key[: -len(suffix)], suffix
    return None


def to_rad_s(value: float, suffix: str, omega_ref: float | None = None) -> float:
    if suffix == "_rad_s":
        return float(value)
    if suffix == "_hz":
        return 2.0 * math.pi * float(value)
    if suffix == "_over_omega_m":
        if omega_ref is None:
            raise ConfigError("normalised value given before the mechanical frequency is known")
        return float(value) * omega_ref
    raise ConfigError(f"unknown unit suffix {suffix!r}")


def parse_path(path: str) -> tuple[str, int | None]:
    """``"coupling_over_omega_m[2]"`` -> ``("coupling_over_omega_m", 1)`` (0-based cavity)."""
    m = _PATH_RE.match(path.strip())
    if not m:
        raise ConfigError(f"malformed parameter path {path!r}")
    cav = m.group("cav")
    return m.group("key"), (int(cav) - 1 if cav else None)
