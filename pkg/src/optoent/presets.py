"""Figure presets: two-cavity sweeps over normalized hopping.

All presets use identical cavities with omega_m / 2pi = 10 MHz and
gamma_m / omega_m = 1e-5. Thermal occupations are derived from the
temperature and the mechanical frequency.
"""
from __future__ import annotations

import numpy as np

from .config import RunConfig
from .errors import ConfigError
from .model import TWO_PI, EffectiveParams, ModelInput, mean_thermal_occupation
from .sweep import Axis

MECH_FREQ = TWO_PI * 10e6
GAMMA_M = 1e-5
HOPPING_AXIS = Axis.linspace("hopping_over_omega_m", 0.0, 1.2, 201)
HOPPING_AXIS_2D = Axis.linspace("hopping_over_omega_m", 0.0, 1.2, 101)
TEMPERATURE_AXIS = Axis.linspace("temperature_k", 0.6, 30.0, 101)


def _base(*, kappa, detuning, coupling, temperature=0.6) -> ModelInput:
    nth = mean_thermal_occupation(temperature, MECH_FREQ)
    params = EffectiveParams.from_normalized(
        MECH_FREQ, gamma_m=GAMMA_M, kappa=kappa, detuning=detuning,
        coupling=coupling, hopping=0.0, thermal_occupation=nth)
    return ModelInput("effective", effective=params)


def _fig4(kappa: float) -> RunConfig:
    return RunConfig(_base(kappa=kappa, detuning=1.0, coupling=8.0),
                     axes=(TEMPERATURE_AXIS, HOPPING_AXIS_2D))


PRESETS = {
    "fig2": lambda: RunConfig(
        _base(kappa=0.5, detuning=1.0, coupling=4.0),
        axes=(Axis("coupling_over_omega_m", (1.0, 4.0, 8.0, 12.0)), HOPPING_AXIS)),
    "fig3": lambda: RunConfig(
        _base(kappa=0.5, detuning=1.0, coupling=10.0),
        axes=(Axis("detuning_over_omega_m", (0.8, 1.0, 1.1)), HOPPING_AXIS)),
    "fig4a": lambda: _fig4(0.5),
    "fig4b": lambda: _fig4(1.0),
    "fig4c": lambda: _fig4(1.5),
}


def preset(name: str) -> RunConfig:
    """Run configuration for a named figure preset.

    Parameters
    ----------
    name : {"fig2", "fig3", "fig4a", "fig4b", "fig4c"}

    Raises
    ------
    ConfigError
        Unknown preset name.
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory()


def peak_along_last_axis(values: np.ndarray) -> np.ndarray:
    """Maximum over the last grid axis, ignoring NaN (unstable) entries.

    Rows with no finite entry give NaN.
    """
    v = np.asarray(values, dtype=float)
    out = np.full(v.shape[:-1], np.nan)
    finite = np.isfinite(v).any(axis=-1)
    out[finite] = np.nanmax(v[finite], axis=-1)
    return out
