import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from optoent.model import TWO_PI, EffectiveParams, ModelInput  # noqa: E402

WM = TWO_PI * 10e6

_ACCEPTANCE = {}


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    """Store one acceptance verdict; all are printed at the end of the run."""
    _ACCEPTANCE[number] = (title, passed, detail)


def acceptance_lines():
    for n in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[n]
        yield f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} -- {detail}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines():
        terminalreporter.write_line(line)


def effective(**kw):
    """Identical-cavity effective parameters in units of omega_m (10 MHz)."""
    base = dict(gamma_m=1e-5, kappa=0.5, detuning=1.0, coupling=0.3, hopping=0.0,
                thermal_occupation=0.0)
    base.update(kw)
    return EffectiveParams.from_normalized(WM, **base)


def effective_input(**kw):
    return ModelInput("effective", effective=effective(**kw))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
