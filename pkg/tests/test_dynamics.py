import numpy as np
import pytest
from conftest import WM, effective
from oracles import hurwitz_stable

from optoent.dynamics import build_diffusion, build_drift, spectral_abscissa, stability
from optoent.errors import EigenSolverFailure


def test_drift_layout():
    p = effective(gamma_m=(1e-3, 2e-3), kappa=(0.5, 0.6), detuning=(1.0, 0.9),
                  coupling=(0.3, 0.4), hopping=0.2)
    c = build_drift(p) / WM
    blk1 = np.array([[0, 1, 0, 0],
                     [-1, -1e-3, 0.3, 0],
                     [0, 0, -0.5, 1.0],
                     [0.3, 0, -1.0, -0.5]])
    np.testing.assert_allclose(c[:4, :4], blk1, rtol=1e-15, atol=0)
    assert c[5, 5] == pytest.approx(-2e-3) and c[7, 4] == pytest.approx(0.4)
    hop = np.zeros((4, 4))
    hop[2, 3], hop[3, 2] = -0.2, 0.2
    np.testing.assert_allclose(c[:4, 4:], hop, atol=1e-16)
    np.testing.assert_allclose(c[4:, :4], hop, atol=1e-16)
    assert not build_drift(p).flags.writeable


def test_diffusion_layout():
    p = effective(gamma_m=1e-3, kappa=0.5, thermal_occupation=(10.0, 20.0))
    d = np.diag(build_diffusion(p)) / WM
    np.testing.assert_allclose(d, [0, 1e-3 * 21, 0.5, 0.5, 0, 1e-3 * 41, 0.5, 0.5], rtol=1e-14)


def test_hopping_only_couples_fields():
    p0 = effective(hopping=0.0)
    p1 = effective(hopping=0.7)
    diff = np.argwhere(build_drift(p1) != build_drift(p0))
    assert {tuple(x) for x in diff} == {(2, 7), (3, 6), (6, 3), (7, 2)}


def test_stability_agrees_with_routh_hurwitz():
    rng = np.random.default_rng(7)
    checked = stable = 0
    for _ in range(150):
        p = effective(gamma_m=10 ** rng.uniform(-4, -1), kappa=rng.uniform(0.1, 2.0),
                      detuning=rng.uniform(-2.0, 2.0), coupling=rng.uniform(0.0, 1.5),
                      hopping=rng.uniform(0.0, 1.5))
        c = np.array(build_drift(p)) / WM
        rep = stability(c)
        if abs(rep.spectral_abscissa) < 1e-6:
            continue  # too close to marginal for a sign comparison
        checked += 1
        stable += rep.stable
        assert rep.stable == hurwitz_stable(c)
    assert checked > 100 and 0 < stable < checked


@pytest.mark.parametrize("coupling,hopping,expected", [
    (1.0, 0.0, True), (4.0, 0.0, False), (4.0, 0.5, False), (8.0, 0.3, False),
    (12.0, 1.0, False),
])
def test_strong_coupling_regime_stability(coupling, hopping, expected):
    """At D = omega_m, kappa = omega_m/2 the single-cavity bound G^2 < kappa^2 + D^2
    fails for G >= 1.5."""
    p = effective(gamma_m=1e-5, kappa=0.5, detuning=1.0, coupling=coupling, hopping=hopping,
                  thermal_occupation=1250.0)
    c = np.array(build_drift(p)) / WM
    assert stability(c).stable is expected
    assert hurwitz_stable(c) is expected


def test_marginal_is_not_stable():
    p = effective(gamma_m=0.0, coupling=0.0)
    rep = stability(build_drift(p))
    assert not rep.stable
    assert "marginal" in rep.margin_note


def test_non_finite_drift():
    c = np.eye(8)
    c[0, 0] = np.nan
    with pytest.raises(EigenSolverFailure):
        spectral_abscissa(c)
