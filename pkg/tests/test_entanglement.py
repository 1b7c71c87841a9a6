import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import pt_theta_minus, random_physical_cm, random_symplectic, tmsv

from optoent.entanglement import (ALL_BIPARTITIONS, Bipartition, ReducedCM, check_physicality,
                                  chi_and_det, entanglement, extract_bipartition,
                                  log_negativity, log_negativity_from_theta, simon_criterion,
                                  theta_minus)
from optoent.errors import NegativeRadicand


@pytest.mark.parametrize("r", [0.0, 0.1, 0.5, 1.0, 2.0])
def test_tmsv(r):
    z = tmsv(r)
    assert theta_minus(z) == pytest.approx(np.exp(-2 * r) / 2, abs=1e-12)
    assert log_negativity(z) == pytest.approx(2 * r, abs=1e-10)


def test_vacuum_is_boundary():
    res = entanglement(0.5 * np.eye(4))
    assert res.theta_minus == pytest.approx(0.5)
    assert res.log_negativity == 0.0
    assert res.boundary and not res.simon_entangled


def test_thermal_product_state():
    z = np.diag([3.0, 3.0, 7.0, 7.0])
    res = entanglement(z)
    assert res.theta_minus == pytest.approx(3.0)
    assert res.log_negativity == 0.0 and not res.simon_entangled


def test_local_symplectic_invariance():
    rng = np.random.default_rng(4)
    z = tmsv(0.6)
    s = np.zeros((4, 4))
    s[:2, :2] = random_symplectic(rng, 1)
    s[2:, 2:] = random_symplectic(rng, 1)
    assert theta_minus(s @ z @ s.T) == pytest.approx(theta_minus(z), rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), squeeze=st.floats(0.01, 1.2))
def test_theta_minus_matches_partial_transpose_spectrum(seed, squeeze):
    z = random_physical_cm(np.random.default_rng(seed), squeeze=squeeze)
    th = theta_minus(z)
    assert th == pytest.approx(pt_theta_minus(z), rel=1e-8, abs=1e-10)
    assert th >= 0
    if abs(th - 0.5) > 1e-8:
        assert simon_criterion(z) == (th < 0.5)
    assert log_negativity(z) == pytest.approx(max(0.0, -np.log(2 * pt_theta_minus(z))),
                                              abs=1e-8)


def test_chi_and_det():
    z = tmsv(0.3)
    chi, det = chi_and_det(z)
    ch, sh = np.cosh(0.6), np.sinh(0.6)
    assert chi == pytest.approx(2 * 0.25 * ch**2 + 2 * 0.25 * sh**2, rel=1e-14)
    assert det == pytest.approx(1 / 16, rel=1e-12)


def test_negative_radicand():
    # symmetric but far from any covariance matrix
    bad = np.array([[1.0, 0, 0, 0], [0, -1.0, 0, 0], [0, 0, 1.0, 0], [0, 0, 0, 1.0]])
    bad[0, 2] = bad[2, 0] = 3.0
    with pytest.raises(NegativeRadicand):
        theta_minus(bad)


def test_log_negativity_from_theta_edges():
    assert log_negativity_from_theta(1.0) == 0.0
    assert log_negativity_from_theta(0.0) == np.inf


def test_bipartition_extraction_and_parse():
    z = np.arange(64.0).reshape(8, 8)
    z = z + z.T
    r = extract_bipartition(z, "mech_mech")
    np.testing.assert_array_equal(r.matrix, z[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])])
    assert isinstance(r, ReducedCM)
    assert Bipartition.parse("opt_opt").indices == (2, 3, 6, 7)
    assert len(ALL_BIPARTITIONS) == 4
    with pytest.raises(ValueError):
        Bipartition.parse("mech_opt")


def test_physicality():
    assert check_physicality(0.5 * np.eye(8))
    assert not check_physicality(0.4 * np.eye(8))
    assert check_physicality(tmsv(1.5))
    with pytest.raises(ValueError):
        check_physicality(np.eye(3))
