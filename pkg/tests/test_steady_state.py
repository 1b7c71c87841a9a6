import numpy as np
import pytest
from oracles import intensity_cubic_roots
from test_model import lab_cavity

from optoent.errors import NoConvergence, ParameterError
from optoent.model import TWO_PI, ModelInput, drive_amplitude, single_photon_coupling
from optoent.steady_state import (StationaryProblem, decoupled_intensity_roots,
                                  fixed_point_residual, solve_stationary, solve_steady_state)

WM = TWO_PI * 10e6


def toy(drive, detuning0, shift=1.0, kappa=1.0, hopping=0.0):
    """Dimensionless single-parameter family; identical cavities unless pairs are given."""
    return StationaryProblem(g=np.sqrt(shift), drive=drive, kappa=kappa,
                             detuning0=detuning0, mech_freq=1.0, hopping=hopping)


def oracle(problem, j=0):
    return intensity_cubic_roots(problem.shift[j], abs(problem.drive[j]), problem.kappa[j],
                                 problem.detuning0[j])


@pytest.mark.parametrize("drive,d0", [(0.5, 0.0), (2.0, 1.0), (3.0, -1.0), (5.0, 2.5)])
def test_monostable_matches_cubic_oracle(drive, d0):
    pr = toy(drive, d0)
    st = solve_stationary(pr)
    roots = oracle(pr)
    assert len(roots) == 1
    assert st.intensity == pytest.approx([roots[0]] * 2, rel=1e-10)
    assert st.branch == "unique"


def test_bistable_branches():
    pr = toy(drive=3.0, detuning0=4.0)
    roots = oracle(pr)
    assert len(roots) == 3
    lo = solve_stationary(pr, branch="lower")
    hi = solve_stationary(pr, branch="upper")
    assert lo.intensity[0] == pytest.approx(roots[0], rel=1e-10)
    assert hi.intensity[0] == pytest.approx(roots[2], rel=1e-10)
    assert (lo.branch, hi.branch) == ("lower", "upper")
    # adiabatic ramp from zero power stays on the lower branch
    assert solve_stationary(pr).intensity[0] == pytest.approx(roots[0], rel=1e-10)


def test_decoupled_roots_agree_with_oracle():
    pr = toy(drive=3.0, detuning0=4.0)
    ours = decoupled_intensity_roots(pr)[0]
    assert ours == pytest.approx(oracle(pr), rel=1e-12)


def test_hopping_solution_solves_coupled_field_equations():
    pr = StationaryProblem(g=np.sqrt([1.0, 0.7]), drive=[2.0, 1.5], kappa=[1.0, 0.8],
                           detuning0=[1.5, 0.5], mech_freq=1.0, hopping=0.6)
    st = solve_stationary(pr)
    a = np.array(st.amp)
    delta = pr.detuning0 - pr.shift * np.abs(a) ** 2
    alpha = pr.kappa + 1j * delta
    lhs = alpha * a - 1j * pr.hopping * a[::-1]
    assert np.abs(lhs - pr.drive).max() <= 1e-10 * np.abs(pr.drive).max()
    assert st.eff_detuning == pytest.approx(delta, rel=1e-12)
    assert fixed_point_residual(st, pr) <= 1e-12


def test_identical_cavities_are_symmetric_and_swap_covariant():
    pr = toy(drive=2.0, detuning0=1.0, hopping=0.5)
    st = solve_stationary(pr)
    assert st.amp[0] == pytest.approx(st.amp[1], rel=1e-12)
    asym = StationaryProblem(g=np.sqrt([1.0, 0.5]), drive=[2.0, 1.0], kappa=[1.0, 0.6],
                             detuning0=[1.0, 0.3], mech_freq=1.0, hopping=0.4)
    a = solve_stationary(asym)
    b = solve_stationary(asym.swapped())
    assert b.amp[::-1] == pytest.approx(a.amp, rel=1e-10)


def test_zero_drive():
    st = solve_stationary(toy(drive=0.0, detuning0=1.0, hopping=0.3))
    assert st.amp == (0j, 0j)
    assert st.eff_detuning == (1.0, 1.0)


def test_lab_point_crosses_a_fold_and_lands_on_the_unique_root():
    cav = lab_cavity()  # 50 mW
    mi = ModelInput("physical", physical=(cav, cav))
    st = solve_steady_state(mi)
    g = single_photon_coupling(cav)
    roots = intensity_cubic_roots(g * g / cav.mech_freq, drive_amplitude(cav),
                                  cav.cavity_decay, cav.cavity_detuning_bare)
    assert len(roots) == 1
    assert st.intensity == pytest.approx([roots[0]] * 2, rel=1e-10)
    assert st.branch == "unique"
    assert len(st.fold_fractions) >= 1
    assert 0.0 < st.fold_fractions[0] < 1.0
    assert st.mech_pos[0] == pytest.approx(g * roots[0] / cav.mech_freq, rel=1e-10)


def test_branch_argument_validation():
    with pytest.raises(ParameterError):
        solve_stationary(toy(1.0, 1.0), branch="middle")


def test_iteration_budget_is_enforced():
    with pytest.raises(NoConvergence):
        solve_stationary(toy(drive=3.0, detuning0=4.0, hopping=0.2), max_iter=3)


def test_model_input_branch_is_honoured():
    cav = lab_cavity(laser_power=0.22, cavity_detuning_bare=3 * WM)  # u = s|E|^2/k^3 ~ 20
    g = single_photon_coupling(cav)
    roots = intensity_cubic_roots(g * g / cav.mech_freq, drive_amplitude(cav),
                                  cav.cavity_decay, cav.cavity_detuning_bare)
    assert len(roots) == 3
    mi = ModelInput("physical", physical=(cav, cav), branch="upper")
    assert solve_steady_state(mi).intensity[0] == pytest.approx(roots[2], rel=1e-10)
