"""Stationary Gaussian entanglement in two optomechanical cavities coupled by photon hopping."""
from .dynamics import StabilityReport, build_diffusion, build_drift, spectral_abscissa, stability
from .entanglement import (ALL_BIPARTITIONS, Bipartition, EntanglementResult, ReducedCM,
                           check_physicality, entanglement, extract_bipartition,
                           log_negativity, simon_criterion, theta_minus)
from .errors import (ConfigError, EigenSolverFailure, IndefiniteCovarianceWarning,
                     LowQualityFactorError, MultistableAmbiguous, NegativeRadicand,
                     NoConvergence, OptoEntError, ParameterError, SingularSystem,
                     SteadyStateNotConverged, StepSizeUnderflow, UnstableDrift)
from .kernels import BACKEND
from .lyapunov import integrate_covariance_ode, lyapunov_residual, solve_lyapunov
from .model import (EffectiveParams, ModelInput, PhysicalCavityParams, drive_amplitude,
                    mean_thermal_occupation, single_photon_coupling, to_effective)
from .steady_state import SteadyState, StationaryProblem, solve_stationary, solve_steady_state
from .sweep import Axis, SweepRecord, SweepSpec, apply_parameter, evaluate_point, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ALL_BIPARTITIONS",
    "Axis",
    "BACKEND",
    "Bipartition",
    "ConfigError",
    "EffectiveParams",
    "EigenSolverFailure",
    "EntanglementResult",
    "IndefiniteCovarianceWarning",
    "LowQualityFactorError",
    "ModelInput",
    "MultistableAmbiguous",
    "NegativeRadicand",
    "NoConvergence",
    "OptoEntError",
    "ParameterError",
    "PhysicalCavityParams",
    "ReducedCM",
    "SingularSystem",
    "StabilityReport",
    "StationaryProblem",
    "SteadyState",
    "SteadyStateNotConverged",
    "StepSizeUnderflow",
    "SweepRecord",
    "SweepSpec",
    "UnstableDrift",
    "apply_parameter",
    "build_diffusion",
    "build_drift",
    "check_physicality",
    "drive_amplitude",
    "entanglement",
    "evaluate_point",
    "extract_bipartition",
    "integrate_covariance_ode",
    "log_negativity",
    "lyapunov_residual",
    "mean_thermal_occupation",
    "run_sweep",
    "simon_criterion",
    "single_photon_coupling",
    "solve_lyapunov",
    "solve_stationary",
    "solve_steady_state",
    "spectral_abscissa",
    "stability",
    "theta_minus",
    "to_effective",
    "__version__",
]
