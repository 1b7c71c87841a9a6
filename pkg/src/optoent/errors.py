"""Exception hierarchy shared across the pipeline."""


class OptoEntError(Exception):
    """Base class for all package errors."""


class ParameterError(OptoEntError, ValueError):
    """Parameters violate a domain invariant."""


class LowQualityFactorError(ParameterError):
    """Mechanical quality factor too small for the Markovian noise model.

    Raised when ``mech_quality < 100``. Pass ``allow_low_q=True`` to the
    constructor to downgrade it to a ``UserWarning``.
    """


class SteadyStateNotConverged(OptoEntError):
    """A supplied steady state does not satisfy the stationary equations."""


class NoConvergence(OptoEntError):
    """The stationary solver exceeded its iteration budget."""


class MultistableAmbiguous(OptoEntError):
    """Continuation crossed a fold and no branch was requested.

    ``branches`` holds, per cavity, the positive roots of the decoupled
    intensity cubic (photon numbers) so the caller can pick one.
    """

    def __init__(self, message, branches=None, fold_fractions=()):
        super().__init__(message)
        self.branches = branches
        self.fold_fractions = tuple(fold_fractions)


class EigenSolverFailure(OptoEntError):
    pass


class UnstableDrift(OptoEntError):
    """Lyapunov solve requested for a drift matrix that is not Hurwitz."""


class SingularSystem(OptoEntError):
    """Vectorised Lyapunov system is numerically singular."""


class StepSizeUnderflow(OptoEntError):
    pass


class NegativeRadicand(OptoEntError, ValueError):
    """Reduced covariance matrix gives a negative radicand for theta_minus."""


class ConfigError(OptoEntError):
    """Malformed run configuration; message carries the offending field."""


class IndefiniteCovarianceWarning(UserWarning):
    pass
