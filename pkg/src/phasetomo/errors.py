"""Exception hierarchy.

Two broad families matter to callers: configuration problems (rejected
before any computation, CLI exit code 2) and numeric-domain problems
(well-formed input hitting a singular or degenerate working point,
CLI exit code 3).
"""


class PhasetomoError(Exception):
    """Base class for all package errors."""


class ConfigError(PhasetomoError):
    """Invalid run configuration or malformed input value."""


class NumericDomainError(PhasetomoError):
    """Valid input at a singular/degenerate point of a formula."""


# -- state construction ------------------------------------------------------

class ZeroNormError(ConfigError):
    """State vector has (numerically) zero norm."""


class ZeroSumError(ConfigError):
    """Sum of amplitudes vanishes; the fixed post-selection is blind to it."""


# -- coupling / phase map ----------------------------------------------------

class DegenerateAlphaBetaError(NumericDomainError):
    """alpha^2 + beta^2 = 0: the phase map has no finite value."""


class BranchAmbiguityError(NumericDomainError):
    """alpha = beta = 0 leaves the phase branch undefined."""


class PoleAtPhaseError(NumericDomainError):
    """Amplitude-from-phase formula hit its pole."""


class SingularThetaError(NumericDomainError):
    """sin(theta) = 0: the three-probability reconstruction is singular."""


# -- estimation machinery ----------------------------------------------------

class SingularJacobianError(NumericDomainError):
    """Expectation-value Jacobian is not invertible at this working point."""


class DegenerateDistributionError(NumericDomainError):
    """Outcome distribution carries no information about any parameter."""


class SingularFisherError(NumericDomainError):
    """Fisher information matrix is numerically singular."""


class PoleAtGammaError(NumericDomainError):
    """alpha + i beta = 0: the amplitude ratio diverges."""


# -- spin / Dicke ------------------------------------------------------------

class HalfIntegerJError(NumericDomainError):
    """Closed-form Wigner route is defined for integer j (even N) only."""


class ComplexResidueError(NumericDomainError):
    """A moment that must be real came out with a large imaginary part."""


class DivergentVarianceError(NumericDomainError):
    """Limit procedure for a variance did not converge."""


# -- TR scheme / sampling ----------------------------------------------------

class SingularWorkingPointError(NumericDomainError):
    """Estimator slope vanishes here; no variance can be propagated."""


class UnsupportedRepresentationError(ConfigError):
    """Observable does not act on this pointer-state representation."""


class OutOfDomainMeanError(NumericDomainError):
    """Empirical mean fell outside the invertible range of the estimator."""


class IllConditionedReconstructionWarning(UserWarning):
    """Tiny (but nonzero) amplitude sum: reconstruction is ill conditioned."""
