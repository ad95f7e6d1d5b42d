"""Exception hierarchy shared by all modules."""


class PairingLabError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteValue(PairingLabError):
    """An evaluator produced NaN or infinity where a finite number was required."""


class ToleranceNotMet(PairingLabError):
    """Adaptive refinement stalled above the requested tolerance."""


class AssumptionViolation(PairingLabError):
    """A vector field violates one of its declared structural assumptions."""

    def __init__(self, clause, message):
        self.clause = clause
        super().__init__(f"[{clause}] {message}")


class DegenerateLevel(PairingLabError):
    """The requested level coincides with a plateau value of the function."""


class WindowTooLarge(PairingLabError):
    """Mollification radius exceeds the distance to the domain boundary."""


class FormMismatch(PairingLabError):
    """The two equivalent forms of the distributional pairing disagree."""


class CrossValidationMismatch(PairingLabError):
    """Two independent constructions of the same measure disagree."""


class BoundViolated(PairingLabError):
    """A proven inequality failed numerically; indicates an implementation bug."""


class InequalityViolated(PairingLabError):
    """A semicontinuity inequality failed beyond tolerance."""


class NoConvergence(PairingLabError):
    """A limiting procedure did not settle within the allowed depth.

    Carried as a diagnostic by some results instead of being raised.
    """


class CylAverageDiverged(NoConvergence):
    """A cylindrical average required by a construction did not converge."""


class NoApparentConvergence(PairingLabError):
    """A convergence table ends above the requested final-gap tolerance."""


class GapAboveTolerance(PairingLabError):
    """The relaxation gap exceeds the scenario tolerance."""


class NotSobolev(PairingLabError):
    """The function has a singular part where a W^{1,1} function was required."""


class UnknownCheck(PairingLabError):
    """The requested check name is not registered."""


class SpecError(PairingLabError):
    """A JSON scenario or component spec could not be parsed."""
