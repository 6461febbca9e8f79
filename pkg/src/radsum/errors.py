"""Exception hierarchy for the radsum package.

Every error raised by the library is a subclass of RadsumError, so callers
(and the CLI) can distinguish "the check ran and failed" from "the inputs
were unusable".  Verification failures are reported through return values,
not exceptions; exceptions mean the question itself was ill-posed.
"""

from __future__ import annotations


class RadsumError(Exception):
    """Base class for all radsum errors."""


class InvalidParams(RadsumError):
    """Inputs are syntactically or semantically unusable."""


class DimensionTooLarge(RadsumError):
    """Weight vector exceeds the enumeration cap (n > 24)."""


class MismatchedVariance(RadsumError):
    """Exact values with incompatible radicands were combined."""


class NonpositiveT(RadsumError):
    """Scale parameter t must be positive."""


class GridNotMonotone(RadsumError):
    """A grid for the refined Chebyshev inequality is not sorted."""


class NotNormalizedGrid(RadsumError):
    """Chebyshev grid endpoints must satisfy c0=0, cn=1=d0."""


class PreconditionViolated(RadsumError):
    """A flip map was applied outside its guaranteed domain."""


class NotInImage(RadsumError):
    """Inverse flip requested for a vector outside the map's image."""


class HypothesisNotSatisfied(RadsumError):
    """A lemma's hypotheses do not hold for the given instance."""


class TooFewVariables(RadsumError):
    """Elimination requested more variables than are available."""


class ZeroResidualVariance(RadsumError):
    """Elimination would leave a residual sum with no variance."""


class RegionViolation(RadsumError):
    """Inputs fall outside the stated constraint region."""


class InvalidBounds(RadsumError):
    """Integration bounds or derivative bound are unusable."""


class MarginViolated(RadsumError):
    """A sequence step failed its required safety margin."""

    def __init__(self, index: int, message: str = "") -> None:
        self.index = index
        super().__init__(message or f"margin violated at index {index}")


class IdentityMismatch(RadsumError):
    """A certificate's decomposition does not reproduce its target."""


class UnjustifiedFactor(RadsumError):
    """A certificate factor's sign cannot be justified from the region."""


class RegionUnsatisfiable(RadsumError):
    """A certificate's constraint region has no interior point."""


class NetTooCoarse(RadsumError):
    """Grid certification: covering radius too large for the target."""


class PointwiseViolated(RadsumError):
    """Grid certification: a net point exceeds the pointwise bound."""

    def __init__(self, point: tuple, value: float, message: str = "") -> None:
        self.point = point
        self.value = value
        super().__init__(message or f"pointwise bound violated at {point}: {value}")


class InvalidPoint(RadsumError):
    """Function evaluated at a point outside its domain."""


class CaseStepFailed(RadsumError):
    """A step of a case-verification pipeline failed."""

    def __init__(self, step_id: str, message: str = "") -> None:
        self.step_id = step_id
        super().__init__(message or f"case step failed: {step_id}")


class OutOfRange(RadsumError):
    """Scalar argument outside the admissible range."""


class DegenerateInterval(RadsumError):
    """Witness construction requires a nondegenerate interval."""
