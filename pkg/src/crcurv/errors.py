"""Exception hierarchy shared by all crcurv modules."""


class CrcurvError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(CrcurvError):
    """Malformed expression text; carries the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    """Identifier that is neither a known function nor a valid variable."""


class ArityError(ExprSyntaxError):
    """Function called with the wrong number of arguments."""


class DomainError(CrcurvError):
    """Evaluation left the mathematical domain (log/sqrt of a nonpositive
    value, division by zero, stencil outside the chart box, ...)."""


class DimensionError(CrcurvError):
    """Array arguments with incompatible shapes."""


class ImmersionError(CrcurvError):
    """Chart Jacobian lost rank at an evaluation point."""


class CRSplitError(CrcurvError):
    """Tangent space does not split into complex + totally real parts at the
    configured tolerance, or the detected split contradicts the declaration."""


class NonOrthonormalFrame(CrcurvError):
    """A frame argument failed its orthonormality precondition."""


class BlockSizeError(CrcurvError):
    """Invalid block-size tuple for a subspace-tuple operation."""


class ObjectiveError(CrcurvError):
    """Optimization objective returned a non-finite value."""


class FeasibilityError(CrcurvError):
    """Re-orthogonalization of a plane tuple degenerated (pivot too small)."""


class NotJInvariant(CrcurvError):
    """A plane argument is not invariant under the complex structure."""


class BoundViolation(CrcurvError):
    """A user-supplied curvature bound is violated by the ambient space."""


class AmbientMismatch(CrcurvError):
    """Operation requires a different ambient curvature model."""


class ChartFileError(CrcurvError):
    """Malformed chart file; carries the 1-based line number."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
