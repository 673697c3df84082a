"""Exception types shared across the package."""


class FocusFocusError(Exception):
    """Base class for all domain errors raised by this package."""


# --- formal engine ---------------------------------------------------------

class NonCritical(FocusFocusError):
    """Input series has terms of degree 0 or 1, so the origin is not a
    critical point of the pair."""


class DegenerateLeading(FocusFocusError):
    """Quadratic parts are not an invertible combination of the model pair."""


class NonCommuting(FocusFocusError):
    """The two input series do not Poisson-commute up to the truncation order."""


class GeneratorTooLow(FocusFocusError):
    """Generator series has terms of degree < 3, so exp(ad) need not converge
    degree by degree."""


class CocycleViolation(FocusFocusError):
    """The cross-commuting compatibility between the two homogeneous
    remainders fails at some monomial."""

    def __init__(self, index, message=""):
        self.index = index
        super().__init__(message or f"cross-commuting relation fails at {index}")


class NonResonantTerm(FocusFocusError):
    """A series expected to commute with both model Hamiltonians carries a
    non-resonant monomial."""


class NonRealCoefficient(FocusFocusError):
    """A resonant series produced a bivariate coefficient with nonzero
    imaginary part."""


# --- numeric laboratory ----------------------------------------------------

class EvalAtOrigin(FocusFocusError):
    """The right-inverse vector field was evaluated at the origin, where the
    1/rho^2 factor is singular."""


class OnSingularAxis(FocusFocusError):
    """Transport time is undefined where z1 = 0 or z2 = 0."""


class StepOverflow(FocusFocusError):
    """Numeric flow escaped the chart (trajectory norm exceeded the bound)."""


class CrossCommutingViolation(FocusFocusError):
    """Finite-difference check of the cross-commuting condition failed."""

    def __init__(self, message, worst_point=None, deviation=None):
        self.worst_point = worst_point
        self.deviation = deviation
        super().__init__(message)


class VerificationFailure(FocusFocusError):
    """Reconstructed solution failed its bracket residual check."""

    def __init__(self, message, worst_point=None, residual=None):
        self.worst_point = worst_point
        self.residual = residual
        super().__init__(message)


# --- input handling --------------------------------------------------------

class ParseError(FocusFocusError):
    """Malformed system document (bad JSON, bad exponent list, bad rational)."""


class ValidationError(FocusFocusError):
    """Well-formed document that violates a system precondition."""
