"""Exception types raised across the package."""


class DimensionMismatchError(ValueError):
    """Two vectors (or a vector and a support sample) differ in dimension."""


class DegenerateInputError(ValueError):
    """Input with a zero self-kernel where a normalisation is required."""


class PSDViolationError(ArithmeticError):
    """A quantity that must be nonnegative for a PSD kernel came out negative."""


class DomainError(ValueError):
    """A bound was evaluated outside the parameter range where it is defined."""


class UnsupportedRegimeError(ValueError):
    """An experiment was asked to verify a bound outside the exact identity-map regime."""


class InfeasibleError(ValueError):
    """No admissible delta gives a positive margin gap Delta.

    Attributes carry the diagnostics needed to see how far off the sample was.
    """

    def __init__(self, message, *, D=None, required_D=None, max_Delta=None):
        super().__init__(message)
        self.D = D
        self.required_D = required_D
        self.max_Delta = max_Delta
