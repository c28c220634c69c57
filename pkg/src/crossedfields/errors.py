"""Exception types shared across the library."""


class InvalidField(ValueError):
    """A field configuration violates the preconditions of an operation."""


class NonConvergence(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget.

    Carries the best available estimate and the achieved error bound.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoConvergence(RuntimeError):
    """The Hall-field fixed-point solver failed to converge.

    ``brackets`` lists any sign-change intervals of the residual that were
    found before giving up.
    """

    def __init__(self, message, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)


class SingularTensor(ArithmeticError):
    """A conductivity tensor with no invertible Hall structure."""


class IndexOutOfRange(IndexError):
    """A level or node index outside its documented range."""


class ParseError(ValueError):
    """Malformed configuration text; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(ValueError):
    """A parsed configuration violates an invariant."""
