"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class LevelOverflowError(InvalidArgumentError):
    """A multi-index requires a univariate level the rule family does not hold."""

    def __init__(self, alpha, max_level):
        self.alpha = tuple(alpha)
        self.max_level = max_level
        super().__init__(
            f"index {self.alpha} needs level {max(self.alpha)} "
            f"but the rule family stops at level {max_level}"
        )


class NumericalGuardError(ArithmeticError):
    """Base class for failures detected by numerical safety checks."""


class IntegrandEvaluationError(NumericalGuardError):
    def __init__(self, point, value):
        self.point = point
        self.value = value
        super().__init__(f"integrand returned non-finite value {value!r} at {point!r}")


class EllipticityError(NumericalGuardError):
    """Diffusion coefficient is not bounded away from zero."""

    def __init__(self, message, y=None):
        self.y = y
        super().__init__(message if y is None else f"{message} (parameter {y!r})")


class NotPositiveSemidefiniteError(NumericalGuardError):
    pass
