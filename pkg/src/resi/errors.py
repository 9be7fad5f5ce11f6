"""Exception types raised across the package."""


class ResiError(Exception):
    """Base class for all package-specific errors."""


class NumericalError(ResiError):
    """A numerical routine failed to converge within its iteration budget."""


class SingularDesignError(ResiError):
    """Design matrix is rank deficient.

    The message names the first column that is (numerically) a linear
    combination of the preceding ones.
    """

    def __init__(self, column: int, message: str | None = None):
        self.column = column
        super().__init__(message or f"design matrix is rank deficient at column {column}")


class ConvergenceError(ResiError):
    """Iterative fit failed to converge; carries the last iterate."""

    def __init__(self, message: str, coefficients=None, iterations: int = 0):
        self.coefficients = coefficients
        self.iterations = iterations
        super().__init__(message)


class DegenerateLeverageError(ResiError):
    """A leverage value of exactly 1 makes the jackknife reweighting undefined."""


class SingularCovarianceError(ResiError):
    """The tested sub-block of a covariance estimate is not invertible."""


class NestingError(ResiError):
    """Reduced model is not strictly nested in the full model."""


class InvalidSpecError(ResiError):
    """A bootstrap scheme/multiplier combination that performs no resampling."""


class BootstrapFailureError(ResiError):
    """Too many bootstrap replicates failed to refit."""

    def __init__(self, failed: int, total: int):
        self.failed = failed
        self.total = total
        super().__init__(f"{failed} of {total} bootstrap replicates failed to refit (>1% threshold)")
