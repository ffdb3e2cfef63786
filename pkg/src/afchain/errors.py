"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment or network configuration (CLI exit code 2)."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class PrecisionEscalationRequired(ArithmeticError):
    """Double precision lost the structure of the computation; rerun with a
    big-float backend (CLI exit code 3)."""


class DegenerateFactorizationError(ArithmeticError):
    """QR hit a (numerically) rank-deficient column."""

    def __init__(self, column, message="rank-deficient column in QR factorization"):
        self.column = column
        super().__init__(f"{message} (column {column})")


class NotPositiveDefiniteError(ArithmeticError):
    """Cholesky hit a non-positive pivot."""

    def __init__(self, pivot, message="matrix is not positive definite"):
        self.pivot = pivot
        super().__init__(f"{message} (pivot {pivot})")


class NonHermitianError(ValueError):
    """Eigensolver input failed the Hermitian symmetry check."""

    def __init__(self, asymmetry):
        self.asymmetry = asymmetry
        super().__init__(
            f"matrix is not Hermitian (relative asymmetry {asymmetry:.3e})"
        )
