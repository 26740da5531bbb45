"""Exception types shared across the package."""


class DataError(Exception):
    """Raised when input data is malformed or a selection yields no data."""


class SingularCovarianceError(ValueError):
    """Raised when a series is degenerate (e.g. constant) and its covariance
    carries no usable signal."""
