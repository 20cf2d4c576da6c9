class DomainError(ValueError):
    """Argument outside the domain of a formula."""


class QuadratureError(ArithmeticError):
    pass


class EmptyDiskError(ValueError):
    pass


class ROIViolation(ValueError):
    """A disk or ring query would leave the region where zeros are known."""


class CalibrationError(RuntimeError):
    pass


class DataError(ValueError):
    """Input file or data that cannot be used (format, encoding, sample rate)."""
