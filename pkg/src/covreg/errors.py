"""Exception types shared across the package."""


class CovRegError(Exception):
    """Base class for all covreg errors."""


class InvalidDataError(CovRegError):
    """Input data violates a structural invariant (shape, finiteness, labels)."""


class DegenerateSampleError(CovRegError):
    """Too few observations for the requested estimator."""


class ZeroVarianceError(CovRegError):
    """A variable has zero (or negative) variance and cannot be rescaled."""


class AsymmetryError(CovRegError):
    """A matrix claimed to be symmetric is asymmetric beyond tolerance."""


class InvalidTargetError(CovRegError):
    """A target specification is invalid for the requested dimension."""


class NearSingularError(CovRegError):
    """A target parameter sits too close to the positive-definiteness boundary."""


class NotPositiveDefiniteError(CovRegError):
    """A matrix required to be positive definite failed factorization."""


class GroupingError(CovRegError):
    """Group labels are missing, or a group is too small for the operation."""


class ConfigError(CovRegError):
    """An experiment configuration is invalid."""


class CsvFormatError(CovRegError):
    """A CSV input file is malformed; the message carries row/column coordinates."""
