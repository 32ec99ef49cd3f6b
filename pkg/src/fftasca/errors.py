"""Exception and warning types shared across the package."""


class FftascaError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(FftascaError):
    """Operands have incompatible shapes."""


class NonConvergence(FftascaError):
    """A matrix decomposition failed to converge."""


class EmptySignal(FftascaError):
    """A transform was requested on a zero-length signal."""


class DegenerateFactor(FftascaError):
    """A design factor has fewer than two observed levels."""


class ZeroResidual(FftascaError):
    """The residual sum of squares is zero; the model is saturated."""


class UnknownTerm(FftascaError):
    """A term name does not exist in the fitted model."""


class RankExceeded(FftascaError):
    """More components were requested than the matrix rank supports."""


class LengthMismatch(FftascaError):
    """A signal length does not match the expected source length."""


class ConfigInvalid(FftascaError):
    """A generator or pipeline configuration violates its constraints."""


class DomainError(FftascaError):
    """A numeric argument lies outside the function's domain."""


class ParseError(FftascaError):
    """A data file could not be parsed.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class IdMismatch(FftascaError):
    """Sample ids of two files do not agree; lists the offenders."""

    def __init__(self, message, missing_in_metadata=(), missing_in_data=()):
        super().__init__(message)
        self.missing_in_metadata = tuple(missing_in_metadata)
        self.missing_in_data = tuple(missing_in_data)


class RaggedRows(FftascaError):
    """Rows of a data file have unequal lengths."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class EmptySeries(FftascaError):
    """A plot was requested with no data series."""


class RankWarning(UserWarning):
    """The design matrix is column-rank deficient; the fit uses a pseudoinverse."""


class UnbalancedDesignWarning(UserWarning):
    """The design is unbalanced; sums of squares need not partition additively."""


class EmptyCellWarning(UserWarning):
    """A design cell had no observed value for some variable during imputation."""
