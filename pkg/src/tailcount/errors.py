"""Exception hierarchy.

Every error carries a short ``code`` string which the command line tool
writes into its machine-readable error JSON.
"""


class TailCountError(ValueError):
    code = "TailCountError"


class MissingCellError(TailCountError):
    code = "MissingCell"


class NonNumericError(TailCountError):
    code = "NonNumeric"


class NegativeValueError(TailCountError):
    code = "NegativeValue"


class RaggedYearError(TailCountError):
    code = "RaggedYear"


class LengthMismatchError(TailCountError):
    code = "LengthMismatch"


class IndexOutOfRangeError(TailCountError):
    code = "IndexOutOfRange"


class DimensionTooSmallError(TailCountError):
    code = "DimensionTooSmall"


class EmptyGridError(TailCountError):
    code = "EmptyGrid"


class NonIncreasingGridError(TailCountError):
    code = "NonIncreasingGrid"


class TooFewPointsError(TailCountError):
    code = "TooFewPoints"


class DegenerateDesignError(TailCountError):
    code = "DegenerateDesign"


class NonpositiveThresholdError(TailCountError):
    code = "NonpositiveThreshold"


class AllReplicatesFailedError(TailCountError):
    code = "AllReplicatesFailed"


class TooFewReplicatesError(TailCountError):
    code = "TooFewReplicates"


class NonpositiveScaleError(TailCountError):
    code = "NonpositiveScale"


class DegenerateSeriesError(TailCountError):
    code = "DegenerateSeries"


class SeriesTooShortError(TailCountError):
    code = "SeriesTooShort"


class SingularDesignError(TailCountError):
    code = "SingularDesign"


class NoExceedancesError(TailCountError):
    code = "NoExceedances"


class InvalidConfigError(TailCountError):
    code = "InvalidConfig"


class UnsupportedConfigError(TailCountError):
    code = "UnsupportedConfig"


class InvalidIntervalError(TailCountError):
    code = "InvalidInterval"


class IoFailureError(TailCountError):
    code = "IoFailure"
