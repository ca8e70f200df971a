"""Exception hierarchy.

Every error carries a ``code`` naming its class of failure; the CLI echoes it
in the machine-readable error line.
"""


class ColselError(ValueError):
    code = "Error"
    # raised for invalid parameter values rather than bad input data
    usage = False

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def as_dict(self):
        return {"error": self.code, "message": str(self), **self.details}


class ZeroColumnError(ColselError):
    code = "ZeroColumn"


class NonFiniteEntryError(ColselError):
    code = "NonFiniteEntry"


class TooFewColumnsError(ColselError):
    code = "TooFewColumns"


class IndexOutOfRangeError(ColselError, IndexError):
    code = "IndexOutOfRange"


class IndexInTError(ColselError):
    code = "IndexInT"


class NotSymmetricError(ColselError):
    code = "NotSymmetric"


class DidNotConvergeError(ColselError, ArithmeticError):
    code = "DidNotConverge"


class PoleProximityError(ColselError):
    code = "PoleProximity"


class NoRootInIntervalError(ColselError):
    code = "NoRootInInterval"


class LambdaOutOfRangeError(ColselError):
    code = "LambdaOutOfRange"
    usage = True


class ParamOutOfRangeError(ColselError):
    code = "ParamOutOfRange"
    usage = True


class EmptyMatrixError(ColselError):
    code = "EmptyMatrix"


class StartIndexOutOfRangeError(ColselError):
    code = "StartIndexOutOfRange"


class KOutOfRangeError(ColselError):
    code = "KOutOfRange"
    usage = True


class RankOutOfRangeError(ColselError):
    code = "RankOutOfRange"
    usage = True


class EmptyResultsError(ColselError):
    code = "EmptyResults"


class RaggedRowsError(ColselError):
    code = "RaggedRows"


class NonNumericCellError(ColselError):
    code = "NonNumericCell"


class NotNormalizedError(ColselError):
    code = "NotNormalized"
