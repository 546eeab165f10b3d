"""Exception hierarchy shared by every stage of the fairgroup pipeline."""


class FairgroupError(Exception):
    """Base class for all library errors."""


class DataError(FairgroupError, ValueError):
    pass


class MissingColumnError(DataError):
    def __init__(self, name):
        super().__init__(f"missing column {name!r}")
        self.name = name


class ParseError(DataError):
    def __init__(self, row, column, value=None):
        msg = f"cannot parse row {row}, column {column!r}"
        if value is not None:
            msg += f": {value!r}"
        super().__init__(msg)
        self.row = row
        self.column = column


class EmptyFileError(DataError):
    pass


class NonBinaryValueError(DataError):
    def __init__(self, column, row):
        super().__init__(f"column {column!r} holds a non-binary value at row {row}")
        self.column = column
        self.row = row


class UnknownFeatureError(DataError, KeyError):
    def __init__(self, name):
        DataError.__init__(self, f"unknown feature {name!r}")
        self.name = name

    def __str__(self):
        return self.args[0]


class AlreadyBinaryError(DataError):
    pass


class InvalidConfigError(FairgroupError, ValueError):
    pass


class DegenerateDataError(FairgroupError, ValueError):
    pass


class NonFiniteLossError(FairgroupError, ArithmeticError):
    pass


class SchemaMismatchError(FairgroupError, ValueError):
    pass


class LengthMismatchError(FairgroupError, ValueError):
    pass


class TooFewPointsError(FairgroupError, ValueError):
    pass


class BadKError(FairgroupError, ValueError):
    pass


class ZeroPartError(FairgroupError, ValueError):
    pass


class EmptyPlanError(FairgroupError, ValueError):
    pass


class EmptyGroupError(FairgroupError, ValueError):
    pass


class MissingArtifactError(FairgroupError, FileNotFoundError):
    pass
