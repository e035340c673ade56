"""Exception hierarchy shared by every module."""


class HerdiscError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(HerdiscError, ValueError):
    pass


class NotPSD(HerdiscError, ValueError):
    pass


class InvalidParameter(HerdiscError, ValueError):
    pass


class InvalidSpec(HerdiscError, ValueError):
    pass


class InvalidSubset(HerdiscError, ValueError):
    pass


class DimError(HerdiscError, ValueError):
    pass


class RankError(HerdiscError, ValueError):
    pass


class FormatError(HerdiscError, ValueError):
    pass


class ParseError(FormatError):
    """A CSV field could not be parsed as a real number (1-based row/col)."""

    def __init__(self, row, col, text, path=None):
        self.row = row
        self.col = col
        self.text = text
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}row {row}, col {col}: cannot parse {text!r} as a number")


class PreconditionError(HerdiscError, ValueError):
    pass


class ContractError(HerdiscError, RuntimeError):
    """A selection routine could not meet its guaranteed bound.

    ``achieved`` carries the best squared smallest singular value found, so
    callers can see how far off the result was.
    """

    def __init__(self, message, achieved=None, required=None):
        self.achieved = achieved
        self.required = required
        super().__init__(message)


class RationalizationError(PreconditionError):
    pass


class OracleTooLarge(HerdiscError, ValueError):
    """Exact enumeration refused because the instance exceeds a configured cap."""

    def __init__(self, what, size, cap, cap_name):
        self.what = what
        self.size = size
        self.cap = cap
        self.cap_name = cap_name
        super().__init__(f"{what}: size {size} exceeds {cap_name}={cap}")
