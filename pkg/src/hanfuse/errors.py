"""Exception hierarchy.

Everything raised on bad input data derives from :class:`DataError` so the
command line can map it onto a single exit status.
"""


class HanfuseError(Exception):
    pass


class DataError(HanfuseError):
    """Invalid or inconsistent input data."""


class NumericError(HanfuseError):
    """Training or inference produced non-finite values."""


class MalformedLine(DataError):
    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class InvalidCode(DataError):
    pass


class NotSingleChar(DataError):
    pass


class InvalidSyllable(DataError):
    pass


class BadHeader(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class ParseFloatError(DataError):
    pass


class EmptyIntersection(DataError):
    pass


class UnknownCharacter(DataError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidLetter(DataError, ValueError):
    pass


class UnknownInitial(DataError):
    pass


class KTooLarge(DataError, ValueError):
    pass


class EmptySentence(DataError, ValueError):
    pass


class ShapeMismatch(DataError, ValueError):
    pass


class StrategyMismatch(DataError, ValueError):
    pass


class TagNotInTagSet(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class UnknownTagFormat(DataError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class EmptyNeighborPool(DataError):
    pass


class CheckpointError(DataError):
    pass
