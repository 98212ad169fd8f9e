"""Exception hierarchy shared by the library and the CLI"""

from typing import Optional


class TendexError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it"""
    exit_code = 2


class DataError(TendexError, ValueError):
    """The input data cannot be processed as given"""
    exit_code = 2


class SeriesTooShort(DataError):
    pass


class ParseError(DataError):
    """A CSV value could not be parsed; ``line`` is 1-based"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NonFiniteValue(ParseError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyDecomposition(DataError):
    pass


class NotAnExtremum(DataError):
    pass


class NoInteriorExtrema(DataError):
    pass


class InvalidLambda(DataError):
    pass


class NumericalError(TendexError, ArithmeticError):
    """A computation became ill-posed"""
    exit_code = 3


class RankDeficient(NumericalError):
    pass


class NumericalBlowup(NumericalError):
    pass
