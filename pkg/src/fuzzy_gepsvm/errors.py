"""Exception hierarchy shared by all modules."""


class GepsvmError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(GepsvmError, ValueError):
    pass


class NonFiniteInput(GepsvmError, ValueError):
    pass


class NotSymmetric(GepsvmError, ValueError):
    pass


class NotPositiveDefinite(GepsvmError, ArithmeticError):
    pass


class DegenerateDenominator(GepsvmError, ArithmeticError):
    """The denominator matrix of a Rayleigh quotient vanishes."""


class NonFiniteResult(GepsvmError, ArithmeticError):
    """A kernel evaluation overflowed or is undefined (negative base, real power)."""


class EmptyClass(GepsvmError, ValueError):
    pass


class DegenerateCenters(GepsvmError, ArithmeticError):
    """The two class centers coincide."""


class PointOnOtherCenter(GepsvmError, ArithmeticError):
    pass


class WeightLengthMismatch(GepsvmError, ValueError):
    pass


class InvalidSpace(GepsvmError, ValueError):
    pass


class ObjectiveFailure(GepsvmError, RuntimeError):
    def __init__(self, index, cause):
        super().__init__(f"objective failed for organism {index}: {cause!r}")
        self.index = index
        self.cause = cause


class ParseError(GepsvmError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


class NotBinary(GepsvmError, ValueError):
    pass


class MissingValue(ParseError):
    pass


class TooFewSamples(GepsvmError, ValueError):
    pass


class LengthMismatch(GepsvmError, ValueError):
    pass


class FoldError(GepsvmError, RuntimeError):
    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause
