"""Exception types shared across the package."""


class CFError(Exception):
    """Base class for every error raised by cfcert."""


class RadicandMismatch(CFError, ValueError):
    pass


class PrecisionCapExceeded(CFError, ArithmeticError):
    """Raised when repeated precision doubling still cannot reach a target width."""


class CFExhausted(CFError, IndexError):
    """A finite continued fraction ran out of terms before the request was met."""


class ZeroDenominator(CFError, ZeroDivisionError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class RegularizationError(CFError, ValueError):
    pass


class ContractionError(CFError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class LiftError(CFError, ValueError):
    def __init__(self, message: str, index: int | None = None, stage: int | None = None):
        super().__init__(message)
        self.index = index
        self.stage = stage


class SeriesError(CFError, ArithmeticError):
    pass


class FamilyError(CFError, ValueError):
    def __init__(self, message: str, family: str | None = None):
        super().__init__(f"{family}: {message}" if family else message)
        self.family = family


class InvalidParams(FamilyError):
    def __init__(self, family: str, violations: list[str]):
        super().__init__("; ".join(violations), family)
        self.violations = list(violations)


class ParseError(CFError, ValueError):
    pass
