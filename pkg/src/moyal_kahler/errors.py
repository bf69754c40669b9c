"""Structured error types shared across modules."""


class DegreeError(ValueError):
    """A polynomial exceeded the configured total-degree cap."""


class ParseError(ValueError):
    pass


class RealityError(ArithmeticError):
    """A quantity certified to be real carried an imaginary part."""


class ZeroDenominator(ZeroDivisionError):
    pass


class InconsistentC(ValueError):
    """The two Case II expressions for C disagree."""


class InconsistentAnsatz(ValueError):
    """A supplied coefficient contradicts a value fixed by the solver."""


class NonConstantEntries(ValueError):
    """Vierbein corrections depend on the coordinates."""


class DomainError(ValueError):
    pass


class SignError(ArithmeticError):
    """A squared Atiyah-Hitchin coefficient came out non-positive."""


class StepError(ValueError):
    pass


class LengthError(ValueError):
    pass


class ConfigError(ValueError):
    pass
