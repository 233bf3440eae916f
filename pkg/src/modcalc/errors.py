"""Exception hierarchy shared by every modcalc module."""


class ModcalcError(Exception):
    """Base class for all kernel errors."""


class ExpressionSyntaxError(ModcalcError, SyntaxError):
    """Malformed expression text. ``position`` is a 0-based character offset."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(ModcalcError):
    def __init__(self, name, position=0):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


class DivisionByZeroFunction(ModcalcError, ZeroDivisionError):
    pass


class PoleAtPoint(ModcalcError, ZeroDivisionError):
    pass


class IndexOutOfRange(ModcalcError, IndexError):
    pass


class ChartMismatch(ModcalcError):
    pass


class FrameMismatch(ModcalcError):
    pass


class NotTopGrade(ModcalcError):
    pass


class DegenerateVolume(ModcalcError):
    pass


class WrongBidegree(ModcalcError):
    pass


class NotLeafTangent(ModcalcError):
    pass


class NotPoisson(ModcalcError):
    pass


class NotCoupling(ModcalcError):
    pass


class DegenerateCouplingForm(ModcalcError):
    pass


class GaugeNotInvertible(ModcalcError):
    pass


class GaugeSingularAtSample(ModcalcError):
    pass


class NotClosedCertificate(ModcalcError):
    pass


class NotCasimirValued(ModcalcError):
    pass


class LeafConditionViolated(ModcalcError):
    pass


class SingularMatrix(ModcalcError):
    pass


class ScenarioError(ModcalcError):
    """Problems found while loading a scenario file."""


class ScenarioSyntaxError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class UnknownCheckName(ScenarioError):
    pass


class UnresolvedReference(ScenarioError):
    pass


class SampleViolatesAssertion(ScenarioError):
    pass
