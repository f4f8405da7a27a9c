"""Exception hierarchy for the padicgrowth kernel."""


class PadicGrowthError(Exception):
    """Base class for all package errors."""


class DivisionByZero(PadicGrowthError):
    pass


class FieldMismatch(PadicGrowthError):
    pass


class IllegalExponent(PadicGrowthError):
    pass


class NegativeExponentOverflow(PadicGrowthError):
    pass


class ResidueObstruction(PadicGrowthError):
    pass


class NotAFrobeniusLift(PadicGrowthError):
    pass


class EmptySeries(PadicGrowthError):
    pass


class InsufficientSupport(PadicGrowthError):
    pass


class RelationNotSatisfied(PadicGrowthError):
    pass


class SingularA(PadicGrowthError):
    pass


class SingularMatrix(PadicGrowthError):
    pass


class FormMismatch(PadicGrowthError):
    pass


class ZeroTwist(PadicGrowthError):
    pass


class NonPolynomialEntry(PadicGrowthError):
    pass


class NotNilpotentResidue(PadicGrowthError):
    pass


class FrobeniusMatrixNotConstant(PadicGrowthError):
    pass


class DenominatorBlowup(PadicGrowthError):
    pass


class NonConvergent(PadicGrowthError):
    pass


class UnstableReduction(PadicGrowthError):
    pass


class SubspaceNotStable(PadicGrowthError):
    pass


class WidthMismatch(PadicGrowthError):
    pass


class ParseError(PadicGrowthError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = " at line %d, column %d" % (line, column if column is not None else 0)
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationFailed(PadicGrowthError):
    pass
