"""Exceptions shared across the engine."""


class PrecisionError(ArithmeticError):
    """An operation asked for more 2-adic precision than an operand carries."""


class NotDivisible(ArithmeticError):
    """Exact division by a power of 2 failed on some coefficient."""


class NotAUnit(ArithmeticError):
    """Inversion of a non-unit was requested."""


class NoSolution(ArithmeticError):
    """Digit-by-digit Hensel lifting ran out of admissible corrections."""


class SolverInconsistent(ArithmeticError):
    """The graded linear system of the action solver is singular or unsolvable."""


class NotInSpan(ArithmeticError):
    """An element is not a combination of the requested basis at precision."""


class NegativePowerSurvives(ArithmeticError):
    """A negative v1-power of a chromatic element does not vanish at the modulus."""


class WindowOverflow(ValueError):
    """A u1-power or formal-variable degree exceeds the configured window."""
