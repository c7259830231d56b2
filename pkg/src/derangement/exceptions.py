"""Exception hierarchy.

Everything a caller can trigger with bad input derives from :class:`InputError`
(and :class:`ValueError`). :class:`InvariantViolation` is reserved for internal
consistency failures; the command line maps it to exit status 2.
"""


class DerangementError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DerangementError, ValueError):
    """Malformed or out-of-contract input."""


class NotABijection(InputError):
    pass


class OverlappingCycles(InputError):
    pass


class VertexOutOfRange(InputError):
    pass


class SizeMismatch(InputError):
    pass


class ParseError(InputError):
    pass


class AsymmetryError(InputError):
    def __init__(self, i, j, cij, cji):
        super().__init__(f"cost({i},{j})={cij} but cost({j},{i})={cji}")
        self.pair = (i, j)


class RangeError(InputError):
    pass


class FixedPointCost(InputError):
    pass


class ForbiddenArc(InputError):
    def __init__(self, i, j):
        super().__init__(f"arc ({i} {j}) is forbidden in the derived matrix")
        self.arc = (i, j)


class NotNonSimple(InputError):
    pass


class MultipleRepeats(InputError):
    pass


class CreatesFixedPoint(InputError):
    pass


class CreatesTwoCycle(InputError):
    pass


class InvalidStart(InputError):
    pass


class OracleLimitExceeded(InputError):
    pass


class InvariantViolation(DerangementError, AssertionError):
    """An internal invariant failed; results produced so far cannot be trusted."""
