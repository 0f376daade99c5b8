"""Exception hierarchy.

Every error raised by the library derives from :class:`Sl2GraphsError`, so
callers (and the CLI) can map failures onto exit codes without string
matching.
"""


class Sl2GraphsError(Exception):
    """Base class for all library errors."""


class ConfigError(Sl2GraphsError, ValueError):
    """Invalid user input: bad parameters, bad config files."""


class NotPrime(ConfigError):
    pass


class ZeroInverse(Sl2GraphsError, ZeroDivisionError):
    pass


class NoRoot(Sl2GraphsError, ValueError):
    """The argument of a modular square root is a non-residue."""


class ModulusMismatch(Sl2GraphsError, ValueError):
    pass


class IndexOutOfRange(Sl2GraphsError, IndexError):
    pass


class NotInSL2(Sl2GraphsError, ValueError):
    pass


class BadPrimeResidue(ConfigError):
    """LPS generators need p = 1 (mod 12)."""


class InvalidVertex(Sl2GraphsError, ValueError):
    pass


class NotSymmetric(Sl2GraphsError, ValueError):
    """Generator set is not closed under inversion for the requested action."""


class SizeOverflow(Sl2GraphsError, MemoryError):
    pass


class NotConnected(Sl2GraphsError):
    pass


class NotHermitian(Sl2GraphsError, ValueError):
    pass


class NoConvergence(Sl2GraphsError, ArithmeticError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class MissingTrivialEigenvalue(Sl2GraphsError, ValueError):
    pass


class EmptySample(Sl2GraphsError, ValueError):
    pass


class TooFewEigenvalues(Sl2GraphsError, ValueError):
    pass


class AlphaOutOfRange(Sl2GraphsError, ValueError):
    pass


class GuardExceeded(Sl2GraphsError, OverflowError):
    pass


class EmptyInput(Sl2GraphsError, ValueError):
    pass
