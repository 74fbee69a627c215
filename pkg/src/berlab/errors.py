"""Exception hierarchy shared by every berlab module."""


class BerlabError(Exception):
    """Base class for all errors raised by berlab."""


class NotHermitian(BerlabError, ValueError):
    pass


class NoConvergence(BerlabError, ArithmeticError):
    pass


class NegativeSpectrum(BerlabError, ValueError):
    pass


class OutOfDomain(BerlabError, ValueError):
    pass


class ArityMismatch(BerlabError, ValueError):
    pass


class DimMismatch(BerlabError, ValueError):
    pass


class ShapeMismatch(DimMismatch):
    pass


class BadExponent(BerlabError, ValueError):
    pass


class ContractionRequired(BerlabError, ValueError):
    pass


class InvalidPair(BerlabError, ValueError):
    pass


class BadSpec(BerlabError, ValueError):
    pass


class UnknownChecker(BerlabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown checker"


class BoundViolation(BerlabError, RuntimeError):
    """A checked inequality came out violated beyond its tolerance."""
