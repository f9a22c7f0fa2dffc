"""Exception taxonomy shared by all hcrband modules.

Every failure mode that callers are expected to branch on gets its own
class.  All of them derive from HcrbandError so that a bare
``except HcrbandError`` catches exactly the library's own failures and
nothing else.
"""


class HcrbandError(Exception):
    """Base class for all hcrband errors."""


class DomainError(HcrbandError):
    """An argument lies outside the mathematical domain of an operation."""


class BlowupError(HcrbandError):
    """A trajectory exceeded the representable-magnitude cap during integration."""

    def __init__(self, message, x=None, value=None):
        super().__init__(message)
        self.x = x
        self.value = value


class NoBracketError(HcrbandError):
    """A root finder was handed an interval with no sign change."""


class PreconditionError(HcrbandError):
    """A documented hypothesis of a formula is violated by the inputs."""


class RegimeError(HcrbandError):
    """The requested parameter regime is not covered by the closed-form bounds."""


class DegenerateError(HcrbandError):
    """An envelope expression degenerated (vanishing denominator or nonpositive base)."""


class NoRootError(PreconditionError):
    """A polynomial or scalar equation has no real root in the searched region."""


class CertificationError(HcrbandError):
    """A constructed envelope failed its own certificate and must not be used."""


class OrderingError(HcrbandError):
    """A lower/upper/oracle sandwich was violated at one or more grid points."""
