"""Exception types shared across the engine."""


class ArithError(Exception):
    """Base class for mathematical errors raised by the engine."""


class NotAUnit(ArithError):
    """An element expected to be invertible is not a unit."""


class PrecisionUnderflow(ArithError):
    """An operation would leave no p-adic digits."""


class ExactDivisionFailure(ArithError):
    """A division by p^k that must be exact left a remainder.

    This signals a broken invariant inside an algorithm, never bad user input.
    """


class UnsupportedIdeal(ArithError):
    """Ideal membership was requested for an ideal shape we cannot decide."""


class DomainError(ArithError):
    """Input outside the supported mathematical domain (p = 2, ramified p, ...)."""
