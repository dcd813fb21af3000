"""Exception classes raised by klconc.

Inapplicability of a bound and infinite divergence are ordinary outcomes in this package; they only become
exceptions where a caller explicitly asks for strictness or where there is no sensible value to return.
"""


class KLConcError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KLConcError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class InfiniteDivergenceError(KLConcError, ArithmeticError):
    """The divergence is infinite because p̂_i > 0 where p_i = 0."""

    def __init__(self, index: int):
        """Record the offending coordinate."""
        super().__init__(f"Infinite divergence: empirical mass at coordinate {index} where p is zero")
        self.index = index


class SupportCapExceeded(KLConcError):
    """Exact enumeration was refused because the multinomial support is larger than the cap."""

    def __init__(self, support_size: int, cap: int):
        """Record the computed support size and the cap it exceeded."""
        super().__init__(f"Support size {support_size} exceeds the enumeration cap {cap}")
        self.support_size = support_size
        self.cap = cap


class BoundNotApplicable(KLConcError):
    """A bound was evaluated outside its applicability region."""

    def __init__(self, name: str, reason: str):
        """Record which bound and why."""
        super().__init__(f"{name}: {reason}")
        self.name = name
        self.reason = reason


class NoSolutionError(KLConcError):
    """The threshold solver could not bring the bound below the requested level."""


class NumericOverflowError(KLConcError, OverflowError):
    """A gamma, factorial or exponential evaluation left the representable floating-point range."""
