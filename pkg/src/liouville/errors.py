"""Exception and warning types shared across the library."""

from __future__ import annotations


class LiouvilleError(Exception):
    """Base class for all library errors."""


class DomainError(LiouvilleError):
    """An input falls outside the allowed parameter domain."""


class PoleError(LiouvilleError):
    """An evaluation point is too close to a pole of the requested function.

    The ``factor`` attribute names which constituent blew up; ``where`` holds
    the offending argument.
    """

    def __init__(self, message, factor=None, where=None):
        super().__init__(message)
        self.factor = factor
        self.where = where


class BranchError(LiouvilleError):
    """The FZZ parameter sits at the junction between the real and imaginary
    theta branches, where d(theta)/d(mu_B) is singular."""


class NonConvergence(LiouvilleError):
    """A quadrature failed to reach the requested tolerance.

    Carries diagnostics: achieved error estimate, target tolerance and the
    number of subdivisions spent.
    """

    def __init__(self, message, error=None, tolerance=None, subdivisions=None):
        super().__init__(message)
        self.error = error
        self.tolerance = tolerance
        self.subdivisions = subdivisions


class InvalidDecay(LiouvilleError):
    """The certified Gaussian decay rate of a half-line integrand is not positive."""


class SingularGram(LiouvilleError):
    """A Shapovalov Gram matrix is numerically singular (condition number too large)."""


class ZeroWarning(UserWarning):
    """The evaluation point sits on a zero lattice; the exact value 0 is returned."""


class TailWarning(UserWarning):
    """The empirical coefficient growth of a truncated series defeats the
    geometric tail bound at the requested modulus."""
