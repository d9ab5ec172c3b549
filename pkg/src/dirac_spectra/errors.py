"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class DiracSpectraError(Exception):
    """Base class for all errors raised by the package."""


class InvalidProblemError(DiracSpectraError, ValueError):
    """Raised when weights, potentials or configuration values are malformed."""


class InvalidBoundaryError(InvalidProblemError):
    """Raised when the 2x4 block ``(C D)`` is rank deficient."""


class NotReducibleError(DiracSpectraError):
    """Raised when ``J14 = 0`` so the boundary rows cannot be normalised."""


class NonRegularError(DiracSpectraError):
    """Raised when an operation needs regular boundary conditions."""


class StripTooTallError(DiracSpectraError, OverflowError):
    """Raised when ``|Im λ|·max|b|`` exceeds the exponent overflow guard."""


class KernelDivergenceError(DiracSpectraError):
    """Raised when the Picard sweeps for the kernel field fail to converge.

    Attributes
    ----------
    last_update : float
        Sup-norm of the last Picard update.
    """

    def __init__(self, message: str, last_update: float):
        super().__init__(message)
        self.last_update = last_update


class BoundaryZeroError(DiracSpectraError):
    """Raised when a zero sits too close to a contour for reliable counting."""


class LocalizationError(DiracSpectraError):
    """Raised when subdivision cannot isolate the zeros inside a box.

    Attributes
    ----------
    box : tuple of float
        ``(re_min, re_max, im_min, im_max)`` of the offending box.
    """

    def __init__(self, message: str, box: tuple[float, float, float, float]):
        super().__init__(message)
        self.box = box


class PairingError(DiracSpectraError):
    """Raised when perturbed and unperturbed zero lists cannot be matched."""


class NotAnEigenvalueError(DiracSpectraError):
    """Raised when ``U(λ)`` has no small singular value."""


class InsufficientDataError(DiracSpectraError):
    """Raised when a diagnostic needs more input than was supplied."""


class NotFoundError(DiracSpectraError):
    """Raised when a deterministic search exhausts its candidates."""


class ReductionHypothesisError(DiracSpectraError):
    """Raised when beam coefficients violate the constant-ratio assumption."""


class InvalidProfileError(InvalidProblemError):
    """Raised when beam profiles are non-positive or not finite."""


class NotDecoupledError(DiracSpectraError):
    """Raised when a beam with nonzero cross damping is asked to decouple."""
