"""Exception types raised across the package."""

from __future__ import annotations


class HurwitzError(Exception):
    """Base class for every error raised by :mod:`hurwitz_stable`."""


class DomainError(HurwitzError, ValueError):
    """Argument outside the domain where the operation is defined."""


class DivergentMeasure(HurwitzError, ValueError):
    pass


class NonPositiveWeight(HurwitzError, ValueError):
    pass


class PoleError(HurwitzError, ZeroDivisionError):
    pass


class InterlacingViolation(HurwitzError, ValueError):
    pass


class MixedTagError(HurwitzError, ValueError):
    pass


class DegenerateError(HurwitzError, ValueError):
    pass


class ConstantPsiError(DegenerateError):
    """A Stieltjes function that is identically constant."""


class InfiniteValue(HurwitzError, ValueError):
    pass


class LengthMismatch(HurwitzError, ValueError):
    pass


class QuadratureFailure(HurwitzError, RuntimeError):
    pass


class ZeroLeadingCoefficient(HurwitzError, ValueError):
    pass


class NonConvergence(HurwitzError, RuntimeError):
    """Iterative root finder gave up; ``partial`` holds the last iterate."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ContourTooClose(HurwitzError, RuntimeError):
    """The function nearly vanishes on the counting contour."""

    def __init__(self, message: str, point: complex | None = None, value: float | None = None):
        super().__init__(message)
        self.point = point
        self.value = value


class TruncationError(HurwitzError, RuntimeError):
    """The certified tail bound is too large for the requested radius."""


class EvaluationUnderflow(HurwitzError, FloatingPointError):
    pass


class HypothesisViolation(HurwitzError, ValueError):
    pass


class ConfigError(HurwitzError, ValueError):
    pass


class SpecialPsi(UserWarning):
    """The Stieltjes function is special; the closed-form remarks apply instead."""
