"""Hurwitz stability checks for polynomials and truncated entire functions."""

from .contour import count_zeros_detail, count_zeros_right_half, find_zeros, winding_number
from .polynomial import DEGENERATE, NOT_STABLE, poly_roots, routh_hurwitz
from .verdict import (
    BOUNDARY,
    INCONCLUSIVE,
    STABLE,
    UNSTABLE,
    IndicatorEstimate,
    StabilityReport,
    VerdictParams,
    certified_radius,
    hurwitz_verdict,
    indicator_estimate,
    root_density,
    rotated_angle,
)

__all__ = [
    "BOUNDARY", "DEGENERATE", "INCONCLUSIVE", "NOT_STABLE", "STABLE", "UNSTABLE",
    "IndicatorEstimate", "StabilityReport", "VerdictParams",
    "certified_radius", "count_zeros_detail", "count_zeros_right_half", "find_zeros",
    "hurwitz_verdict", "indicator_estimate", "poly_roots", "root_density", "rotated_angle",
    "routh_hurwitz", "winding_number",
]
