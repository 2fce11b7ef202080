# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Target balls B(f(x), r) of mass M under Lebesgue measure, as bands in x.

x is in R_n exactly when lower(x) < T^n x < upper(x), where lower and upper
are f(x) -/+ r. Under Lebesgue the radius at a center c is

    M - c           if c <= M/2      (ball touches 0)
    c - (1 - M)     if c >= 1 - M/2  (ball touches 1)
    M/2             otherwise

so for an affine twist piece both bounds are affine in x once the piece is
split where the center crosses M/2 and 1 - M/2.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from twisted_recurrence_lab.dynamics.windows import Line
from twisted_recurrence_lab.twists.base import TwistSpec

AT_X = "at-x"
AT_FX = "at-fx"
RADIUS_MODES = (AT_X, AT_FX)


@dataclass(frozen=True)
class BandSegment:
    """On [lo, hi): lower(x) < T^n x < upper(x) defines R_n."""

    lo: Fraction
    hi: Fraction
    lower: Line
    upper: Line


def lebesgue_radius(center, M):
    """Radius of the clipped Lebesgue ball of mass M at center (exact for Fractions)."""
    half = M / 2
    if center <= half:
        return M - center
    if center >= 1 - half:
        return center - 1 + M
    return half


def lebesgue_band(x, value, M, radius_mode: str = AT_FX) -> Tuple[object, object]:
    """(f(x) - r, f(x) + r) with r taken at f(x) or at x."""
    r = lebesgue_radius(value if radius_mode == AT_FX else x, M)
    return value - r, value + r


def _split(lo: Fraction, hi: Fraction, cuts) -> List[Tuple[Fraction, Fraction]]:
    points = sorted({lo, hi} | {t for t in cuts if lo < t < hi})
    return list(zip(points, points[1:]))


def _fx_bounds(slope: Fraction, intercept: Fraction, center_mid: Fraction, M: Fraction):
    half = M / 2
    if center_mid <= half:
        return (2 * slope, 2 * intercept - M), (Fraction(0), M)
    if center_mid >= 1 - half:
        return (Fraction(0), 1 - M), (2 * slope, 2 * intercept - 1 + M)
    return (slope, intercept - half), (slope, intercept + half)


def _x_bounds(slope: Fraction, intercept: Fraction, x_mid: Fraction, M: Fraction):
    half = M / 2
    if x_mid <= half:
        return (slope + 1, intercept - M), (slope - 1, intercept + M)
    if x_mid >= 1 - half:
        return (slope - 1, intercept + 1 - M), (slope + 1, intercept - 1 + M)
    return (slope, intercept - half), (slope, intercept + half)


def lebesgue_bands(twist: TwistSpec, M: Fraction, radius_mode: str = AT_FX) -> List[BandSegment]:
    """
    Band segments covering [0,1) for mass M.

    Raises:
        MethodMismatchError: twist is not piecewise affine-rational
        ValueError: unknown radius mode or M outside (0,1)
    """
    if radius_mode not in RADIUS_MODES:
        raise ValueError(f"unknown radius mode '{radius_mode}'")
    M = Fraction(M)
    if not 0 < M < 1:
        raise ValueError(f"mass must lie in (0,1), got {M}")
    half = M / 2

    out: List[BandSegment] = []
    for lo, hi, slope, intercept in twist.affine_segments():
        if radius_mode == AT_FX:
            cuts = [(c - intercept) / slope for c in (half, 1 - half)] if slope != 0 else []
        else:
            cuts = [half, 1 - half]
        for a, b in _split(lo, hi, cuts):
            mid = (a + b) / 2
            if radius_mode == AT_FX:
                lower, upper = _fx_bounds(slope, intercept, slope * mid + intercept, M)
            else:
                lower, upper = _x_bounds(slope, intercept, mid, M)
            out.append(BandSegment(a, b, lower, upper))
    return out
