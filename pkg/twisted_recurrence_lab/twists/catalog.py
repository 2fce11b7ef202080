# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Built-in twists: identity, constant, affine clamp, tent and pw-affine tables."""

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple

from twisted_recurrence_lab.twists.base import (
    CONSTANT,
    DECREASING,
    INCREASING,
    AffineFormula,
    TwistPiece,
    TwistSpec,
)


def _q(value) -> Fraction:
    """Exact rational from ints, Fractions, decimal strings or floats (via their repr)."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return Fraction(str(value))


def _affine_piece(lo: Fraction, hi: Fraction, slope: Fraction, intercept: Fraction) -> TwistPiece:
    if slope > 0:
        direction = INCREASING
    elif slope < 0:
        direction = DECREASING
    else:
        direction = CONSTANT
    return TwistPiece(lo, hi, AffineFormula(slope, intercept), direction, abs(slope))


def identity() -> TwistSpec:
    return TwistSpec("identity", [_affine_piece(Fraction(0), Fraction(1), Fraction(1), Fraction(0))])


def constant(y) -> TwistSpec:
    """f = y: the shrinking-target case."""
    y = _q(y)
    if not 0 <= y <= 1:
        raise ValueError(f"constant twist value must lie in [0,1], got {y}")
    return TwistSpec(f"constant({y})", [_affine_piece(Fraction(0), Fraction(1), Fraction(0), y)])


def affine(alpha, beta) -> TwistSpec:
    """f(x) = clamp(alpha x + beta)."""
    alpha, beta = _q(alpha), _q(beta)
    return TwistSpec(f"affine({alpha},{beta})", [_affine_piece(Fraction(0), Fraction(1), alpha, beta)])


def tent(center=Fraction(1, 2), slope=1, peak=0) -> TwistSpec:
    """
    f(x) = clamp(peak + slope |x - center|); defaults give |x - 1/2|.

    Args:
        center: Kink position in (0,1)
        slope: Slope magnitude away from the kink (negative for a hat)
        peak: Value at the kink
    """
    center, slope, peak = _q(center), _q(slope), _q(peak)
    if not 0 < center < 1:
        raise ValueError(f"tent center must lie in (0,1), got {center}")
    pieces = [
        _affine_piece(Fraction(0), center, -slope, peak + slope * center),
        _affine_piece(center, Fraction(1), slope, peak - slope * center),
    ]
    return TwistSpec(f"tent({center},{slope},{peak})", pieces)


def pw_affine_knots(knots: Sequence[Tuple[object, object]]) -> TwistSpec:
    """Continuous piecewise-linear interpolation through (x, y) knots from x=0 to x=1."""
    points = [(_q(x), _q(y)) for x, y in knots]
    if len(points) < 2:
        raise ValueError("pw-affine twist needs at least two knots")
    pieces = []
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x1 <= x0:
            raise ValueError(f"pw-affine knots must increase in x, got {x0} then {x1}")
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(_affine_piece(x0, x1, slope, y0 - slope * x0))
    return TwistSpec("pw-affine", pieces)


def pw_affine_pieces(pieces: Iterable[Mapping[str, object]]) -> TwistSpec:
    """Possibly discontinuous table of {lo, hi, slope, intercept} rows."""
    built = [
        _affine_piece(_q(p["lo"]), _q(p["hi"]), _q(p["slope"]), _q(p["intercept"]))
        for p in pieces
    ]
    return TwistSpec("pw-affine", built)
