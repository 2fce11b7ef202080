# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Exact solution sets of lower(x) < T^n x < upper(x) for affine T^n.

lower and upper are affine lines (slope, intercept) over a window [lo, hi).
On a cylinder where T^n x = S x + K the conditions are two linear
inequalities, so every solution set is an interval with rational endpoints.

For uniform maps (T^n x = s x - j on [j/s, (j+1)/s)) the solution length on
cylinder j is piecewise linear in j. Summing it over the few breakpoints
gives the total without visiting 2^n cylinders.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import ceil, floor
from typing import List, Optional, Sequence, Tuple

from twisted_recurrence_lab.dynamics.intervals import Interval
from twisted_recurrence_lab.utils.errors import BudgetExceededError

logger = logging.getLogger(__name__)

# (slope, intercept)
Line = Tuple[Fraction, Fraction]


def feasible_interval(lo: Fraction, hi: Fraction, conditions: Sequence[Line]) -> Optional[Tuple[Fraction, Fraction]]:
    """
    Solve p x + q > 0 for every (p, q) in `conditions` on [lo, hi).

    Returns:
        (start, end) of the solution interval, or None when it is empty
    """
    for p, q in conditions:
        if p == 0:
            if q <= 0:
                return None
        elif p > 0:
            lo = max(lo, -q / p)
        else:
            hi = min(hi, -q / p)
        if hi <= lo:
            return None
    return lo, hi


def cylinder_conditions(slope: Fraction, intercept: Fraction, lower: Line, upper: Line) -> List[Line]:
    """Conditions lower(x) < S x + K < upper(x) as p x + q > 0."""
    return [
        (Fraction(slope - lower[0]), Fraction(intercept - lower[1])),
        (Fraction(upper[0] - slope), Fraction(upper[1] - intercept)),
    ]


def uniform_fast_path(s: int, lower: Line, upper: Line) -> bool:
    """True when the closed-form sum applies (s exceeds both band slopes)."""
    return s > lower[0] and s > upper[0]


def _cylinder_range(s: int, lo: Fraction, hi: Fraction) -> Tuple[int, int]:
    return floor(lo * s), ceil(hi * s) - 1


def _candidate_lines(s: int, lo: Fraction, hi: Fraction, lower: Line, upper: Line):
    inv = Fraction(1, s)
    dl = Fraction(s - lower[0])
    du = Fraction(s - upper[0])
    starts = [(inv, Fraction(0)), (Fraction(0), lo), (1 / dl, lower[1] / dl)]
    ends = [(inv, inv), (Fraction(0), hi), (1 / du, upper[1] / du)]
    return starts, ends


def uniform_window_mass(s: int, lo: Fraction, hi: Fraction, lower: Line, upper: Line) -> Fraction:
    """
    Lebesgue measure of {x in [lo,hi): lower(x) < s x - floor(s x) < upper(x)}.

    Requires uniform_fast_path(s, lower, upper).
    """
    if hi <= lo:
        return Fraction(0)
    j0, j1 = _cylinder_range(s, lo, hi)
    starts, ends = _candidate_lines(s, lo, hi, lower, upper)

    def length(j: int) -> Fraction:
        a = max(p * j + q for p, q in starts)
        b = min(p * j + q for p, q in ends)
        return b - a if b > a else Fraction(0)

    specials = {j0, j1}
    for (p1, q1), (p2, q2) in combinations(starts + ends, 2):
        if p1 != p2:
            t = (q2 - q1) / (p1 - p2)
            for k in (floor(t), ceil(t)):
                if j0 <= k <= j1:
                    specials.add(k)

    points = sorted(specials)
    total = sum((length(j) for j in points), Fraction(0))
    for left, right in zip(points, points[1:]):
        count = right - left - 1
        if count > 0:
            # linear in j between consecutive breakpoints
            total += count * (length(left + 1) + length(right - 1)) / 2
    return total


def uniform_window_intervals(s: int, lo: Fraction, hi: Fraction, lower: Line, upper: Line,
                             budget: int) -> List[Interval]:
    """Explicit solution intervals, one per cylinder, under an interval budget."""
    if hi <= lo:
        return []
    j0, j1 = _cylinder_range(s, lo, hi)
    if j1 - j0 + 1 > budget:
        raise BudgetExceededError(f"{j1 - j0 + 1} cylinders in window exceed budget {budget}")
    starts, ends = _candidate_lines(s, lo, hi, lower, upper)
    out = []
    for j in range(j0, j1 + 1):
        a = max(p * j + q for p, q in starts)
        b = min(p * j + q for p, q in ends)
        if b > a:
            out.append(Interval(a, b))
    return out
