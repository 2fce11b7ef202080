# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Half-open rational intervals [lo, hi) and interval-list helpers."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval [lo, hi) with rational endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def length(self) -> Fraction:
        return max(self.hi - self.lo, Fraction(0))

    @property
    def is_empty(self) -> bool:
        return self.hi <= self.lo

    def contains(self, x) -> bool:
        return self.lo <= x < self.hi

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi})"


def merge_intervals(intervals: Iterable[Interval]) -> List[Interval]:
    """Sort, drop empties and merge overlapping or touching intervals."""
    merged: List[Interval] = []
    for iv in sorted(i for i in intervals if not i.is_empty):
        if merged and iv.lo <= merged[-1].hi:
            last = merged[-1]
            merged[-1] = Interval(last.lo, max(last.hi, iv.hi))
        else:
            merged.append(iv)
    return merged


def total_length(intervals: Iterable[Interval]) -> Fraction:
    return sum((iv.length for iv in intervals), Fraction(0))


def intersect_lists(first: List[Interval], second: List[Interval]) -> List[Interval]:
    """Intersection of two sorted, merged interval lists."""
    out: List[Interval] = []
    i = j = 0
    while i < len(first) and j < len(second):
        piece = first[i].intersect(second[j])
        if not piece.is_empty:
            out.append(piece)
        if first[i].hi <= second[j].hi:
            i += 1
        else:
            j += 1
    return out
