# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Step-function observables on [0,1].

g = sum_i values[i] * chi_[breakpoints[i], breakpoints[i+1]), with
breakpoints running from 0 to 1. For step functions the BV norm (jump
variation plus sup |g|) is a finite sum, so it is exact.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

from twisted_recurrence_lab.targets.schedules import exact


@dataclass(frozen=True)
class ObservableSpec:
    """Piecewise-constant function with sorted breakpoints 0 = b_0 < ... < b_k = 1."""

    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]
    name: str = "step"

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) + 1 or not self.values:
            raise ValueError("need one more breakpoint than values")
        if self.breakpoints[0] != 0 or self.breakpoints[-1] != 1:
            raise ValueError("breakpoints must run from 0 to 1")
        for left, right in zip(self.breakpoints, self.breakpoints[1:]):
            if right <= left:
                raise ValueError(f"breakpoints must increase strictly, got {left} then {right}")

    @classmethod
    def step(cls, breakpoints: Sequence, values: Sequence, name: str = "step") -> "ObservableSpec":
        """Build from raw lists, merging neighbouring cells with equal values."""
        points = [exact(b) for b in breakpoints]
        vals = [exact(v) for v in values]
        merged_points, merged_vals = [points[0]], []
        for i, value in enumerate(vals):
            if merged_vals and merged_vals[-1] == value:
                merged_points[-1] = points[i + 1]
            else:
                merged_vals.append(value)
                merged_points.append(points[i + 1])
        return cls(tuple(merged_points), tuple(merged_vals), name)

    @classmethod
    def indicator(cls, lo, hi) -> "ObservableSpec":
        """chi_[lo, hi) for 0 <= lo < hi <= 1."""
        lo, hi = exact(lo), exact(hi)
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"indicator needs 0 <= lo < hi <= 1, got [{lo}, {hi})")
        points = [Fraction(0), lo, hi, Fraction(1)]
        vals = [Fraction(0), Fraction(1), Fraction(0)]
        # drop empty end cells
        cells = [(a, b, v) for a, b, v in zip(points, points[1:], vals) if b > a]
        return cls.step([cells[0][0]] + [c[1] for c in cells], [c[2] for c in cells], f"chi[{lo},{hi})")

    @classmethod
    def constant(cls, value) -> "ObservableSpec":
        return cls((Fraction(0), Fraction(1)), (exact(value),), f"const({value})")

    def cells(self) -> Iterator[Tuple[Fraction, Fraction, Fraction]]:
        """(lo, hi, value) for every cell."""
        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    def evaluate(self, x) -> Fraction:
        if x < 0 or x > 1:
            raise ValueError(f"point {x} outside [0,1]")
        idx = min(bisect_right(self.breakpoints, x) - 1, len(self.values) - 1)
        return self.values[idx]

    __call__ = evaluate

    @property
    def sup_norm(self) -> Fraction:
        return max(abs(v) for v in self.values)

    @property
    def variation(self) -> Fraction:
        return sum((abs(b - a) for a, b in zip(self.values, self.values[1:])), Fraction(0))

    @property
    def bv_norm(self) -> Fraction:
        return self.variation + self.sup_norm

    def integral(self, measure):
        """Integral of g against the measure."""
        return sum((v * measure.interval_mass(lo, hi) for lo, hi, v in self.cells()), Fraction(0))

    def l1_norm(self, measure):
        return sum((abs(v) * measure.interval_mass(lo, hi) for lo, hi, v in self.cells()), Fraction(0))


def bv_norm(g: ObservableSpec) -> Fraction:
    """Total jump variation plus sup |g|."""
    return g.bv_norm


def l1_norm(f: ObservableSpec, measure) -> object:
    """L1 norm of f under the measure."""
    return f.l1_norm(measure)
