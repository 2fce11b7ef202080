# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Piecewise-affine interval maps with rational coefficients.

Built-in systems (all preserving Lebesgue measure): doubling, tripling,
integer beta-transformations and rigid rotations by a rational angle.
Branch domains are half-open [lo, hi); T(1) is the last branch's limit.
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.dynamics.intervals import Interval, merge_intervals, total_length
from twisted_recurrence_lab.dynamics.windows import (
    Line,
    cylinder_conditions,
    feasible_interval,
    uniform_fast_path,
    uniform_window_intervals,
    uniform_window_mass,
)
from twisted_recurrence_lab.utils.errors import BudgetExceededError, PrecisionError, UnsupportedSystemError

logger = logging.getLogger(__name__)

DEFAULT_INTERVAL_CAP = 2 ** 24


@dataclass(frozen=True)
class AffineBranch:
    """x -> slope * x + intercept on [lo, hi)."""

    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction

    def __call__(self, x):
        return self.slope * x + self.intercept

    def image(self) -> Tuple[Fraction, Fraction]:
        a, b = self(self.lo), self(self.hi)
        return (a, b) if a <= b else (b, a)

    def pullback(self, c: Fraction, d: Fraction) -> Interval:
        """Points of [lo, hi) mapped into [c, d)."""
        if self.slope > 0:
            piece = Interval((c - self.intercept) / self.slope, (d - self.intercept) / self.slope)
        else:
            piece = Interval((d - self.intercept) / self.slope, (c - self.intercept) / self.slope)
        return piece.intersect(Interval(self.lo, self.hi))


@dataclass(frozen=True)
class PreimageSet:
    """T^-n(target) as merged intervals plus the unmerged piece count."""

    intervals: List[Interval]
    raw_count: int

    @property
    def total_length(self) -> Fraction:
        return total_length(self.intervals)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


class AffineMap(IntervalMap):
    """Interval map with finitely many affine rational branches."""

    def __init__(self, name: str, branches: Sequence[AffineBranch], invariant_measure: str = "lebesgue"):
        branches = sorted(branches, key=lambda b: b.lo)
        self._validate(name, branches)

        max_slope = max(abs(b.slope) for b in branches)
        expansion_bits = math.ceil(math.log2(max_slope)) if max_slope > 1 else 0
        super().__init__(name, invariant_measure, expansion_bits)

        self.branches: Tuple[AffineBranch, ...] = tuple(branches)
        self._los = [b.lo for b in branches]
        self._denominator = math.lcm(*(
            v.denominator for b in branches for v in (b.lo, b.hi, b.intercept)
        ))
        self._integer_slopes = all(b.slope.denominator == 1 for b in branches)
        self._uniform_slope = self._detect_uniform()
        self._cylinder_cache: Dict[int, List[AffineBranch]] = {}
        self.alpha: Optional[Fraction] = None

    @staticmethod
    def _validate(name: str, branches: Sequence[AffineBranch]) -> None:
        if not branches:
            raise ValueError(f"{name}: no branches")
        if branches[0].lo != 0 or branches[-1].hi != 1:
            raise ValueError(f"{name}: branch domains must cover [0,1)")
        for left, right in zip(branches, branches[1:]):
            if left.hi != right.lo:
                raise ValueError(f"{name}: gap or overlap at {left.hi}")
        for b in branches:
            if b.lo >= b.hi:
                raise ValueError(f"{name}: empty branch [{b.lo}, {b.hi})")
            if b.slope == 0:
                raise ValueError(f"{name}: zero slope on [{b.lo}, {b.hi})")
            lo, hi = b.image()
            if lo < 0 or hi > 1:
                raise ValueError(f"{name}: branch [{b.lo}, {b.hi}) maps outside [0,1]")

    def _detect_uniform(self) -> Optional[int]:
        k = len(self.branches)
        for i, b in enumerate(self.branches):
            if b.slope != k or b.lo != Fraction(i, k) or b.intercept != -i:
                return None
        return k

    # Factories

    @classmethod
    def beta_int(cls, k: int, name: Optional[str] = None) -> "AffineMap":
        """x -> k x mod 1 for integer k >= 2."""
        if int(k) != k or k < 2:
            raise ValueError(f"beta must be an integer >= 2, got {k}")
        k = int(k)
        branches = [
            AffineBranch(Fraction(j, k), Fraction(j + 1, k), Fraction(k), Fraction(-j))
            for j in range(k)
        ]
        return cls(name or f"beta-int({k})", branches)

    @classmethod
    def doubling(cls) -> "AffineMap":
        return cls.beta_int(2, name="doubling")

    @classmethod
    def tripling(cls) -> "AffineMap":
        return cls.beta_int(3, name="tripling")

    @classmethod
    def rotation(cls, alpha) -> "AffineMap":
        """x -> x + alpha mod 1 for rational alpha in (0,1)."""
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ValueError(f"rotation angle must lie in (0,1), got {alpha}")
        branches = [
            AffineBranch(Fraction(0), 1 - alpha, Fraction(1), alpha),
            AffineBranch(1 - alpha, Fraction(1), Fraction(1), alpha - 1),
        ]
        system = cls("rotation", branches)
        system.alpha = alpha
        return system

    # Properties

    @property
    def is_affine_rational(self) -> bool:
        return True

    @property
    def lipschitz_bound(self) -> List[float]:
        return [float(abs(b.slope)) for b in self.branches]

    @property
    def has_integer_slopes(self) -> bool:
        return self._integer_slopes

    @property
    def uniform_slope(self) -> Optional[int]:
        """k when T x = k x mod 1, else None."""
        return self._uniform_slope

    def branch_index(self, x) -> int:
        return min(max(bisect_right(self._los, x) - 1, 0), len(self.branches) - 1)

    # Orbit steps

    def _apply_exact(self, x: Fraction) -> Fraction:
        if x < 0 or x > 1:
            raise ValueError(f"point {x} outside [0,1]")
        return self.branches[self.branch_index(x)](x)

    def _apply_mp(self, ctx, x, error):
        rounding = self._rounding(ctx)
        idx = None
        for i, b in enumerate(self.branches[1:], start=1):
            boundary = ctx.mpf(b.lo.numerator) / b.lo.denominator
            margin = error if _is_power_of_two(b.lo.denominator) else error + rounding
            if margin > 0 and abs(x - boundary) <= margin:
                raise PrecisionError(
                    f"{self.name}: point within {ctx.nstr(margin, 5)} of branch boundary {b.lo}"
                )
            if x >= boundary:
                idx = i
        branch = self.branches[idx or 0]
        slope = ctx.mpf(branch.slope.numerator) / branch.slope.denominator
        intercept = ctx.mpf(branch.intercept.numerator) / branch.intercept.denominator
        return slope * x + intercept, abs(slope) * error + rounding

    def integer_orbit(self, x: Fraction, n: int) -> Optional[Tuple[List[int], int]]:
        """
        Orbit numerators over a common denominator L.

        Returns:
            ([L*x, L*Tx, ..., L*T^n x], L), or None when some slope is not an integer
        """
        if not self._integer_slopes:
            return None
        x = Fraction(x)
        L = math.lcm(x.denominator, self._denominator)
        los = [b.lo.numerator * (L // b.lo.denominator) for b in self.branches]
        steps = [
            (b.slope.numerator, b.intercept.numerator * (L // b.intercept.denominator))
            for b in self.branches
        ]
        last = len(self.branches) - 1
        num = x.numerator * (L // x.denominator)
        nums = [num]
        for _ in range(n):
            idx = min(bisect_right(los, num) - 1, last)
            slope, offset = steps[idx]
            num = slope * num + offset
            nums.append(num)
        return nums, L

    # Cylinders and preimages

    def cylinders(self, n: int, budget: int = DEFAULT_INTERVAL_CAP) -> List[AffineBranch]:
        """
        Affine pieces of T^n: on each returned [lo, hi), T^n x = slope x + intercept.

        Adjacent pieces with identical coefficients are merged.

        Raises:
            BudgetExceededError: more than `budget` pieces
        """
        if n in self._cylinder_cache:
            return self._cylinder_cache[n]

        if self._uniform_slope is not None:
            s = self._uniform_slope ** n
            if s > budget:
                raise BudgetExceededError(f"{self.name}: {s} cylinders at level {n} exceed budget {budget}")
            pieces = [AffineBranch(Fraction(j, s), Fraction(j + 1, s), Fraction(s), Fraction(-j)) for j in range(s)]
        else:
            pieces = [AffineBranch(Fraction(0), Fraction(1), Fraction(1), Fraction(0))]
            for _ in range(n):
                pieces = self._compose_once(pieces)
                if len(pieces) > budget:
                    raise BudgetExceededError(
                        f"{self.name}: {len(pieces)} cylinders exceed budget {budget}"
                    )

        self._cylinder_cache[n] = pieces
        return pieces

    def _compose_once(self, pieces: List[AffineBranch]) -> List[AffineBranch]:
        out: List[AffineBranch] = []
        for piece in pieces:
            img_lo, img_hi = piece.image()
            for b in self.branches:
                c, d = max(img_lo, b.lo), min(img_hi, b.hi)
                if d <= c:
                    continue
                domain = piece.pullback(c, d)
                if domain.is_empty:
                    continue
                out.append(AffineBranch(
                    domain.lo, domain.hi,
                    b.slope * piece.slope,
                    b.slope * piece.intercept + b.intercept,
                ))
        out.sort(key=lambda p: p.lo)

        merged: List[AffineBranch] = []
        for p in out:
            if merged and merged[-1].hi == p.lo and merged[-1].slope == p.slope and merged[-1].intercept == p.intercept:
                merged[-1] = AffineBranch(merged[-1].lo, p.hi, p.slope, p.intercept)
            else:
                merged.append(p)
        return merged

    def preimage(self, target: Interval, n: int, cap: int = DEFAULT_INTERVAL_CAP) -> PreimageSet:
        """
        T^-n(target) by recursive branch inversion.

        Raises:
            BudgetExceededError: the piece count would pass `cap`
        """
        current = [] if target.is_empty else [target]
        for step in range(n):
            if len(current) * len(self.branches) > cap:
                raise BudgetExceededError(
                    f"{self.name}: preimage at step {step + 1} would hold "
                    f"{len(current) * len(self.branches)} intervals (cap {cap})"
                )
            nxt = []
            for iv in current:
                for b in self.branches:
                    piece = b.pullback(iv.lo, iv.hi)
                    if not piece.is_empty:
                        nxt.append(piece)
            current = nxt
        return PreimageSet(merge_intervals(current), len(current))

    def preimage_mass(self, lo, hi, measure) -> float:
        """mu(T^-1 [lo, hi))."""
        pieces = self.preimage(Interval(Fraction(lo), Fraction(hi)), 1).intervals
        return sum((measure.interval_mass(iv.lo, iv.hi) for iv in pieces), Fraction(0))

    # Band solutions

    def window_mass(self, lo: Fraction, hi: Fraction, lower: Line, upper: Line, n: int,
                    budget: int = DEFAULT_INTERVAL_CAP) -> Fraction:
        """Lebesgue measure of {x in [lo,hi): lower(x) < T^n x < upper(x)}."""
        if hi <= lo:
            return Fraction(0)
        if self._uniform_slope is not None and uniform_fast_path(self._uniform_slope ** n, lower, upper):
            return uniform_window_mass(self._uniform_slope ** n, lo, hi, lower, upper)

        total = Fraction(0)
        for c in self.cylinders(n, budget):
            if c.hi <= lo or c.lo >= hi:
                continue
            sol = feasible_interval(max(lo, c.lo), min(hi, c.hi),
                                    cylinder_conditions(c.slope, c.intercept, lower, upper))
            if sol is not None:
                total += sol[1] - sol[0]
        return total

    def window_piece_bound(self, lo: Fraction, hi: Fraction, n: int, budget: int = DEFAULT_INTERVAL_CAP) -> int:
        """
        Upper bound on len(window_intervals(lo, hi, ..., n)), computed without solving.

        Raises:
            BudgetExceededError: non-uniform map with more than `budget` cylinders at level n
        """
        if hi <= lo:
            return 0
        if self._uniform_slope is not None:
            s = self._uniform_slope ** n
            return math.ceil(hi * s) - math.floor(lo * s)
        return sum(1 for c in self.cylinders(n, budget) if c.hi > lo and c.lo < hi)

    def window_intervals(self, lo: Fraction, hi: Fraction, lower: Line, upper: Line, n: int,
                         budget: int = DEFAULT_INTERVAL_CAP) -> List[Interval]:
        """Solution set of lower(x) < T^n x < upper(x) on [lo, hi) as intervals."""
        if hi <= lo:
            return []
        if self._uniform_slope is not None and uniform_fast_path(self._uniform_slope ** n, lower, upper):
            return uniform_window_intervals(self._uniform_slope ** n, lo, hi, lower, upper, budget)

        out = []
        for c in self.cylinders(n, budget):
            if c.hi <= lo or c.lo >= hi:
                continue
            sol = feasible_interval(max(lo, c.lo), min(hi, c.hi),
                                    cylinder_conditions(c.slope, c.intercept, lower, upper))
            if sol is not None:
                out.append(Interval(*sol))
        return out


def preimage_intervals(system: IntervalMap, target: Interval, n: int,
                       cap: int = DEFAULT_INTERVAL_CAP) -> List[Interval]:
    """
    T^-n(target) as a minimal disjoint interval list.

    Raises:
        UnsupportedSystemError: system is not affine-rational
        BudgetExceededError: interval count would pass `cap`
    """
    if not isinstance(system, AffineMap):
        raise UnsupportedSystemError(f"preimage_intervals needs an affine-rational system, got '{system.name}'")
    return system.preimage(target, n, cap).intervals
