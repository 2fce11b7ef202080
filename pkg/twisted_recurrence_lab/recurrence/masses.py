# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Masses of R_n and of R_n intersect R_{n+m}.

Exact mode (affine-rational systems, Lebesgue, affine twist pieces) sums
the band solutions of every twist segment. Monte Carlo mode samples seeds
through the hit detector.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from twisted_recurrence_lab.dynamics.affine import DEFAULT_INTERVAL_CAP, AffineMap
from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.dynamics.intervals import Interval, merge_intervals
from twisted_recurrence_lab.recurrence.bands import AT_FX, lebesgue_band, lebesgue_bands
from twisted_recurrence_lab.recurrence.hits import sample_hits
from twisted_recurrence_lab.targets.schedules import TargetSchedule
from twisted_recurrence_lab.twists.base import TwistSpec
from twisted_recurrence_lab.utils.errors import BudgetExceededError, MethodMismatchError

logger = logging.getLogger(__name__)

EXACT = "exact"
MONTE_CARLO = "monte-carlo"
METHODS = (EXACT, MONTE_CARLO)

DEFAULT_MC_SAMPLES = 10_000
# window solves (R_n pieces x bands of R_{n+m}) allowed per exact pair
DEFAULT_PAIR_WINDOW_BUDGET = 2 ** 12


@dataclass(frozen=True)
class MassEstimate:
    """Exact rational mass (stderr 0) or a Monte Carlo frequency with its standard error."""

    value: object
    stderr: float
    method: str
    flagged: bool = False

    @property
    def exact(self) -> bool:
        return self.method == EXACT

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "exact_value": str(self.value) if self.exact else None,
            "stderr": self.stderr,
            "method": self.method,
            "flagged": self.flagged,
        }


def supports_exact(system: IntervalMap, measure) -> bool:
    return isinstance(system, AffineMap) and measure.is_exact and measure.name == "lebesgue"


def _require_exact(system: IntervalMap, measure) -> AffineMap:
    if not supports_exact(system, measure):
        raise MethodMismatchError(
            f"exact masses need an affine-rational system under Lebesgue, got '{system.name}' "
            f"with '{measure.name}'"
        )
    return system


def _exact_rn(system: AffineMap, schedule: TargetSchedule, twist: TwistSpec, n: int,
              radius_mode: str) -> Fraction:
    M = schedule.mass_at(n)
    return sum(
        (system.window_mass(seg.lo, seg.hi, seg.lower, seg.upper, n) for seg in lebesgue_bands(twist, M, radius_mode)),
        Fraction(0),
    )


def _monte_carlo_estimate(hits: int, samples: int, tolerance: Optional[float]) -> MassEstimate:
    p = hits / samples
    stderr = math.sqrt(p * (1 - p) / samples)
    flagged = tolerance is not None and stderr > tolerance
    if flagged:
        logger.warning(f"⚠ Monte Carlo stderr {stderr:.3g} exceeds tolerance {tolerance:.3g}")
    return MassEstimate(p, stderr, MONTE_CARLO, flagged)


def measure_Rn(system: IntervalMap, measure, schedule: TargetSchedule, twist: TwistSpec, n: int,
               method: str = EXACT, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
               radius_mode: str = AT_FX, threads: int = 1, tolerance: Optional[float] = None) -> MassEstimate:
    """
    mu(R_n) exactly or by sampling.

    Raises:
        MethodMismatchError: exact mode on an unsupported system, measure or twist
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if method == EXACT:
        system = _require_exact(system, measure)
        return MassEstimate(_exact_rn(system, schedule, twist, n, radius_mode), 0.0, EXACT)
    if method != MONTE_CARLO:
        raise MethodMismatchError(f"unknown mass method '{method}'")

    sample = sample_hits(system, measure, schedule, twist, n, samples, seed, radius_mode, threads)
    hits = sum(1 for r in sample.records if r.hit_at(n))
    return _monte_carlo_estimate(hits, samples, tolerance)


def rn_intervals(system: IntervalMap, schedule: TargetSchedule, twist: TwistSpec, n: int,
                 radius_mode: str = AT_FX, budget: int = DEFAULT_INTERVAL_CAP) -> List[Interval]:
    """
    R_n as an explicit merged interval list (Lebesgue bands).

    Raises:
        UnsupportedSystemError / MethodMismatchError: no exact band solution
        BudgetExceededError: more than `budget` pieces
    """
    if not isinstance(system, AffineMap):
        raise MethodMismatchError(f"rn_intervals needs an affine-rational system, got '{system.name}'")
    M = schedule.mass_at(n)
    pieces: List[Interval] = []
    for seg in lebesgue_bands(twist, M, radius_mode):
        pieces.extend(system.window_intervals(seg.lo, seg.hi, seg.lower, seg.upper, n, budget))
        if len(pieces) > budget:
            raise BudgetExceededError(f"R_{n} has more than {budget} intervals")
    return merge_intervals(pieces)


def _constant_ball(schedule: TargetSchedule, y: Fraction, n: int):
    lo, hi = lebesgue_band(y, y, schedule.mass_at(n), AT_FX)
    return max(lo, Fraction(0)), min(hi, Fraction(1))


def _exact_pairwise(system: AffineMap, schedule: TargetSchedule, twist: TwistSpec, n: int, m: int,
                    radius_mode: str, budget: int) -> Fraction:
    y = twist.constant_value
    if y is not None and radius_mode == AT_FX and system.invariant_measure == "lebesgue":
        # R_n = T^-n B_n, so by invariance mu(R_n & R_{n+m}) = mu(B_n & T^-m B_{n+m})
        b_lo, b_hi = _constant_ball(schedule, y, n)
        c_lo, c_hi = _constant_ball(schedule, y, n + m)
        return system.window_mass(b_lo, b_hi, (Fraction(0), c_lo), (Fraction(0), c_hi), m)

    first_bands = lebesgue_bands(twist, schedule.mass_at(n), radius_mode)
    second_bands = lebesgue_bands(twist, schedule.mass_at(n + m), radius_mode)
    pieces = sum(system.window_piece_bound(seg.lo, seg.hi, n, budget) for seg in first_bands)
    work = pieces * len(second_bands)
    if work > budget:
        raise BudgetExceededError(
            f"mu(R_{n} n R_{n + m}) needs up to {work} window solves (budget {budget})"
        )

    first = rn_intervals(system, schedule, twist, n, radius_mode, max(pieces, 1))
    total = Fraction(0)
    for seg in second_bands:
        for iv in first:
            lo, hi = max(iv.lo, seg.lo), min(iv.hi, seg.hi)
            if hi > lo:
                total += system.window_mass(lo, hi, seg.lower, seg.upper, n + m)
    return total


def pairwise_mass(system: IntervalMap, measure, schedule: TargetSchedule, twist: TwistSpec, n: int, m: int,
                  method: str = EXACT, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
                  radius_mode: str = AT_FX, threads: int = 1,
                  budget: int = DEFAULT_PAIR_WINDOW_BUDGET, tolerance: Optional[float] = None) -> MassEstimate:
    """
    mu(R_n intersect R_{n+m}); m = 0 gives mu(R_n).

    Raises:
        MethodMismatchError: exact mode on an unsupported system, measure or twist
        BudgetExceededError: the exact pair would need more than `budget` window solves
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m == 0:
        return measure_Rn(system, measure, schedule, twist, n, method, samples, seed, radius_mode, threads, tolerance)
    if method == EXACT:
        system = _require_exact(system, measure)
        return MassEstimate(_exact_pairwise(system, schedule, twist, n, m, radius_mode, budget), 0.0, EXACT)
    if method != MONTE_CARLO:
        raise MethodMismatchError(f"unknown mass method '{method}'")

    sample = sample_hits(system, measure, schedule, twist, n + m, samples, seed, radius_mode, threads)
    hits = sum(1 for r in sample.records if r.hit_at(n) and r.hit_at(n + m))
    return _monte_carlo_estimate(hits, samples, tolerance)
