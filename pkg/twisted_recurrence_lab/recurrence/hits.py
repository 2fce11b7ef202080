# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Hit detection for twisted shrinking targets.

n is a hit time of x when |T^n x - f(x)| < r, with r the radius of mass M_n
at f(x) (at-fx) or at x (at-x). Hit times are kept as an integer bitset.

Affine-rational systems under Lebesgue measure run on integer orbit
numerators with exact rational bands; every other pair goes through the
certified orbit iteration and the numeric radius solver.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from twisted_recurrence_lab.dynamics.affine import AffineMap
from twisted_recurrence_lab.dynamics.base import IntervalMap, PrecisionPolicy
from twisted_recurrence_lab.recurrence.bands import AT_FX, RADIUS_MODES, lebesgue_band
from twisted_recurrence_lab.targets.radii import solve_radius
from twisted_recurrence_lab.targets.schedules import TargetSchedule
from twisted_recurrence_lab.twists.base import TwistSpec
from twisted_recurrence_lab.utils.sampling import DEFAULT_BATCH_SIZE, Batch, SeedStream, run_batches

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HitRecord:
    """Hit times of one seed within the horizon; bit n set means a hit at time n."""

    seed: object
    horizon: int
    bits: int
    radius_mode: str = AT_FX
    index: Optional[int] = None

    @property
    def times(self) -> List[int]:
        return [n for n in range(1, self.horizon + 1) if self.bits >> n & 1]

    @property
    def count(self) -> int:
        return bin(self.bits).count("1")

    @property
    def first_hit(self) -> Optional[int]:
        times = self.times
        return times[0] if times else None

    @property
    def last_hit(self) -> Optional[int]:
        return self.bits.bit_length() - 1 if self.bits else None

    def hit_at(self, n: int) -> bool:
        return bool(self.bits >> n & 1)

    def hits_from(self, n0: int) -> int:
        return bin(self.bits >> n0).count("1")

    def to_row(self) -> dict:
        return {
            "seed_index": self.index,
            "hit_count": self.count,
            "first_hit": self.first_hit,
            "last_hit": self.last_hit,
        }


def _exact_path(system: IntervalMap, measure) -> bool:
    if not (isinstance(system, AffineMap) and measure.is_exact and measure.name == "lebesgue"):
        return False
    return system.has_integer_slopes


def _exact_bits(nums: Sequence[int], L: int, x: Fraction, masses: Sequence[Fraction],
                twist: TwistSpec, radius_mode: str) -> int:
    value = twist(x)
    bits = 0
    for n, M in enumerate(masses, start=1):
        lo, hi = lebesgue_band(x, value, M, radius_mode)
        lo, hi = Fraction(lo), Fraction(hi)
        num = nums[n]
        if lo.numerator * L < num * lo.denominator and num * hi.denominator < hi.numerator * L:
            bits |= 1 << n
    return bits


def _numeric_bits(points, x, masses: Sequence, measure, twist: TwistSpec, radius_mode: str) -> int:
    value = float(twist(x))
    center = value if radius_mode == AT_FX else float(x)
    bits = 0
    for n, M in enumerate(masses, start=1):
        r = float(solve_radius(measure, center, float(M)).radius)
        if abs(float(points[n]) - value) < r:
            bits |= 1 << n
    return bits


def hit_times(system: IntervalMap, measure, schedule: TargetSchedule, twist: TwistSpec, x, N: int,
              radius_mode: str = AT_FX, precision: Optional[PrecisionPolicy] = None) -> HitRecord:
    """
    Hit times n in 1..N of the orbit of x.

    Raises:
        PrecisionError: the orbit cannot be certified to the policy's guard bits
    """
    if radius_mode not in RADIUS_MODES:
        raise ValueError(f"unknown radius mode '{radius_mode}'")
    masses = schedule.masses(N)

    if isinstance(x, (int, Fraction)) and _exact_path(system, measure):
        x = Fraction(x)
        nums, L = system.integer_orbit(x, N)
        return HitRecord(x, N, _exact_bits(nums, L, x, masses, twist, radius_mode), radius_mode)

    orbit = system.iterate(x, N, precision)
    return HitRecord(x, N, _numeric_bits(orbit.points, x, masses, measure, twist, radius_mode), radius_mode)


@dataclass(frozen=True)
class HitSample:
    """Hit records of sampled seeds, in sample-index order."""

    records: List[HitRecord]
    horizon: int

    @property
    def size(self) -> int:
        return len(self.records)

    def per_n_counts(self) -> List[int]:
        """counts[n-1] = number of seeds hitting at time n."""
        counts = [0] * self.horizon
        for record in self.records:
            bits = record.bits
            while bits:
                low = bits & -bits
                counts[low.bit_length() - 2] += 1
                bits ^= low
        return counts

    def mass_estimates(self) -> List[Dict[str, float]]:
        """Per-n frequency of R_n with its binomial standard error."""
        out = []
        for n, count in enumerate(self.per_n_counts(), start=1):
            p = count / self.size
            out.append({"n": n, "value": p, "stderr": math.sqrt(p * (1 - p) / self.size)})
        return out

    def fraction_with_tail_hit(self, n0: int) -> float:
        return sum(1 for r in self.records if r.bits >> n0) / self.size

    def mean_tail_hits(self, n0: int) -> float:
        return math.fsum(r.hits_from(n0) for r in self.records) / self.size

    def tail_hit_std(self, n0: int) -> float:
        mean = self.mean_tail_hits(n0)
        return math.sqrt(math.fsum((r.hits_from(n0) - mean) ** 2 for r in self.records) / self.size)

    def fraction_with_at_least(self, k: int) -> float:
        return sum(1 for r in self.records if r.count >= k) / self.size

    def fraction_hitting_at(self, n: int) -> float:
        return sum(1 for r in self.records if r.hit_at(n)) / self.size

    def count_histogram(self) -> Dict[int, int]:
        histogram: Dict[int, int] = {}
        for record in self.records:
            histogram[record.count] = histogram.get(record.count, 0) + 1
        return dict(sorted(histogram.items()))


def sample_hits(system: IntervalMap, measure, schedule: TargetSchedule, twist: TwistSpec, N: int,
                samples: int, seed: int = 0, radius_mode: str = AT_FX, threads: int = 1,
                batch_size: int = DEFAULT_BATCH_SIZE,
                precision: Optional[PrecisionPolicy] = None) -> HitSample:
    """
    Hit records for `samples` mu-distributed seeds.

    Batch b draws its seeds from the generator keyed by (seed, b), so the
    result is identical for every thread count.
    """
    if radius_mode not in RADIUS_MODES:
        raise ValueError(f"unknown radius mode '{radius_mode}'")
    precision = precision or PrecisionPolicy.for_system(system, N)
    masses = schedule.masses(N)
    exact_path = _exact_path(system, measure)
    stream = SeedStream(seed, batch_size)

    def work(batch: Batch) -> List[HitRecord]:
        rng = stream.rng(batch)
        out = []
        for index in range(batch.start, batch.stop):
            if exact_path:
                x = system.sample_seed(measure, rng, precision)
                nums, L = system.integer_orbit(x, N)
                bits = _exact_bits(nums, L, x, masses, twist, radius_mode)
                out.append(HitRecord(x, N, bits, radius_mode, index))
            else:
                x, orbit = system.sample_orbit(measure, rng, N, precision)
                bits = _numeric_bits(orbit.points, x, masses, measure, twist, radius_mode)
                out.append(HitRecord(x, N, bits, radius_mode, index))
        return out

    batches = stream.batches(samples)
    records = [r for part in run_batches(work, batches, threads) for r in part]
    logger.debug(f"{system.name}: sampled {len(records)} hit records up to N={N} ({len(batches)} batches)")
    return HitSample(records, N)
