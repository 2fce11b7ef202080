# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Base class for interval maps T: [0,1] -> [0,1].

Orbits are computed exactly when the map and the seed are rational, otherwise
with mpmath at the working precision of a PrecisionPolicy. The mpmath path
carries a running forward error bound and refuses to continue when a point is
too close to a branch boundary to decide its branch.

Each high-precision orbit gets its own MPContext so concurrent workers never
share (or reset) a global precision.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from mpmath import MPContext

from twisted_recurrence_lab.utils.errors import PrecisionError
from twisted_recurrence_lab.utils.sampling import uniform_dyadic

logger = logging.getLogger(__name__)

DEFAULT_GUARD_BITS = 64
ROUNDING_SLACK_BITS = 8
MAX_WIDENINGS = 3


@dataclass(frozen=True)
class PrecisionPolicy:
    """
    Working precision for orbit iteration.

    working_bits must cover n_max * expansion_bits + guard_bits, since every
    step can amplify the error by up to 2**expansion_bits.
    """

    n_max: int
    guard_bits: int = DEFAULT_GUARD_BITS
    working_bits: int = 0
    expansion_bits: int = 1

    def __post_init__(self):
        if self.working_bits == 0:
            # room for per-step rounding on top of the expansion budget
            slack = ROUNDING_SLACK_BITS + self.n_max.bit_length()
            object.__setattr__(self, "working_bits", self.required_bits + slack)

    @classmethod
    def for_system(cls, system: "IntervalMap", n_max: int, guard_bits: int = DEFAULT_GUARD_BITS,
                   working_bits: Optional[int] = None) -> "PrecisionPolicy":
        return cls(
            n_max=n_max,
            guard_bits=guard_bits,
            working_bits=working_bits or 0,
            expansion_bits=system.expansion_bits,
        )

    @property
    def required_bits(self) -> int:
        return self.n_max * self.expansion_bits + self.guard_bits

    def validate(self) -> None:
        if self.working_bits < self.required_bits:
            raise PrecisionError(
                f"working_bits={self.working_bits} below required {self.required_bits} "
                f"(n_max={self.n_max}, expansion_bits={self.expansion_bits}, guard_bits={self.guard_bits})"
            )

    def context(self) -> MPContext:
        """Fresh mpmath context at working precision."""
        ctx = MPContext()
        ctx.prec = self.working_bits
        return ctx

    def widened(self, factor: int = 2) -> "PrecisionPolicy":
        return replace(self, working_bits=self.working_bits * factor)


@dataclass(frozen=True)
class Orbit:
    """Orbit (x, Tx, ..., T^n x) with a certified bound on the last iterate."""

    points: Tuple
    error_bound: object
    exact: bool
    working_bits: Optional[int] = None

    @property
    def last(self):
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.points)


class IntervalMap(ABC):
    """Base class for interval maps (affine, Gauss, ...)."""

    def __init__(self, name: str, invariant_measure: str, expansion_bits: int):
        """
        Initialize map.

        Args:
            name: Identifier used in configs and reports
            invariant_measure: Name of the measure preserved by T
            expansion_bits: ceil(log2) of the per-step expansion used for precision planning
        """
        self.name = name
        self.invariant_measure = invariant_measure
        self.expansion_bits = expansion_bits

    @property
    def is_affine_rational(self) -> bool:
        """True when every branch is affine with rational coefficients."""
        return False

    @property
    def supports_exact(self) -> bool:
        """True when rational seeds can be iterated in exact arithmetic."""
        return self.is_affine_rational

    @property
    @abstractmethod
    def lipschitz_bound(self) -> List[float]:
        """Per-branch expansion bounds (sup |T'| on each branch)."""
        raise NotImplementedError

    @abstractmethod
    def _apply_exact(self, x: Fraction) -> Fraction:
        raise NotImplementedError

    @abstractmethod
    def _apply_mp(self, ctx: MPContext, x, error):
        """
        One step in the given mpmath context.

        Returns:
            (T(x), propagated error bound) as mpf values

        Raises:
            PrecisionError: branch of x cannot be decided within `error`
        """
        raise NotImplementedError

    @staticmethod
    def _rounding(ctx: MPContext):
        """Absolute rounding allowance for one step at the context precision."""
        return ctx.ldexp(1, -(ctx.prec - 4))

    def evaluate(self, x, precision: Optional[PrecisionPolicy] = None):
        """T(x): exact for rational seeds on exact systems, mpmath otherwise."""
        if isinstance(x, (int, Fraction)) and self.supports_exact:
            return self._apply_exact(Fraction(x))
        return self.iterate(x, 1, precision).last

    def iterate(self, x, n: int, precision: Optional[PrecisionPolicy] = None) -> Orbit:
        """
        Orbit (x, Tx, ..., T^n x).

        Raises:
            PrecisionError: n above precision.n_max, precision too small, or
                the certified error of an iterate exceeds 2**-guard_bits
        """
        precision = precision or PrecisionPolicy.for_system(self, n)
        if n > precision.n_max:
            raise PrecisionError(f"requested {n} iterations, precision policy allows {precision.n_max}")

        if isinstance(x, (int, Fraction)) and self.supports_exact:
            points = [Fraction(x)]
            for _ in range(n):
                points.append(self._apply_exact(points[-1]))
            return Orbit(tuple(points), Fraction(0), True)

        precision.validate()
        ctx = precision.context()
        tolerance = ctx.ldexp(1, -precision.guard_bits)
        err = ctx.mpf(0)
        if isinstance(x, Fraction):
            if x.denominator & (x.denominator - 1):
                err = self._rounding(ctx)
            x = ctx.mpf(x.numerator) / x.denominator
        points = [ctx.mpf(x)]
        for _ in range(n):
            y, err = self._apply_mp(ctx, points[-1], err)
            points.append(y)
        if err > tolerance:
            raise PrecisionError(
                f"{self.name}: certified error {ctx.nstr(err, 5)} after {n} steps exceeds "
                f"2^-{precision.guard_bits}"
            )
        return Orbit(tuple(points), err, False, precision.working_bits)

    def sample_seed(self, measure, rng: np.random.Generator, precision: PrecisionPolicy):
        """
        Draw one mu-distributed seed.

        Exact systems under an exact measure get dyadic rationals with
        working_bits random bits; everything else goes through the inverse CDF.
        """
        if self.supports_exact and measure.is_exact:
            return measure.sample_point(uniform_dyadic(rng, precision.working_bits))
        return measure.sample_point(float(rng.random()))

    def sample_orbit(self, measure, rng: np.random.Generator, n: int, precision: PrecisionPolicy):
        """
        Draw a seed and its orbit up to T^n x.

        Undecidable branches are retried at doubled working precision, up to
        MAX_WIDENINGS times, before the PrecisionError propagates.

        Returns:
            (seed, Orbit)
        """
        seed = self.sample_seed(measure, rng, precision)
        policy = precision
        for attempt in range(MAX_WIDENINGS + 1):
            try:
                return seed, self.iterate(seed, n, policy)
            except PrecisionError:
                if attempt == MAX_WIDENINGS:
                    raise
                policy = policy.widened()
                logger.debug(f"{self.name}: retrying seed at {policy.working_bits} bits")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


def evaluate_map(system: IntervalMap, x, precision: Optional[PrecisionPolicy] = None):
    """Evaluate T(x) at the policy's working precision (exact for rationals)."""
    return system.evaluate(x, precision)


def iterate_orbit(system: IntervalMap, x, n: int, precision: Optional[PrecisionPolicy] = None) -> Orbit:
    """Return the orbit (x, ..., T^n x) with its certified error bound."""
    return system.iterate(x, n, precision)
