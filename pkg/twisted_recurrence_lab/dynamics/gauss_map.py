# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Gauss map T(x) = 1/x mod 1, T(0) = 0, preserving the Gauss measure.

Branch k is (1/(k+1), 1/k]. |T'(x)| = 1/x^2 is unbounded, so the declared
expansion_bits only plans the working precision; the running error
certificate decides whether an orbit is trustworthy.
"""

import logging
import math
from fractions import Fraction
from typing import List

from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.utils.errors import PrecisionError

logger = logging.getLogger(__name__)

# Lyapunov exponent pi^2 / (6 ln 2) is about 3.4 bits per step
GAUSS_EXPANSION_BITS = 4
DEFAULT_PREIMAGE_TERMS = 4096


class GaussMap(IntervalMap):
    """Continued-fraction shift."""

    def __init__(self):
        super().__init__("gauss", invariant_measure="gauss", expansion_bits=GAUSS_EXPANSION_BITS)

    @property
    def supports_exact(self) -> bool:
        # 1/x - k keeps rationals rational
        return True

    @property
    def lipschitz_bound(self) -> List[float]:
        return [math.inf]

    def _apply_exact(self, x: Fraction) -> Fraction:
        if x < 0 or x > 1:
            raise ValueError(f"point {x} outside [0,1]")
        if x == 0:
            return Fraction(0)
        inv = 1 / x
        return inv - math.floor(inv)

    def _apply_mp(self, ctx, x, error):
        if x == 0 and error == 0:
            return ctx.mpf(0), ctx.mpf(0)
        lowest = x - error
        if lowest <= 0:
            raise PrecisionError(f"gauss: point {ctx.nstr(x, 8)} not separated from 0 (error {ctx.nstr(error, 5)})")

        inv = 1 / x
        spread = error / (x * lowest) + inv * self._rounding(ctx)
        k = ctx.floor(inv)
        if ctx.floor(inv - spread) != k or ctx.floor(inv + spread) != k:
            raise PrecisionError(
                f"gauss: branch of {ctx.nstr(x, 8)} undecidable within error {ctx.nstr(spread, 5)}"
            )
        return inv - k, spread + self._rounding(ctx)

    def preimage_mass(self, lo, hi, measure, terms: int = DEFAULT_PREIMAGE_TERMS) -> float:
        """
        mu(T^-1 [lo, hi)) summed over the first `terms` branches plus a tail.

        The tail is closed form for the Gauss measure and the mass of
        [0, 1/(terms+1)) scaled by the target mass otherwise.
        """
        lo, hi = float(lo), float(hi)
        pieces = [
            float(measure.interval_mass(1.0 / (k + hi), 1.0 / (k + lo)))
            for k in range(1, terms + 1)
        ]
        if measure.name == "gauss":
            tail = math.log2((terms + 1 + hi) / (terms + 1 + lo))
        else:
            tail = float(measure.interval_mass(0.0, 1.0 / (terms + 1))) * float(measure.interval_mass(lo, hi))
        return math.fsum(pieces) + tail
