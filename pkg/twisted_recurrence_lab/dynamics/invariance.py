# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Measure-preservation check |mu(T^-1 A) - mu(A)| over random intervals."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.utils.errors import UnsupportedSystemError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    max_deviation: float
    worst_interval: Optional[Tuple[float, float]]
    n_intervals: int


def check_invariance(system: IntervalMap, measure, n_intervals: int = 100, seed: int = 0,
                     tolerance: float = 1e-9) -> InvarianceReport:
    """
    Compare mu(T^-1 A) with mu(A) on random intervals A.

    Affine systems under an exact measure are compared in rational arithmetic.

    Raises:
        UnsupportedSystemError: the system has no preimage_mass
    """
    preimage_mass = getattr(system, "preimage_mass", None)
    if preimage_mass is None:
        raise UnsupportedSystemError(f"{system.name} has no preimage computation")

    rng = np.random.default_rng(seed)
    worst, worst_iv = 0.0, None
    for _ in range(n_intervals):
        a, b = sorted(float(v) for v in rng.random(2))
        lo, hi = Fraction(a), Fraction(b)
        deviation = abs(float(preimage_mass(lo, hi, measure) - measure.interval_mass(lo, hi)))
        if deviation > worst:
            worst, worst_iv = deviation, (a, b)

    passed = worst <= tolerance
    if passed:
        logger.debug(f"✓ {system.name} preserves {measure.name} (max deviation {worst:.3g})")
    else:
        logger.warning(f"⚠ {system.name} does not preserve {measure.name}: deviation {worst:.3g} on {worst_iv}")
    return InvarianceReport(passed, worst, worst_iv, n_intervals)
