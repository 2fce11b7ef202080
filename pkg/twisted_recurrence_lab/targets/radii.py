# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Radii r(x) with mu(B(x, r)) = M and the 1-Lipschitz check on r.

The clipped ball [max(x-r,0), min(x+r,1)] is in one of three regimes:
touching 0, touching 1, or strictly inside [0,1]. The first two invert
the CDF directly; the interior case goes to the measure's interior_radius.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from twisted_recurrence_lab.measures.base import MeasureModel
from twisted_recurrence_lab.utils.errors import RadiusSolveError

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-12
LIPSCHITZ_TOLERANCE = 1e-10

LEFT = "left"
RIGHT = "right"
INTERIOR = "interior"


@dataclass(frozen=True)
class RadiusSolution:
    """Radius with its mass residual |mu(B(x,r)) - M| and the regime used."""

    radius: object
    residual: float
    regime: str


def solve_radius(measure: MeasureModel, center, mass) -> RadiusSolution:
    """
    Unique r with mu(B(center, r)) = mass.

    Raises:
        RadiusSolveError: mass outside (0,1), or the residual exceeds 1e-12
    """
    if not 0 < mass < 1:
        raise RadiusSolveError(f"target mass {mass} is not reachable (need 0 < M < 1)")

    left = measure.inverse_cdf(mass) - center
    if left >= center:
        regime, radius = LEFT, left
    else:
        right = center - measure.inverse_cdf(1 - mass)
        if right >= 1 - center and center - right >= 0:
            regime, radius = RIGHT, right
        else:
            regime, radius = INTERIOR, measure.interior_radius(center, mass)

    residual = abs(float(measure.ball_mass(center, radius) - mass))
    if residual > RESIDUAL_TOLERANCE:
        raise RadiusSolveError(
            f"{measure.name}: radius {float(radius):.17g} at {float(center):.17g} misses "
            f"mass {float(mass):.17g} by {residual:.3g}"
        )
    return RadiusSolution(radius, residual, regime)


def radius_for_mass(measure: MeasureModel, x, M):
    """r(x) = inf{r : mu(B(x, r)) = M}."""
    return solve_radius(measure, x, M).radius


@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    worst_slope: float
    worst_pair: Optional[Tuple[float, float]]
    n_pairs: int

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "worst_slope": self.worst_slope,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "n_pairs": self.n_pairs,
        }


def lipschitz_radius_check(measure: MeasureModel, M, pairs: Sequence[Tuple[float, float]],
                           tolerance: float = LIPSCHITZ_TOLERANCE) -> LipschitzReport:
    """
    Check |r(x) - r(y)| <= |x - y| + tolerance over the given pairs.

    Returns:
        LipschitzReport with the largest |r(x) - r(y)| / |x - y|
    """
    passed = True
    worst_slope = 0.0
    worst_pair = None
    for x, y in pairs:
        rx = radius_for_mass(measure, x, M)
        ry = radius_for_mass(measure, y, M)
        gap = abs(float(rx - ry))
        dist = abs(float(x - y))
        if gap > dist + tolerance:
            passed = False
        if dist > 0 and gap / dist > worst_slope:
            worst_slope, worst_pair = gap / dist, (float(x), float(y))

    if passed:
        logger.debug(f"✓ {measure.name}: radius is 1-Lipschitz at M={float(M):g} (worst slope {worst_slope:.6f})")
    else:
        logger.warning(f"⚠ {measure.name}: radius Lipschitz check failed at M={float(M):g}, pair {worst_pair}")
    return LipschitzReport(passed, worst_slope, worst_pair, len(pairs))
