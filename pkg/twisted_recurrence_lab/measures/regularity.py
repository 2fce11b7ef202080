# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Ahlfors regularity probes.

Upper regularity means mu(B(x,r)) <= c r^s for every ball. Lower regularity
(mu(B(x,r)) >= r^s / c for balls inside [0,1]) is only probed and reported.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twisted_recurrence_lab.measures.base import MeasureModel

logger = logging.getLogger(__name__)

Probe = Tuple[float, float]

RATIO_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AhlforsReport:
    """Outcome of a regularity probe run."""

    passed: bool
    worst_ratio: float
    worst_probe: Optional[Probe]
    n_probes: int
    c: float
    s: float
    kind: str = "upper"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "worst_ratio": self.worst_ratio,
            "worst_probe": list(self.worst_probe) if self.worst_probe else None,
            "n_probes": self.n_probes,
            "c": self.c,
            "s": self.s,
        }


def probe_grid(n_centers: int = 40, n_radii: int = 25, r_min: float = 1e-4, r_max: float = 0.5) -> List[Probe]:
    """Centers evenly spread over [0,1] crossed with log-spaced radii."""
    centers = np.linspace(0.0, 1.0, n_centers)
    radii = np.geomspace(r_min, r_max, n_radii)
    return [(float(x), float(r)) for x in centers for r in radii]


def verify_upper_ahlfors(measure: MeasureModel, c: float, s: float, probes: Sequence[Probe]) -> AhlforsReport:
    """
    Check mu(B(x,r)) <= c r^s on every probe.

    Args:
        measure: Measure under test
        c: Positive constant
        s: Positive exponent
        probes: Nonempty (center, radius) pairs with radius > 0

    Returns:
        AhlforsReport with the maximum of mu(B)/(c r^s)
    """
    if not probes:
        raise ValueError("probes must be nonempty")

    worst_ratio = -np.inf
    worst_probe = None
    for x, r in probes:
        if r <= 0:
            raise ValueError(f"probe radius must be positive, got {r}")
        ratio = float(measure.ball_mass(x, r)) / (c * r ** s)
        if ratio > worst_ratio:
            worst_ratio, worst_probe = ratio, (x, r)

    passed = worst_ratio <= 1.0 + RATIO_TOLERANCE
    if passed:
        logger.debug(f"✓ {measure.name}: upper Ahlfors (c={c}, s={s}) holds, worst ratio {worst_ratio:.6f}")
    else:
        logger.info(f"✗ {measure.name}: upper Ahlfors (c={c}, s={s}) fails at {worst_probe}, ratio {worst_ratio:.6g}")

    return AhlforsReport(passed, float(worst_ratio), worst_probe, len(probes), c, s, "upper")


def verify_lower_ahlfors(measure: MeasureModel, c: float, s: float, probes: Sequence[Probe]) -> AhlforsReport:
    """
    Check mu(B(x,r)) >= r^s / c on probes whose ball stays inside [0,1].

    Clipped probes are skipped. The reported ratio is min of c mu(B) / r^s,
    so the check passes when it is at least one.
    """
    inside = [(x, r) for x, r in probes if r > 0 and x - r >= 0 and x + r <= 1]
    if not inside:
        raise ValueError("no probe ball lies inside [0,1]")

    worst_ratio = np.inf
    worst_probe = None
    for x, r in inside:
        ratio = c * float(measure.ball_mass(x, r)) / r ** s
        if ratio < worst_ratio:
            worst_ratio, worst_probe = ratio, (x, r)

    passed = worst_ratio >= 1.0 - RATIO_TOLERANCE
    return AhlforsReport(passed, float(worst_ratio), worst_probe, len(inside), c, s, "lower")
