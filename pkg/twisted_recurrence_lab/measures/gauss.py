# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Gauss measure dmu = dx / ((1+x) ln 2), the invariant measure of x -> 1/x mod 1.
"""

import math

from twisted_recurrence_lab.measures.base import MeasureModel

LN2 = math.log(2.0)


class GaussMeasure(MeasureModel):
    """Gauss measure with closed-form CDF log2(1+t) and inverse 2^u - 1."""

    def __init__(self):
        # density <= 1/ln2, so mu(B(x,r)) <= 2r/ln2
        super().__init__("gauss", support=(0.0, 1.0), regularity=(2.0 / LN2, 1.0))

    def cdf(self, t):
        t = min(max(float(t), 0.0), 1.0)
        return math.log2(1.0 + t)

    def density(self, t) -> float:
        return 1.0 / ((1.0 + float(t)) * LN2)

    @property
    def has_density(self) -> bool:
        return True

    def inverse_cdf(self, u) -> float:
        u = min(max(float(u), 0.0), 1.0)
        return min(math.expm1(u * LN2), 1.0)

    def interior_radius(self, center, mass) -> float:
        # log2((1+y+r)/(1+y-r)) = M
        growth = 2.0 ** float(mass)
        return (1.0 + float(center)) * (growth - 1.0) / (growth + 1.0)
