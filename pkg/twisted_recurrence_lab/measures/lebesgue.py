# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Lebesgue measure on [0,1]."""

from twisted_recurrence_lab.measures.base import MeasureModel


class LebesgueMeasure(MeasureModel):
    """Lebesgue measure. F(t)=t; keeps Fractions exact."""

    def __init__(self):
        super().__init__("lebesgue", support=(0.0, 1.0), regularity=(2.0, 1.0))

    def cdf(self, t):
        if t <= 0:
            return 0 * t
        if t >= 1:
            return 1 + 0 * t
        return t

    def density(self, t) -> float:
        return 1.0

    @property
    def has_density(self) -> bool:
        return True

    @property
    def is_exact(self) -> bool:
        return True

    def inverse_cdf(self, u):
        return min(max(u, 0), 1)

    def interior_radius(self, center, mass):
        return mass / 2
