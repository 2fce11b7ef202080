# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Base class for Borel probability measures on [0,1].

A measure is described by its CDF. Balls are always intersected with [0,1],
so B(x,r) means [max(x-r,0), min(x+r,1)].
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from twisted_recurrence_lab.utils.errors import DensityNormalizationError, NonInvertibleCdfError

logger = logging.getLogger(__name__)

# Absolute tolerance for numerically inverted CDFs
INVERSE_TOLERANCE = 1e-14


class MeasureModel(ABC):
    """Base class for measures (Lebesgue, Gauss, tabulated, ...)."""

    def __init__(
        self,
        name: str,
        support: Tuple[float, float] = (0.0, 1.0),
        regularity: Optional[Tuple[float, float]] = None,
    ):
        """
        Initialize measure.

        Args:
            name: Identifier used in configs and reports
            support: Closed interval carrying the measure
            regularity: Optional (c, s) asserting mu(B(x,r)) <= c r^s
        """
        self.name = name
        self.support = support
        self.regularity = regularity

    @abstractmethod
    def cdf(self, t):
        """
        Distribution function F(t) = mu([0,t]).

        Returns:
            F(t) clipped to [0,1]
        """
        raise NotImplementedError

    def density(self, t) -> Optional[float]:
        """Density at t, or None when the measure has no closed-form density."""
        return None

    @property
    def has_density(self) -> bool:
        return False

    @property
    def is_exact(self) -> bool:
        """True when cdf maps Fractions to Fractions without rounding."""
        return False

    def inverse_cdf(self, u: float) -> float:
        """Generic inverse by bracketing root search on the support."""
        if not getattr(self, "_invertible", False):
            self.check_invertible()
            self._invertible = True
        lo, hi = self.support
        if u <= 0:
            return float(lo)
        if u >= 1:
            return float(hi)
        return brentq(lambda t: float(self.cdf(t)) - u, lo, hi, xtol=INVERSE_TOLERANCE)

    def check_invertible(self, grid_size: int = 1025) -> None:
        """
        Refuse CDFs with flat spots on the support.

        Raises:
            NonInvertibleCdfError: F is not strictly increasing on a probe grid
        """
        lo, hi = self.support
        grid = np.linspace(lo, hi, grid_size)
        values = np.array([float(self.cdf(t)) for t in grid])
        steps = np.diff(values)
        if np.any(steps <= 0):
            bad = int(np.argmax(steps <= 0))
            raise NonInvertibleCdfError(
                f"CDF of '{self.name}' is not strictly increasing near "
                f"[{grid[bad]:.6g}, {grid[bad + 1]:.6g}]"
            )

    def interior_radius(self, center, mass):
        """
        Radius r with mu([center-r, center+r]) = mass for a ball inside [0,1].

        Generic bracketing solve; closed forms override this.
        """
        reach = min(center, 1 - center)
        return brentq(
            lambda r: float(self.ball_mass(center, r)) - float(mass),
            0.0, float(reach), xtol=INVERSE_TOLERANCE,
        )

    def interval_mass(self, a, b):
        """mu([a,b] intersected with [0,1])."""
        lo = max(a, 0)
        hi = min(b, 1)
        if hi <= lo:
            return 0 * (hi - lo)
        return self.cdf(hi) - self.cdf(lo)

    def density_mass(self, a, b) -> Optional[float]:
        """Adaptive quadrature of the density over [a,b] clipped to [0,1]; None without a density."""
        if not self.has_density:
            return None
        lo, hi = max(float(a), 0.0), min(float(b), 1.0)
        if hi <= lo:
            return 0.0
        value, _ = quad(self.density, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        return value

    def check_density(self, tolerance: float = 1e-9) -> None:
        """
        Raises:
            DensityNormalizationError: the density does not integrate to 1 within tolerance
        """
        total = self.density_mass(0.0, 1.0)
        if total is not None and abs(total - 1.0) > tolerance:
            raise DensityNormalizationError(f"density of '{self.name}' integrates to {total:.12g}, not 1")

    def ball_mass(self, center, radius):
        """
        Mass of the ball B(center, radius) clipped to [0,1].

        Args:
            center: Point in [0,1]
            radius: Nonnegative radius

        Returns:
            F(min(center+radius,1)) - F(max(center-radius,0))
        """
        if radius < 0:
            raise ValueError(f"radius must be nonnegative, got {radius}")
        return self.interval_mass(center - radius, center + radius)

    def sample_point(self, u):
        """
        Map a uniform deviate to a mu-distributed point through F^-1.

        Args:
            u: Uniform deviate in [0,1]
        """
        if u < 0 or u > 1:
            raise ValueError(f"uniform deviate must lie in [0,1], got {u}")
        return self.inverse_cdf(u)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


class CallableMeasure(MeasureModel):
    """Measure given by an arbitrary strictly increasing CDF callable."""

    def __init__(
        self,
        name: str,
        cdf: Callable[[float], float],
        density: Optional[Callable[[float], float]] = None,
        support: Tuple[float, float] = (0.0, 1.0),
        regularity: Optional[Tuple[float, float]] = None,
    ):
        super().__init__(name, support, regularity)
        self._cdf = cdf
        self._density = density

    def cdf(self, t):
        lo, hi = self.support
        if t <= lo:
            return 0.0
        if t >= hi:
            return 1.0
        return min(max(float(self._cdf(t)), 0.0), 1.0)

    def density(self, t) -> Optional[float]:
        if self._density is None:
            return None
        return float(self._density(t))

    @property
    def has_density(self) -> bool:
        return self._density is not None
