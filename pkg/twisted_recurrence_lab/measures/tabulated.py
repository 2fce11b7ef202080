# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Measure defined by a CDF table (x, F(x)), linearly interpolated.

Table files are two-column CSVs. A non-numeric first row is treated as a
header; lines starting with '#' are skipped.
"""

import csv
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from twisted_recurrence_lab.measures.base import MeasureModel
from twisted_recurrence_lab.utils.errors import ConfigError, NonInvertibleCdfError

logger = logging.getLogger(__name__)


class TabulatedMeasure(MeasureModel):
    """Piecewise-linear CDF through the given knots."""

    def __init__(self, xs: Sequence[float], values: Sequence[float], name: str = "cdf-table"):
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)

        if xs.ndim != 1 or xs.shape != values.shape or len(xs) < 2:
            raise ConfigError("cdf-table needs at least two (x, F) rows of equal length")
        if np.any(np.diff(xs) <= 0):
            raise ConfigError("cdf-table x column must be strictly increasing")
        if xs[0] < 0 or xs[-1] > 1:
            raise ConfigError("cdf-table x column must lie in [0,1]")
        if abs(values[0]) > 1e-12 or abs(values[-1] - 1) > 1e-12:
            raise ConfigError(
                f"cdf-table must run from F=0 to F=1 (got {values[0]:g} .. {values[-1]:g})"
            )
        slopes = np.diff(values) / np.diff(xs)
        if np.any(slopes <= 0):
            bad = int(np.argmax(slopes <= 0))
            raise NonInvertibleCdfError(
                f"cdf-table is flat or decreasing on [{xs[bad]:g}, {xs[bad + 1]:g}]"
            )

        self.xs = xs
        self.values = values
        self.values[0] = 0.0
        self.values[-1] = 1.0
        self.slopes = slopes

        max_density = float(slopes.max())
        super().__init__(
            name,
            support=(float(xs[0]), float(xs[-1])),
            regularity=(2.0 * max_density, 1.0),
        )

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "TabulatedMeasure":
        """
        Load a cdf-table from a two-column CSV file.

        Raises:
            ConfigError: file missing or malformed
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"cdf-table file not found: {path}")

        xs, values = [], []
        with path.open(newline="") as handle:
            for row_number, row in enumerate(csv.reader(handle)):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    x, fx = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if row_number == 0:
                        continue
                    raise ConfigError(f"{path}:{row_number + 1}: expected two numbers, got {row}")
                xs.append(x)
                values.append(fx)

        logger.debug(f"Loaded {len(xs)} CDF knots from {path}")
        return cls(xs, values, name=f"cdf-table:{path.name}")

    def cdf(self, t):
        return float(np.interp(float(t), self.xs, self.values))

    def density(self, t) -> float:
        t = float(t)
        if t < self.xs[0] or t > self.xs[-1]:
            return 0.0
        idx = min(int(np.searchsorted(self.xs, t, side="right")) - 1, len(self.slopes) - 1)
        return float(self.slopes[max(idx, 0)])

    @property
    def has_density(self) -> bool:
        return True

    def inverse_cdf(self, u) -> float:
        return float(np.interp(float(u), self.values, self.xs))
