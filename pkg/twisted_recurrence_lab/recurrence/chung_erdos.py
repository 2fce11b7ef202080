# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Second-moment bounds for unions of events.

mu(A_1 u ... u A_n) >= (sum mu(A_j))^2 / sum_{j,k} mu(A_j n A_k)

plus the reference value that bound takes for independent events and the
Poisson-binomial law of the number of events hit, both computed from the
single masses alone.
"""

import logging
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

MATRIX_TOLERANCE = 1e-12


def _total(values) -> object:
    values = list(values)
    if all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(float(v) for v in values)


def validate_pairwise(masses: Sequence, pairwise: Sequence[Sequence], tolerance: float = MATRIX_TOLERANCE) -> None:
    """
    Raises:
        ValueError: matrix not square, not symmetric, diagonal different from
            the masses, or an entry above the smaller of its two masses
    """
    n = len(masses)
    if len(pairwise) != n or any(len(row) != n for row in pairwise):
        raise ValueError(f"pairwise matrix must be {n}x{n}")
    for j in range(n):
        if abs(float(pairwise[j][j] - masses[j])) > tolerance:
            raise ValueError(f"diagonal entry {j} differs from its mass")
        for k in range(j + 1, n):
            if abs(float(pairwise[j][k] - pairwise[k][j])) > tolerance:
                raise ValueError(f"pairwise matrix not symmetric at ({j}, {k})")
            if float(pairwise[j][k]) > float(min(masses[j], masses[k])) + tolerance:
                raise ValueError(f"entry ({j}, {k}) exceeds the smaller mass")


def chung_erdos_ratio(total, second_moment):
    """S^2 / C, defined as 0 when C is 0."""
    if second_moment == 0:
        return 0 * total
    return total * total / second_moment


def chung_erdos_lower_bound(masses: Sequence, pairwise: Sequence[Sequence]) -> object:
    """
    (sum of masses)^2 / (sum of all pairwise entries).

    Exact when every input is rational.

    Raises:
        ValueError: inconsistent pairwise matrix (see validate_pairwise)
    """
    validate_pairwise(masses, pairwise)
    total = _total(masses)
    second_moment = _total(v for row in pairwise for v in row)
    return chung_erdos_ratio(total, second_moment)


def independence_reference(masses: Sequence) -> float:
    """Chung-Erdos bound for independent events: S^2 / (S + S^2 - sum mu^2)."""
    values = [float(m) for m in masses]
    total = math.fsum(values)
    squares = math.fsum(v * v for v in values)
    denominator = total + total * total - squares
    return total * total / denominator if denominator > 0 else 0.0


def poisson_binomial_pmf(probabilities: Sequence) -> np.ndarray:
    """pmf[k] = P(exactly k of the independent events occur)."""
    pmf = np.zeros(len(probabilities) + 1)
    pmf[0] = 1.0
    for i, p in enumerate(probabilities, start=1):
        p = float(p)
        pmf[1:i + 1] = pmf[1:i + 1] * (1.0 - p) + pmf[0:i] * p
        pmf[0] *= 1.0 - p
    return pmf


def prob_at_least(probabilities: Sequence, k: int) -> float:
    """P(at least k of the independent events occur)."""
    pmf = poisson_binomial_pmf(probabilities)
    return float(min(max(pmf[k:].sum(), 0.0), 1.0))


def prob_any(probabilities: Sequence) -> float:
    """1 - prod(1 - p)."""
    return 1.0 - math.prod(1.0 - float(p) for p in probabilities)

