# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Continued fractions and Liouville-type rotation numbers.

alpha = [0; a_1, a_2, ...] with convergents p_k/q_k, starting from
p_-1 = 1, q_-1 = 0, p_0 = 0, q_0 = 1 and p_k = a_k p_{k-1} + p_{k-2}.

build_liouville_rotation picks every next quotient large enough that
|q_k alpha - p_k| < psi(q_k), which places alpha in the set of numbers
approximable to order psi.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

from twisted_recurrence_lab.dynamics.affine import AffineMap

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUOTIENT_BITS = 16384


def convergents(partial_quotients: Sequence[int]) -> List[Tuple[int, int]]:
    """
    Convergents (p_k, q_k) of [0; a_1, ..., a_d], k = 0..d.

    Args:
        partial_quotients: a_1, ..., a_d (positive integers)
    """
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    out = [(p, q)]
    for a in partial_quotients:
        if a < 1:
            raise ValueError(f"partial quotients must be positive, got {a}")
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append((p, q))
    return out


def rotation_from_cf(partial_quotients: Sequence[int]) -> Fraction:
    """Exact value of [0; a_1, ..., a_d]."""
    if not partial_quotients:
        raise ValueError("need at least one partial quotient")
    p, q = convergents(partial_quotients)[-1]
    return Fraction(p, q)


@dataclass(frozen=True)
class ConvergentCheck:
    """Row of the verification table."""

    k: int
    p: int
    q: int
    psi: Fraction
    error: Fraction
    verified: bool


@dataclass(frozen=True)
class LiouvilleRotation:
    """Result of build_liouville_rotation."""

    partial_quotients: List[int]
    convergents: List[Tuple[int, int]]
    checks: List[ConvergentCheck]
    requested_depth: int
    truncated: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def alpha(self) -> Fraction:
        return rotation_from_cf(self.partial_quotients)

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    @property
    def denominators(self) -> List[int]:
        return [q for _, q in self.convergents]

    @property
    def all_verified(self) -> bool:
        return all(c.verified for c in self.checks)

    def system(self) -> AffineMap:
        return AffineMap.rotation(self.alpha)

    def to_dict(self) -> dict:
        return {
            "partial_quotients": [str(a) for a in self.partial_quotients],
            "denominators": [str(q) for q in self.denominators],
            "requested_depth": self.requested_depth,
            "depth": self.depth,
            "truncated": self.truncated,
            "checks": [
                {"k": c.k, "q": str(c.q), "error_log2": _log2(c.error), "psi_log2": _log2(c.psi),
                 "verified": c.verified}
                for c in self.checks
            ],
        }


def _log2(value: Fraction) -> float:
    if value <= 0:
        return -math.inf
    return math.log2(value.numerator) - math.log2(value.denominator)


def _psi_too_small(psi, q: int, max_bits: int) -> bool:
    """Estimate the size of the next quotient without evaluating psi when possible."""
    log2 = getattr(psi, "log2", None)
    if log2 is None:
        return False
    return -(log2(q) + math.log2(q)) > max_bits


def build_liouville_rotation(psi: Callable[[int], object], depth: int,
                             max_bits: int = DEFAULT_MAX_QUOTIENT_BITS) -> LiouvilleRotation:
    """
    Greedy continued fraction with |q_k alpha - p_k| < psi(q_k) for k < depth.

    a_{k+1} = ceil(1 / (q_k psi(q_k))) + 1, which gives
    ||q_k alpha|| <= 1 / (a_{k+1} q_k) < psi(q_k).

    Args:
        psi: Positive decreasing function of the integer q
        depth: Number of partial quotients (>= 2)
        max_bits: Bit-length cap on a single quotient; exceeding it truncates the depth

    Returns:
        LiouvilleRotation with the verification table
    """
    if depth < 2:
        raise ValueError("depth must be at least 2")

    quotients: List[int] = []
    psi_values: List[Fraction] = []
    notes: List[str] = []
    q_prev, q = 0, 1
    truncated = False

    for k in range(depth):
        if _psi_too_small(psi, q, max_bits):
            truncated = True
            notes.append(f"psi(q_{k}) too small for the {max_bits}-bit quotient budget")
            break
        value = Fraction(psi(q))
        if value <= 0:
            truncated = True
            notes.append(f"psi(q_{k}) evaluated to {value}")
            break
        a = math.ceil(1 / (q * value)) + 1
        if a.bit_length() > max_bits:
            truncated = True
            notes.append(f"a_{k + 1} needs {a.bit_length()} bits (cap {max_bits})")
            break
        quotients.append(a)
        psi_values.append(value)
        q, q_prev = a * q + q_prev, q

    if truncated:
        logger.warning(f"⚠ Liouville construction truncated at depth {len(quotients)}: {notes[-1]}")
    if not quotients:
        raise ValueError("could not choose a single partial quotient")

    conv = convergents(quotients)
    d = len(quotients)
    p_d, q_d = conv[d]
    p_prev, q_prev = conv[d - 1]
    # every alpha with these quotients lies between these two fractions
    enclosure = (Fraction(p_d, q_d), Fraction(p_d + p_prev, q_d + q_prev))

    checks = []
    for k in range(d):
        p_k, q_k = conv[k]
        error = max(abs(q_k * e - p_k) for e in enclosure)
        checks.append(ConvergentCheck(k, p_k, q_k, psi_values[k], error, error < psi_values[k]))

    result = LiouvilleRotation(quotients, conv, checks, depth, truncated, notes)
    if result.all_verified:
        logger.info(f"✓ Liouville rotation with {d} quotients, q_{d} has {q_d.bit_length()} bits")
    else:
        logger.warning("⚠ Liouville rotation failed verification")
    return result
