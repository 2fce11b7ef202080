# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Twist functions f: [0,1] -> [0,1].

A twist is a finite list of pieces on consecutive intervals. Each piece
carries a formula defined on the whole line (so one-sided limits at the piece
ends are plain evaluations), a monotone direction and a Lipschitz constant.
At a shared endpoint the left piece governs.
"""

import logging
from abc import ABC, abstractmethod
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twisted_recurrence_lab.utils.errors import MethodMismatchError

logger = logging.getLogger(__name__)

DEFAULT_MAX_PIECES = 64

# (lo, hi, slope, intercept): f(x) = slope * x + intercept on [lo, hi)
Segment = Tuple[Fraction, Fraction, Fraction, Fraction]

INCREASING = "increasing"
DECREASING = "decreasing"
CONSTANT = "constant"


class Formula(ABC):
    """Continuous function of x with values in [0,1]."""

    @abstractmethod
    def __call__(self, x):
        raise NotImplementedError

    def segments(self, lo: Fraction, hi: Fraction) -> List[Segment]:
        """
        Affine segments of the formula on [lo, hi).

        Raises:
            MethodMismatchError: formula is not piecewise affine with rational coefficients
        """
        raise MethodMismatchError(f"{type(self).__name__} has no exact affine segments")


def _clamp(value):
    if value < 0:
        return 0 * value
    if value > 1:
        return 0 * value + 1
    return value


@dataclass(frozen=True)
class AffineFormula(Formula):
    """clamp(slope * x + intercept) into [0,1]."""

    slope: Fraction
    intercept: Fraction

    def __call__(self, x):
        return _clamp(self.slope * x + self.intercept)

    def segments(self, lo: Fraction, hi: Fraction) -> List[Segment]:
        if hi <= lo:
            return []
        if self.slope == 0:
            return [(lo, hi, Fraction(0), _clamp(self.intercept))]
        cuts = sorted({lo, hi} | {
            t for t in ((0 - self.intercept) / self.slope, (1 - self.intercept) / self.slope)
            if lo < t < hi
        })
        out = []
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            raw = self.slope * mid + self.intercept
            if raw < 0:
                out.append((a, b, Fraction(0), Fraction(0)))
            elif raw > 1:
                out.append((a, b, Fraction(0), Fraction(1)))
            else:
                out.append((a, b, self.slope, self.intercept))
        return out


@dataclass(frozen=True)
class ExtendedFormula(Formula):
    """base(min(max(x, a), b)): constant one-sided limits outside (a, b)."""

    base: Formula
    a: Fraction
    b: Fraction

    def __call__(self, x):
        if x <= self.a:
            return self.base(self.a)
        if x >= self.b:
            return self.base(self.b)
        return self.base(x)

    def segments(self, lo: Fraction, hi: Fraction) -> List[Segment]:
        out: List[Segment] = []
        if lo < self.a:
            out.append((lo, min(hi, self.a), Fraction(0), Fraction(self.base(self.a))))
        inner_lo, inner_hi = max(lo, self.a), min(hi, self.b)
        out.extend(self.base.segments(inner_lo, inner_hi))
        if hi > self.b:
            out.append((max(lo, self.b), hi, Fraction(0), Fraction(self.base(self.b))))
        return [s for s in out if s[1] > s[0]]


@dataclass(frozen=True)
class TwistPiece:
    """One piece (lo, hi) of a twist."""

    lo: Fraction
    hi: Fraction
    formula: Formula
    direction: str
    lipschitz: Fraction


class TwistSpec:
    """Piecewise Lipschitz, piecewise monotone map of [0,1] into itself."""

    def __init__(self, name: str, pieces: Sequence[TwistPiece], max_pieces: int = DEFAULT_MAX_PIECES):
        """
        Initialize twist.

        Args:
            name: Identifier used in configs and reports
            pieces: Consecutive pieces covering [0,1]
            max_pieces: Pieces beyond this cap are dropped (the last kept piece is stretched to 1)
        """
        pieces = sorted(pieces, key=lambda p: p.lo)
        if not pieces:
            raise ValueError(f"twist '{name}' has no pieces")
        if len(pieces) > max_pieces:
            logger.warning(f"⚠ twist '{name}' truncated from {len(pieces)} to {max_pieces} pieces")
            last = pieces[max_pieces - 1]
            pieces = pieces[:max_pieces - 1] + [
                TwistPiece(last.lo, Fraction(1), last.formula, last.direction, last.lipschitz)
            ]
        if pieces[0].lo != 0 or pieces[-1].hi != 1:
            raise ValueError(f"twist '{name}' pieces must cover [0,1]")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi != right.lo:
                raise ValueError(f"twist '{name}' has a gap or overlap at {left.hi}")
        for p in pieces:
            if p.lo >= p.hi:
                raise ValueError(f"twist '{name}' has an empty piece ({p.lo}, {p.hi})")
            if p.direction not in (INCREASING, DECREASING, CONSTANT):
                raise ValueError(f"unknown monotone direction '{p.direction}'")

        self.name = name
        self.pieces: Tuple[TwistPiece, ...] = tuple(pieces)
        self._his = [p.hi for p in pieces]

    @property
    def global_lipschitz(self) -> Fraction:
        return max(p.lipschitz for p in self.pieces)

    def piece_index(self, x) -> int:
        return min(bisect_left(self._his, x), len(self.pieces) - 1)

    def __call__(self, x):
        return self.pieces[self.piece_index(x)].formula(x)

    def affine_segments(self) -> List[Segment]:
        """
        Exact affine segments covering [0,1).

        Raises:
            MethodMismatchError: some piece is not affine-rational
        """
        out: List[Segment] = []
        for p in self.pieces:
            out.extend(p.formula.segments(p.lo, p.hi))
        return out

    @property
    def constant_value(self) -> Optional[Fraction]:
        """The value y when f is constant, else None."""
        try:
            segments = self.affine_segments()
        except MethodMismatchError:
            return None
        values = {(s[2], s[3]) for s in segments}
        if len(values) == 1:
            slope, intercept = values.pop()
            if slope == 0:
                return intercept
        return None

    @property
    def is_constant(self) -> bool:
        return self.constant_value is not None

    def __repr__(self) -> str:
        return f"TwistSpec(name={self.name!r}, pieces={len(self.pieces)})"


def evaluate_twist(twist: TwistSpec, x):
    """Value of the governing piece at x (left piece at shared endpoints)."""
    if x < 0 or x > 1:
        raise ValueError(f"point {x} outside [0,1]")
    return twist(x)


@dataclass(frozen=True)
class PieceCertificate:
    index: int
    lipschitz_ok: bool
    monotone_ok: bool
    range_ok: bool
    worst_ratio: float
    violating_pair: Optional[Tuple[float, float]] = None

    @property
    def passed(self) -> bool:
        return self.lipschitz_ok and self.monotone_ok and self.range_ok


@dataclass(frozen=True)
class TwistCertificate:
    pieces: List[PieceCertificate]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.pieces)


CERTIFICATE_TOLERANCE = 1e-12


def certify(twist: TwistSpec, samples: int = 1000, seed: int = 0) -> TwistCertificate:
    """
    Sampled Lipschitz, monotonicity and range certificates for every piece.

    Args:
        twist: Twist to check
        samples: Random pairs per piece
        seed: Generator seed
    """
    rng = np.random.default_rng(seed)
    results = []
    for index, piece in enumerate(twist.pieces):
        lo, hi = float(piece.lo), float(piece.hi)
        lip = float(piece.lipschitz)
        pairs = rng.uniform(lo, hi, size=(samples, 2))

        lipschitz_ok = monotone_ok = range_ok = True
        worst_ratio = 0.0
        violation = None
        for x, y in pairs:
            if x == y:
                continue
            fx, fy = float(piece.formula(x)), float(piece.formula(y))
            diff = fx - fy
            ratio = abs(diff) / abs(x - y)
            worst_ratio = max(worst_ratio, ratio)

            if abs(diff) > lip * abs(x - y) + CERTIFICATE_TOLERANCE:
                lipschitz_ok = False
                violation = violation or (float(x), float(y))
            signed = diff * (x - y)
            if (piece.direction == INCREASING and signed < -CERTIFICATE_TOLERANCE) or \
                    (piece.direction == DECREASING and signed > CERTIFICATE_TOLERANCE) or \
                    (piece.direction == CONSTANT and abs(diff) > CERTIFICATE_TOLERANCE):
                monotone_ok = False
                violation = violation or (float(x), float(y))
            if not (0 <= fx <= 1 and 0 <= fy <= 1):
                range_ok = False
                violation = violation or (float(x), float(y))

        results.append(PieceCertificate(index, lipschitz_ok, monotone_ok, range_ok, worst_ratio, violation))

    certificate = TwistCertificate(results)
    if not certificate.passed:
        logger.warning(f"⚠ twist '{twist.name}' failed its piece certificates")
    return certificate
