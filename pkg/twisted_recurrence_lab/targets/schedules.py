# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Target-mass schedules {M_n} and their summability diagnostics.

Parameters are kept as exact rationals (0.1 means 1/10), so schedules with
integer exponents produce exact masses. Masses are capped by an optional
`cap` and clipped into (0,1); clipping is reported, never silent.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from twisted_recurrence_lab.measures.base import MeasureModel
from twisted_recurrence_lab.measures.lebesgue import LebesgueMeasure

logger = logging.getLogger(__name__)

UPPER_CLIP = 1 - Fraction(1, 10 ** 12)
LOWER_CLIP = Fraction(1, 10 ** 15)

KIND_POWER = "power"
KIND_HARMONIC_LOG = "harmonic-log"
KIND_CONSTANT = "constant"
KIND_PSI = "psi"
KIND_LIST = "list"
SCHEDULE_KINDS = (KIND_POWER, KIND_HARMONIC_LOG, KIND_CONSTANT, KIND_PSI, KIND_LIST)

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


def exact(value) -> Fraction:
    """Exact rational from ints, Fractions, decimal strings or floats (via their repr)."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return Fraction(str(value))


def _power(base: int, exponent: Fraction):
    """base ** -exponent, exact for integer exponents."""
    if exponent.denominator == 1:
        return Fraction(1, base ** int(exponent)) if exponent >= 0 else Fraction(base ** int(-exponent))
    return Fraction(base ** -float(exponent))


@dataclass(frozen=True)
class PsiForm:
    """
    Radius function psi(q).

    power:      c * q^(-a)
    geometric:  c * base^(-q)
    """

    form: str
    c: Fraction
    a: Fraction = Fraction(1)
    base: Fraction = Fraction(2)

    def __post_init__(self):
        if self.form not in ("power", "geometric"):
            raise ValueError(f"unknown psi form '{self.form}'")
        if self.c <= 0:
            raise ValueError("psi constant c must be positive")
        if self.form == "geometric" and self.base <= 1:
            raise ValueError("geometric psi needs base > 1")

    def __call__(self, q) -> Fraction:
        q = int(q)
        if self.form == "power":
            return self.c * _power(q, self.a)
        if self.base.denominator == 1:
            return self.c / int(self.base) ** q
        return self.c * Fraction(float(self.base) ** -q)

    def log2(self, q) -> float:
        """log2 psi(q) without building psi(q)."""
        if self.form == "power":
            return math.log2(self.c) - float(self.a) * math.log2(q)
        return math.log2(self.c) - q * math.log2(self.base)

    def to_dict(self) -> dict:
        return {"form": self.form, "c": str(self.c), "a": str(self.a), "base": str(self.base)}


@dataclass(frozen=True)
class ScheduleFlags:
    """Analytic classification plus an optional finite-horizon diagnostic."""

    summable: str
    window_divergent: str
    reason: str = ""
    diagnostic: List["WindowRow"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "summable": self.summable,
            "window_divergent": self.window_divergent,
            "reason": self.reason,
            "diagnostic": [row.to_dict() for row in self.diagnostic],
        }


@dataclass(frozen=True)
class WindowRow:
    N: int
    low_index: int
    window_sum: float

    def to_dict(self) -> dict:
        return {"N": self.N, "low_index": self.low_index, "window_sum": self.window_sum}


@dataclass(frozen=True, eq=False)
class TargetSchedule:
    """
    Sequence of target masses M_n, n >= 1.

    power:         c n^(-a)
    harmonic-log:  c / (n (ln n)^b)
    constant:      c
    psi:           mass of the ball of radius psi(n) around 1/2
    list:          values[n-1], repeating the last value past the end
    """

    kind: str
    c: Fraction = Fraction(1)
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    values: Tuple[Fraction, ...] = ()
    psi: Optional[PsiForm] = None
    measure: Optional[MeasureModel] = None
    cap: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind '{self.kind}'")
        if self.kind == KIND_PSI and self.psi is None:
            raise ValueError("psi schedule needs a psi form")
        if self.kind == KIND_LIST and not self.values:
            raise ValueError("list schedule needs at least one value")
        if self.kind != KIND_LIST and self.kind != KIND_PSI and self.c <= 0:
            raise ValueError("schedule constant c must be positive")

    # Construction helpers

    @classmethod
    def power(cls, c, a, cap=None) -> "TargetSchedule":
        return cls(KIND_POWER, c=exact(c), a=exact(a), cap=_optional(cap))

    @classmethod
    def harmonic_log(cls, c, b=0, cap=None) -> "TargetSchedule":
        return cls(KIND_HARMONIC_LOG, c=exact(c), b=exact(b), cap=_optional(cap))

    @classmethod
    def constant(cls, c, cap=None) -> "TargetSchedule":
        return cls(KIND_CONSTANT, c=exact(c), cap=_optional(cap))

    @classmethod
    def from_psi(cls, psi: PsiForm, measure: Optional[MeasureModel] = None, cap=None) -> "TargetSchedule":
        return cls(KIND_PSI, psi=psi, measure=measure, cap=_optional(cap))

    @classmethod
    def from_list(cls, values: Sequence, cap=None) -> "TargetSchedule":
        return cls(KIND_LIST, values=tuple(exact(v) for v in values), cap=_optional(cap))

    # Masses

    def raw_mass(self, n: int) -> Fraction:
        """M_n before capping and clipping."""
        if n < 1:
            raise ValueError(f"schedule index must be >= 1, got {n}")
        if self.kind == KIND_POWER:
            return self.c * _power(n, self.a)
        if self.kind == KIND_HARMONIC_LOG:
            if self.b == 0:
                return self.c / n
            log_n = math.log(n)
            if log_n == 0:
                return Fraction(1)
            return self.c / Fraction(n * log_n ** float(self.b))
        if self.kind == KIND_CONSTANT:
            return self.c
        if self.kind == KIND_PSI:
            measure = self.measure or LebesgueMeasure()
            mass = measure.ball_mass(Fraction(1, 2), self.psi(n))
            return mass if isinstance(mass, Fraction) else Fraction(float(mass))
        return self.values[min(n, len(self.values)) - 1]

    def _capped(self, n: int) -> Tuple[Fraction, bool]:
        value = self.raw_mass(n)
        if self.cap is not None and value > self.cap:
            value = self.cap
        if value >= 1:
            return UPPER_CLIP, True
        if value <= 0:
            return LOWER_CLIP, True
        return value, False

    def mass_at(self, n: int) -> Fraction:
        """M_n in (0,1)."""
        value, clipped = self._capped(n)
        if clipped:
            logger.debug(f"{self.describe()}: M_{n} clipped into (0,1)")
        return value

    def is_clipped(self, n: int) -> bool:
        return self._capped(n)[1]

    def masses(self, horizon: int) -> List[Fraction]:
        """[M_1, ..., M_horizon]."""
        return [self.mass_at(n) for n in range(1, horizon + 1)]

    def clipped_indices(self, horizon: int) -> List[int]:
        return [n for n in range(1, horizon + 1) if self.is_clipped(n)]

    def describe(self) -> str:
        if self.kind == KIND_POWER:
            text = f"power(c={self.c}, a={self.a})"
        elif self.kind == KIND_HARMONIC_LOG:
            text = f"harmonic-log(c={self.c}, b={self.b})"
        elif self.kind == KIND_CONSTANT:
            text = f"constant({self.c})"
        elif self.kind == KIND_PSI:
            text = f"psi({self.psi.form}, c={self.psi.c}, a={self.psi.a}, base={self.psi.base})"
        else:
            text = f"list({len(self.values)} values)"
        if self.cap is not None:
            text += f" capped at {self.cap}"
        return text

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "cap": None if self.cap is None else str(self.cap)}
        if self.kind == KIND_PSI:
            out["psi"] = self.psi.to_dict()
            out["measure"] = (self.measure or LebesgueMeasure()).name
        elif self.kind == KIND_LIST:
            out["values"] = [str(v) for v in self.values]
        else:
            out.update({"c": str(self.c), "a": str(self.a), "b": str(self.b)})
        return out


def _optional(value) -> Optional[Fraction]:
    return None if value is None else exact(value)


def mass_at(schedule: TargetSchedule, n: int) -> Fraction:
    """M_n for n >= 1, clipped into (0,1)."""
    return schedule.mass_at(n)


def window_low_index(q: float, N: int) -> int:
    """floor(q ln N)."""
    return math.floor(q * math.log(N))


def window_sum(schedule: TargetSchedule, q: float, N: int) -> float:
    """
    Sum of M_n over floor(q ln N) <= n <= N.

    Raises:
        ValueError: floor(q ln N) < 1
    """
    low = window_low_index(q, N)
    if low < 1:
        raise ValueError(f"window start floor({q} ln {N}) = {low} is below 1")
    return math.fsum(float(schedule.mass_at(n)) for n in range(low, N + 1))


def geometric_grid(n_min: int, n_max: int, factor: float = 2.0) -> List[int]:
    """Integers n_min, n_min*factor, ... up to n_max (n_max always included)."""
    if n_min < 1 or n_max < n_min or factor <= 1:
        raise ValueError("need 1 <= n_min <= n_max and factor > 1")
    grid = []
    value = float(n_min)
    while int(value) < n_max:
        if not grid or int(value) != grid[-1]:
            grid.append(int(value))
        value *= factor
    grid.append(n_max)
    return grid


def window_table(schedule: TargetSchedule, q: float, grid: Sequence[int]) -> List[WindowRow]:
    """Window sums over an N-grid; grid points with an empty window are skipped."""
    rows = []
    for N in grid:
        low = window_low_index(q, N)
        if low < 1:
            continue
        rows.append(WindowRow(N, low, window_sum(schedule, q, N)))
    return rows


def classify_schedule(schedule: TargetSchedule, q: float = 1.0) -> ScheduleFlags:
    """
    Summability and window-divergence flags.

    Built-in kinds are classified analytically; explicit lists get
    'unknown' with a window table over their defined range.
    """
    kind = schedule.kind
    if kind == KIND_POWER:
        if schedule.a > 1:
            return ScheduleFlags(YES, NO, f"sum of n^-{schedule.a} converges")
        return ScheduleFlags(NO, YES, f"window sum of n^-{schedule.a} grows without bound")

    if kind == KIND_HARMONIC_LOG:
        if schedule.b > 1:
            return ScheduleFlags(YES, NO, f"sum of 1/(n (ln n)^{schedule.b}) converges")
        return ScheduleFlags(NO, YES, f"window sum of 1/(n (ln n)^{schedule.b}) grows without bound")

    if kind == KIND_CONSTANT:
        return ScheduleFlags(NO, YES, "constant masses")

    if kind == KIND_PSI:
        psi = schedule.psi
        if psi.form == "geometric":
            return ScheduleFlags(YES, NO, "geometric psi")
        measure = schedule.measure or LebesgueMeasure()
        if measure.name == "lebesgue":
            # M_n = 2 psi(n) once psi(n) < 1/2
            if psi.a > 1:
                return ScheduleFlags(YES, NO, f"M_n ~ 2c n^-{psi.a}")
            return ScheduleFlags(NO, YES, f"M_n ~ 2c n^-{psi.a}")
        if measure.regularity is not None:
            s = measure.regularity[1]
            if float(psi.a) * s > 1:
                return ScheduleFlags(YES, NO, f"M_n <= c psi(n)^{s} with a*s > 1")
        return ScheduleFlags(UNKNOWN, UNKNOWN, f"psi power under '{measure.name}' not classified")

    horizon = len(schedule.values)
    grid = geometric_grid(1, horizon) if horizon >= 1 else []
    return ScheduleFlags(UNKNOWN, UNKNOWN, "explicit list", window_table(schedule, q, grid))
