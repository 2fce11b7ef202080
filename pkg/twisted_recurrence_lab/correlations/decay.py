# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Correlations Cor_n(f, g) = int (f o T^n) g dmu - int f dmu int g dmu and
the exponential decay model p(n) = C gamma^n fitted to them.

exact-preimage: affine-rational systems under Lebesgue measure. Each pair
of cells contributes mu({x in G_j : T^n x in F_i}), a band problem with
constant bounds solved in rational arithmetic.

monte-carlo: any system. Seeds are drawn in fixed batches keyed by
(seed, batch index) and merged in batch order, so the estimate does not
depend on the worker count.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from scipy.stats import linregress

from twisted_recurrence_lab.correlations.observables import ObservableSpec
from twisted_recurrence_lab.dynamics.affine import AffineMap
from twisted_recurrence_lab.dynamics.base import IntervalMap, PrecisionPolicy
from twisted_recurrence_lab.utils.errors import MethodMismatchError
from twisted_recurrence_lab.utils.sampling import DEFAULT_BATCH_SIZE, Batch, SeedStream, run_batches

logger = logging.getLogger(__name__)

EXACT = "exact-preimage"
MONTE_CARLO = "monte-carlo"
METHODS = (EXACT, MONTE_CARLO)

DEFAULT_NOISE_FLOOR = 1e-14
DEFAULT_SAMPLES = 100_000
MIN_FIT_POINTS = 3
# a fitted model must fall by at least a factor e across its n range
MIN_DECAY_LOG = 1.0

# default decay probe: a non-dyadic interval, so doubling-type maps never
# make it exactly independent of its preimages
DECAY_PROBE = (Fraction(0), Fraction(1, 3))

FITTED = "fitted"
DEGENERATE = "degenerate"
NO_FIT = "no-fit"

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class CorrelationEstimate:
    """One correlation value; stderr is zero for exact values."""

    n: int
    value: object
    stderr: float
    method: str

    @property
    def magnitude(self) -> float:
        return abs(float(self.value))

    def to_row(self) -> dict:
        return {"n": self.n, "corr": float(self.value), "stderr": self.stderr}


def supports_exact_preimage(system: IntervalMap, measure) -> bool:
    return isinstance(system, AffineMap) and measure.is_exact and measure.name == "lebesgue"


def _exact_pairing(system: AffineMap, f: ObservableSpec, g: ObservableSpec, n: int) -> Fraction:
    """int (f o T^n) g dx as an exact rational."""
    total = Fraction(0)
    for f_lo, f_hi, v in f.cells():
        if v == 0:
            continue
        lower, upper = (Fraction(0), f_lo), (Fraction(0), f_hi)
        for g_lo, g_hi, w in g.cells():
            if w == 0:
                continue
            total += v * w * system.window_mass(g_lo, g_hi, lower, upper, n)
    return total


def _monte_carlo_pairing(system: IntervalMap, measure, f: ObservableSpec, g: ObservableSpec, n: int,
                         samples: int, seed: int, threads: int, batch_size: int,
                         precision: Optional[PrecisionPolicy]) -> Tuple[float, float]:
    """Sample mean of f(T^n x) g(x) and its standard error."""
    precision = precision or PrecisionPolicy.for_system(system, max(n, 1))
    stream = SeedStream(seed, batch_size)

    def work(batch: Batch) -> Tuple[float, float]:
        rng = stream.rng(batch)
        values = []
        for _ in range(batch.size):
            x, orbit = system.sample_orbit(measure, rng, n, precision)
            last = orbit.last if orbit.exact else float(orbit.last)
            values.append(float(f.evaluate(min(max(last, 0), 1)) * g.evaluate(x)))
        return math.fsum(values), math.fsum(v * v for v in values)

    parts = run_batches(work, stream.batches(samples), threads)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0)
    stderr = math.sqrt(variance / max(samples - 1, 1))
    return mean, stderr


def correlation(system: IntervalMap, measure, f: ObservableSpec, g: ObservableSpec, n: int,
                method: str = EXACT, samples: int = DEFAULT_SAMPLES, seed: int = 0, threads: int = 1,
                batch_size: int = DEFAULT_BATCH_SIZE,
                precision: Optional[PrecisionPolicy] = None) -> CorrelationEstimate:
    """
    int (f o T^n) g dmu - int f dmu int g dmu.

    Raises:
        MethodMismatchError: exact-preimage on a non-affine system or non-Lebesgue measure,
            or an unknown method
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if method not in METHODS:
        raise MethodMismatchError(f"unknown correlation method '{method}'")

    product = f.integral(measure) * g.integral(measure)
    if method == EXACT:
        if not supports_exact_preimage(system, measure):
            raise MethodMismatchError(
                f"exact-preimage needs an affine-rational system under Lebesgue, got "
                f"'{system.name}' with '{measure.name}'"
            )
        return CorrelationEstimate(n, _exact_pairing(system, f, g, n) - product, 0.0, EXACT)

    mean, stderr = _monte_carlo_pairing(system, measure, f, g, n, samples, seed, threads, batch_size, precision)
    return CorrelationEstimate(n, mean - float(product), stderr, MONTE_CARLO)


def correlation_series(system: IntervalMap, measure, f: ObservableSpec, g: ObservableSpec,
                       n_values: Sequence[int], method: str = EXACT, **kwargs) -> List[CorrelationEstimate]:
    """Correlations for every n in n_values (same seed for each n)."""
    series = [correlation(system, measure, f, g, n, method, **kwargs) for n in n_values]
    logger.debug(f"{system.name}: {len(series)} correlations via {method}")
    return series


def noise_floor_for(series: Sequence[CorrelationEstimate]) -> float:
    """max(1e-14, 3 * largest stderr)."""
    worst = max((e.stderr for e in series), default=0.0)
    return max(DEFAULT_NOISE_FLOOR, 3.0 * worst)


@dataclass(frozen=True)
class DecayModel:
    """p(n) = C gamma^n with fit diagnostics."""

    C: Optional[float]
    gamma: Optional[float]
    r_squared: Optional[float]
    residual: Optional[float]
    n_range: Optional[Tuple[int, int]]
    noise_floor: float
    n_points: int
    status: str

    @property
    def degenerate(self) -> bool:
        return self.status == DEGENERATE

    @property
    def fitted(self) -> bool:
        return self.status == FITTED

    def p(self, n: int) -> Optional[float]:
        if not self.fitted:
            return None
        return self.C * self.gamma ** n

    @property
    def sup_p(self) -> Optional[float]:
        """sup_n p(n) = p(1)."""
        return self.p(1)

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "gamma": self.gamma,
            "r_squared": self.r_squared,
            "residual": self.residual,
            "n_range": list(self.n_range) if self.n_range else None,
            "noise_floor": self.noise_floor,
            "n_points": self.n_points,
            "status": self.status,
        }


def fit_decay(series: Sequence[Tuple[int, float]], noise_floor: float = DEFAULT_NOISE_FLOOR) -> DecayModel:
    """
    Least squares of log |corr_n| against n over points above the noise floor.

    Returns:
        DecayModel; status 'degenerate' with fewer than three usable points,
        'no-fit' when the decay is indistinguishable from gamma = 1: the slope's
        two-sigma interval reaches zero, or the model falls by less than a
        factor e between the first and last fitted n
    """
    points = [(int(n), abs(float(c))) for n, c in series if abs(float(c)) > noise_floor]
    if len(points) < MIN_FIT_POINTS:
        logger.debug(f"Decay fit degenerate: {len(points)} points above floor {noise_floor:g}")
        return DecayModel(None, None, None, None, None, noise_floor, len(points), DEGENERATE)

    ns = [n for n, _ in points]
    logs = [math.log(c) for _, c in points]
    fit = linregress(ns, logs)
    predicted = [fit.intercept + fit.slope * n for n in ns]
    residual = math.sqrt(math.fsum((y - p) ** 2 for y, p in zip(logs, predicted)) / len(ns))
    gamma = math.exp(fit.slope)
    C = math.exp(fit.intercept)
    span = max(ns) - min(ns)
    decaying = fit.slope + 2.0 * fit.stderr < 0 and -fit.slope * span >= MIN_DECAY_LOG
    status = FITTED if gamma < 1 and decaying else NO_FIT

    model = DecayModel(C, gamma, fit.rvalue ** 2, residual, (min(ns), max(ns)), noise_floor, len(ns), status)
    logger.debug(f"Decay fit: C={C:.6g}, gamma={gamma:.6g}, R^2={fit.rvalue ** 2:.4f} ({status})")
    return model


def decay_hypothesis(model: DecayModel, gamma_max: float = 0.9, r2_min: float = 0.8) -> str:
    """
    'pass' for a fitted model with gamma <= gamma_max and R^2 >= r2_min,
    'unknown' when every correlation sat below the noise floor, else 'fail'.
    """
    if model.degenerate:
        return UNKNOWN
    if model.fitted and model.gamma <= gamma_max and model.r_squared >= r2_min:
        return PASS
    return FAIL


def estimate_decay(system: IntervalMap, measure, horizon: int = 12, method: Optional[str] = None,
                   probe: Tuple[Fraction, Fraction] = DECAY_PROBE,
                   **kwargs) -> Tuple[DecayModel, List[CorrelationEstimate]]:
    """
    Fit p(n) from the autocorrelations of the probe indicator for n = 1..horizon.

    The method defaults to exact-preimage whenever the system supports it.
    """
    if method is None:
        method = EXACT if supports_exact_preimage(system, measure) else MONTE_CARLO
    probe_obs = ObservableSpec.indicator(*probe)
    series = correlation_series(system, measure, probe_obs, probe_obs, range(1, horizon + 1), method, **kwargs)
    floor = noise_floor_for(series)
    model = fit_decay([(e.n, e.value) for e in series], floor)
    return model, series


@dataclass(frozen=True)
class MixingGap:
    """|mu(T^-n E intersect F) - mu(E) mu(F)| against 3 mu(E) p(n)."""

    n: int
    gap: object
    bound: Optional[float]
    ratio: Optional[float]

    def to_dict(self) -> dict:
        return {"n": self.n, "gap": float(self.gap), "bound": self.bound, "ratio": self.ratio}


def ball_mixing_gap(system: IntervalMap, measure, E: Tuple, F: Tuple, n: int,
                    decay: Optional[DecayModel] = None) -> MixingGap:
    """
    Exact mixing gap for intervals E and F and its ratio to 3 mu(E) p(n).

    Raises:
        MethodMismatchError: as correlation with exact-preimage
    """
    chi_e = ObservableSpec.indicator(*E)
    chi_f = ObservableSpec.indicator(*F)
    gap = abs(correlation(system, measure, chi_e, chi_f, n, EXACT).value)

    bound = ratio = None
    if decay is not None and decay.fitted:
        bound = 3.0 * float(chi_e.integral(measure)) * decay.p(n)
        ratio = float(gap) / bound if bound > 0 else math.inf
    return MixingGap(n, gap, bound, ratio)
