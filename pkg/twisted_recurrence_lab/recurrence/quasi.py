# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Quasi-independence bookkeeping for the full-measure argument.

For a horizon N and fitted decay p(n) = C gamma^n under an upper
s-regular measure (mu(B(x,r)) <= c r^s):

    I_N      = {j : -(2/s) log_gamma N <= j <= N}
    sigma_N  = sum_{j in I_N} M_j
    S_N      = sum_{j in I_N} mu(R_j)
    C_N      = sum_{j,k in I_N} mu(R_j n R_k)

and S_N^2 / C_N bounds mu(R_j for some j in I_N) from below. Every pair is
also checked against

    mu(R_n n R_{n+m}) <= M_n M_{n+m} (1 + K1 sqrt p(n))
                         + K2 (M_n p(n)^{s/2} + M_{n+m} (p(n)^{s/2} + p(m)))
                         + K3 p(n)^s

with K1 = 6L, K2 = (1 + 6L sqrt(sup p)) (2c + 3), K3 = 4c^2 (1 + 6L sqrt(sup p)).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from twisted_recurrence_lab.correlations.decay import DecayModel
from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.recurrence.bands import AT_FX
from twisted_recurrence_lab.recurrence.chung_erdos import (
    chung_erdos_lower_bound,
    chung_erdos_ratio,
    independence_reference,
)
from twisted_recurrence_lab.recurrence.hits import HitSample, sample_hits
from twisted_recurrence_lab.recurrence.masses import (
    DEFAULT_MC_SAMPLES,
    DEFAULT_PAIR_WINDOW_BUDGET,
    EXACT,
    MONTE_CARLO,
    measure_Rn,
    pairwise_mass,
    supports_exact,
)
from twisted_recurrence_lab.targets.schedules import TargetSchedule
from twisted_recurrence_lab.twists.base import TwistSpec
from twisted_recurrence_lab.utils.errors import BudgetExceededError, MethodMismatchError

logger = logging.getLogger(__name__)

AUTO = "auto"
QUASI_METHODS = (EXACT, MONTE_CARLO, AUTO)
DEFAULT_PAIR_BUDGET = 4096
RHS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class KConstants:
    K1: float
    K2: float
    K3: float

    def to_dict(self) -> dict:
        return {"K1": self.K1, "K2": self.K2, "K3": self.K3}


def k_constants(L: float, c: float, sup_p: float) -> KConstants:
    """K1 = 6L, K2 = (1 + 6L sqrt(sup p))(2c + 3), K3 = 4c^2 (1 + 6L sqrt(sup p))."""
    growth = 1.0 + 6.0 * L * math.sqrt(sup_p)
    return KConstants(6.0 * L, growth * (2.0 * c + 3.0), 4.0 * c * c * growth)


def pairwise_rhs(M_n: float, M_nm: float, n: int, m: int, decay: DecayModel, s: float,
                 k: KConstants) -> float:
    """Upper bound on mu(R_n n R_{n+m}) from the fitted decay."""
    p_n = decay.p(n)
    p_m = decay.p(m)
    root = p_n ** (s / 2.0)
    return (M_n * M_nm * (1.0 + k.K1 * math.sqrt(p_n))
            + k.K2 * (M_n * root + M_nm * (root + p_m))
            + k.K3 * p_n ** s)


def index_window(N: int, gamma: float, s: float) -> Tuple[int, int]:
    """(j_min, N) with j_min = max(1, ceil(-(2/s) ln N / ln gamma)); empty when j_min > N."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    start = -(2.0 / s) * math.log(N) / math.log(gamma)
    return max(1, math.ceil(start - 1e-12)), N


@dataclass(frozen=True)
class PairRow:
    j: int
    k: int
    mass: float
    product: float
    rhs: Optional[float]
    method: str

    @property
    def violates(self) -> bool:
        return self.rhs is not None and self.mass > self.rhs + RHS_TOLERANCE

    def to_dict(self) -> dict:
        return {
            "j": self.j, "k": self.k, "mass": self.mass, "product": self.product,
            "rhs": self.rhs, "method": self.method, "violates": self.violates,
        }


@dataclass
class PairwiseCache:
    """Masses of R_j and R_j n R_k shared across an N-grid."""

    single: Dict[int, Tuple[object, str]] = field(default_factory=dict)
    pairs: Dict[Tuple[int, int], Tuple[object, str]] = field(default_factory=dict)
    sample: Optional[HitSample] = None


@dataclass(frozen=True)
class QuasiIndependenceReport:
    N: int
    s: Optional[float]
    c: Optional[float]
    C: float
    gamma: float
    L: float
    window: Tuple[int, int]
    empty_window: bool
    sigma_N: float
    S_N: float
    C_N: float
    C_N_split: float
    chung_erdos_bound: float
    independence_reference: float
    D_N: Optional[float]
    C_N_upper: Optional[float]
    c1_candidates: Tuple[float, float]
    constants: Optional[KConstants]
    pairs: List[PairRow]
    pair_count: int
    subsampled: bool
    bound_checked: bool
    flags: List[str]

    @property
    def violations(self) -> List[PairRow]:
        return [row for row in self.pairs if row.violates]

    @property
    def max_single(self) -> float:
        return max((row.mass for row in self.pairs if row.j == row.k), default=0.0)

    def to_row(self) -> dict:
        return {
            "N": self.N,
            "sigma_N": self.sigma_N,
            "S_N": self.S_N,
            "C_N": self.C_N,
            "ce_bound": self.chung_erdos_bound,
        }

    def to_dict(self, include_pairs: bool = False) -> dict:
        out = {
            "N": self.N,
            "s": self.s,
            "c": self.c,
            "C": self.C,
            "gamma": self.gamma,
            "L": self.L,
            "window": list(self.window),
            "empty_window": self.empty_window,
            "sigma_N": self.sigma_N,
            "S_N": self.S_N,
            "C_N": self.C_N,
            "C_N_split": self.C_N_split,
            "chung_erdos_bound": self.chung_erdos_bound,
            "independence_reference": self.independence_reference,
            "D_N": self.D_N,
            "C_N_upper": self.C_N_upper,
            "c1_candidates": list(self.c1_candidates),
            "constants": self.constants.to_dict() if self.constants else None,
            "pair_count": self.pair_count,
            "subsampled": self.subsampled,
            "bound_checked": self.bound_checked,
            "violations": len(self.violations),
            "flags": list(self.flags),
        }
        if include_pairs:
            out["pairs"] = [row.to_dict() for row in self.pairs]
        return out


def d_sum(window: Tuple[int, int], masses: Dict[int, float], gamma: float, s: float) -> float:
    """sum_{j>k in I_N} (M_k g^{ks/2} + M_j (g^{ks/2} + g^{j-k}) + g^{ks/2})."""
    lo, hi = window
    terms = []
    for k in range(lo, hi + 1):
        root = gamma ** (k * s / 2.0)
        for j in range(k + 1, hi + 1):
            terms.append(masses[k] * root + masses[j] * (root + gamma ** (j - k)) + root)
    return math.fsum(terms)


class _CellSource:
    """Resolves single and pairwise masses exactly, by sampling, or exact-with-fallback."""

    def __init__(self, system, measure, schedule, twist, method, samples, seed, radius_mode, threads,
                 window_budget, horizon, cache: PairwiseCache):
        self.system = system
        self.measure = measure
        self.schedule = schedule
        self.twist = twist
        self.method = method
        self.samples = samples
        self.seed = seed
        self.radius_mode = radius_mode
        self.threads = threads
        self.window_budget = window_budget
        self.horizon = horizon
        self.cache = cache
        self.fallbacks = 0

    def _sample(self) -> HitSample:
        if self.cache.sample is None or self.cache.sample.horizon < self.horizon:
            self.cache.sample = sample_hits(
                self.system, self.measure, self.schedule, self.twist, self.horizon, self.samples,
                self.seed, self.radius_mode, self.threads,
            )
        return self.cache.sample

    def _sampled(self, j: int, k: int) -> Tuple[float, str]:
        sample = self._sample()
        hits = sum(1 for r in sample.records if r.hit_at(j) and r.hit_at(k))
        return hits / sample.size, MONTE_CARLO

    def single(self, j: int) -> Tuple[object, str]:
        if j not in self.cache.single:
            if self.method == MONTE_CARLO:
                self.cache.single[j] = self._sampled(j, j)
            else:
                est = measure_Rn(self.system, self.measure, self.schedule, self.twist, j, EXACT,
                                 radius_mode=self.radius_mode)
                self.cache.single[j] = (est.value, EXACT)
        return self.cache.single[j]

    def pair(self, j: int, k: int) -> Tuple[object, str]:
        key = (min(j, k), max(j, k))
        if key not in self.cache.pairs:
            if self.method == MONTE_CARLO:
                self.cache.pairs[key] = self._sampled(*key)
            else:
                try:
                    est = pairwise_mass(self.system, self.measure, self.schedule, self.twist, key[0],
                                        key[1] - key[0], EXACT, radius_mode=self.radius_mode,
                                        budget=self.window_budget)
                    self.cache.pairs[key] = (est.value, EXACT)
                except BudgetExceededError:
                    if self.method != AUTO:
                        raise
                    self.fallbacks += 1
                    self.cache.pairs[key] = self._sampled(*key)
        return self.cache.pairs[key]


def quasi_independence_report(system: IntervalMap, measure, schedule: TargetSchedule, twist: TwistSpec,
                              decay: DecayModel, N: int, method: str = AUTO,
                              samples: int = DEFAULT_MC_SAMPLES, seed: int = 0, radius_mode: str = AT_FX,
                              threads: int = 1, pair_budget: int = DEFAULT_PAIR_BUDGET,
                              window_budget: int = DEFAULT_PAIR_WINDOW_BUDGET,
                              cache: Optional[PairwiseCache] = None) -> QuasiIndependenceReport:
    """
    Assemble sigma_N, S_N, C_N, the Chung-Erdos bound and the pairwise checks for horizon N.

    Off-diagonal pairs beyond `pair_budget` are subsampled (deterministically
    from `seed`) and their sum rescaled; the report says so.

    Raises:
        ValueError: decay model not fitted
        MethodMismatchError: exact method on a system without exact masses
    """
    if not decay.fitted:
        raise ValueError("quasi-independence needs a fitted decay model")
    if method not in QUASI_METHODS:
        raise MethodMismatchError(f"unknown quasi-independence method '{method}'")
    if method == EXACT and not supports_exact(system, measure):
        raise MethodMismatchError(f"exact pairwise masses unavailable for '{system.name}' with '{measure.name}'")
    if method == AUTO and not supports_exact(system, measure):
        method = MONTE_CARLO

    flags: List[str] = []
    regularity = measure.regularity
    if regularity is None:
        c = s = None
        flags.append("regularity-missing: pairwise bound check skipped, I_N uses s=1")
        s_window = 1.0
    else:
        c, s = float(regularity[0]), float(regularity[1])
        s_window = s

    L = float(twist.global_lipschitz)
    C, gamma = decay.C, decay.gamma
    window = index_window(N, gamma, s_window)
    c1 = (C / gamma, 3.0 * C * gamma / (1.0 - gamma))
    constants = k_constants(L, c, decay.sup_p) if c is not None else None

    indices = list(range(window[0], window[1] + 1))
    if not indices:
        flags.append("empty-window")
        logger.warning(f"⚠ I_{N} is empty (window starts at {window[0]})")
        return QuasiIndependenceReport(
            N, s, c, C, gamma, L, window, True, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, None, None, c1,
            constants, [], 0, False, False, flags,
        )

    cache = cache if cache is not None else PairwiseCache()
    source = _CellSource(system, measure, schedule, twist, method, samples, seed, radius_mode, threads,
                         window_budget, N, cache)

    masses = {j: float(schedule.mass_at(j)) for j in indices}
    rows: List[PairRow] = []
    singles = {}
    for j in indices:
        value, how = source.single(j)
        singles[j] = value
        rows.append(PairRow(j, j, float(value), masses[j] * masses[j], None, how))

    all_pairs = [(k, j) for i, k in enumerate(indices) for j in indices[i + 1:]]
    subsampled = len(all_pairs) > pair_budget
    if subsampled:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(N,)))
        chosen = sorted(rng.choice(len(all_pairs), size=pair_budget, replace=False).tolist())
        pairs = [all_pairs[i] for i in chosen]
        flags.append(f"subsampled {pair_budget} of {len(all_pairs)} pairs")
        logger.warning(f"⚠ I_{N}: subsampling {pair_budget} of {len(all_pairs)} pairs")
    else:
        pairs = all_pairs

    off = {}
    for k, j in pairs:
        value, how = source.pair(k, j)
        off[(k, j)] = value
        rhs = None
        if constants is not None:
            rhs = pairwise_rhs(masses[k], masses[j], k, j - k, decay, s, constants)
        rows.append(PairRow(k, j, float(value), masses[k] * masses[j], rhs, how))
    if source.fallbacks:
        flags.append(f"monte-carlo fallback on {source.fallbacks} pairs")

    sigma = math.fsum(masses.values())
    S = math.fsum(float(v) for v in singles.values())
    off_sum = math.fsum(float(v) for v in off.values())
    mixed = len({row.method for row in rows}) > 1
    if subsampled or mixed:
        # rescaled or mixed-method sums are not a consistent matrix
        off_sum *= len(all_pairs) / len(pairs)
        C_N = S + 2.0 * off_sum
        ce = float(chung_erdos_ratio(S, C_N))
    else:
        matrix = [[singles[a] if a == b else off[(min(a, b), max(a, b))] for b in indices] for a in indices]
        C_N = math.fsum(float(v) for row in matrix for v in row)
        ce = float(chung_erdos_lower_bound([singles[j] for j in indices], matrix))
    C_N_split = S + 2.0 * off_sum

    D_N = C_N_upper = None
    if constants is not None:
        D_N = d_sum(window, masses, gamma, s)
        C_N_upper = S + (1.0 + constants.K1 * C * N ** (-1.0 / s)) * sigma * sigma + 2.0 * (constants.K2 + constants.K3) * D_N

    reference = independence_reference([singles[j] for j in indices])
    report = QuasiIndependenceReport(
        N, s, c, C, gamma, L, window, False, sigma, S, C_N, C_N_split, min(max(ce, 0.0), 1.0), reference,
        D_N, C_N_upper, c1, constants, rows, len(all_pairs), subsampled, constants is not None, flags,
    )
    if report.violations:
        logger.warning(f"⚠ I_{N}: {len(report.violations)} pairs above the quasi-independence bound")
    logger.info(f"✓ N={N}: I_N=[{window[0]}, {window[1]}], S_N={S:.6g}, C_N={C_N:.6g}, bound={report.chung_erdos_bound:.4f}")
    return report
