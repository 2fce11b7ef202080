# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Experiment runner.

Stages, in order:

    decay        fit p(n) = C gamma^n for the system
    hypotheses   checklist and zero-one branch
    hits         per-seed hit records up to the horizon
    masses       mu(R_n) table (exact when available) with the 3 p(n) bound
    zero-law     tail-hit statistics against the binomial prediction
    quasi        quasi-independence reports over the N-grid (divergent schedules)
    control      convergent-denominator hits for rotation systems

Any failure is re-raised as ExperimentStageError naming the stage. The
verdict is evidence at a finite horizon, never a proof of the limit law.
"""

import logging
import math
import platform
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import mpmath
import numpy as np
import scipy

from twisted_recurrence_lab import __version__
from twisted_recurrence_lab.correlations.decay import PASS, DecayModel
from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.dynamics.liouville import convergents
from twisted_recurrence_lab.experiments.config import ExperimentConfig
from twisted_recurrence_lab.experiments.hypotheses import (
    BRANCH_FULL,
    BRANCH_ZERO,
    HypothesisChecklist,
    fit_config_decay,
    validate_hypotheses,
)
from twisted_recurrence_lab.recurrence.chung_erdos import prob_any, prob_at_least
from twisted_recurrence_lab.recurrence.hits import HitSample, sample_hits
from twisted_recurrence_lab.recurrence.masses import EXACT, MONTE_CARLO, measure_Rn, supports_exact
from twisted_recurrence_lab.recurrence.quasi import PairwiseCache, QuasiIndependenceReport, quasi_independence_report
from twisted_recurrence_lab.targets.schedules import KIND_PSI, YES, TargetSchedule
from twisted_recurrence_lab.utils.errors import ExperimentStageError

logger = logging.getLogger(__name__)

CONVERGENT_ZERO = "convergent-zero-evidence"
DIVERGENT_FULL = "divergent-full-evidence"
CONTROL_NO_MIXING = "control-no-mixing"
INCONCLUSIVE = "inconclusive"
VERDICTS = (CONVERGENT_ZERO, DIVERGENT_FULL, CONTROL_NO_MIXING, INCONCLUSIVE)


@contextmanager
def _stage(name: str):
    logger.info(f"▶ Stage: {name}")
    try:
        yield
    except ExperimentStageError:
        raise
    except Exception as e:
        logger.error(f"✗ Stage '{name}' failed: {e}")
        raise ExperimentStageError(name, e) from e


@dataclass(frozen=True)
class MassRow:
    n: int
    M_n: Fraction
    estimate: object
    stderr: float
    three_p_bound: Optional[float]
    method: str

    @property
    def within_bound(self) -> Optional[bool]:
        if self.three_p_bound is None:
            return None
        return abs(float(self.estimate) - float(self.M_n)) <= self.three_p_bound + 3.0 * self.stderr

    def to_row(self) -> dict:
        return {
            "n": self.n,
            "M_n": float(self.M_n),
            "mu_Rn_est": float(self.estimate),
            "stderr": self.stderr,
            "three_p_bound": self.three_p_bound,
        }

    def to_dict(self) -> dict:
        out = self.to_row()
        out.update({
            "M_n_exact": str(self.M_n),
            "mu_Rn_exact": str(self.estimate) if self.method == EXACT else None,
            "method": self.method,
            "within_bound": self.within_bound,
        })
        return out


@dataclass(frozen=True)
class TailStats:
    """Observed tail hits against the independent-events prediction from the mass table."""

    n0: int
    predicted_fraction: float
    observed_fraction: float
    sigma: float
    expected_mean: float
    observed_mean: float
    mean_sigma: float
    fraction_ok: bool
    mean_ok: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class HitThreshold:
    """Fraction of seeds with at least k hits, with its threshold fixed from the mass table."""

    min_hits: int
    predicted: float
    threshold: float
    observed: float

    @property
    def passed(self) -> bool:
        return self.observed >= self.threshold

    def to_dict(self) -> dict:
        out = dict(vars(self))
        out["passed"] = self.passed
        return out


@dataclass(frozen=True)
class ControlRow:
    k: int
    q: int
    radius: float
    hit_fraction: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class ControlReport:
    """Hits at the convergent denominators of a rotation."""

    fraction: float
    rows: List[ControlRow]
    skipped: List[int]
    summable: str

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    def to_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "rows": [row.to_dict() for row in self.rows],
            "skipped_denominators": [str(q) for q in self.skipped],
            "summable": self.summable,
            "passed": self.passed,
        }


@dataclass
class ExperimentReport:
    name: str
    config: ExperimentConfig
    hypotheses: HypothesisChecklist
    masses: List[MassRow]
    hits: HitSample
    tail: TailStats
    hit_threshold: HitThreshold
    quasi: List[QuasiIndependenceReport] = field(default_factory=list)
    control: Optional[ControlReport] = None
    ce_threshold: Optional[float] = None
    verdict: str = INCONCLUSIVE
    reasons: List[str] = field(default_factory=list)

    @property
    def decay(self) -> DecayModel:
        return self.hypotheses.decay

    def provenance(self) -> dict:
        return {
            "config_hash": self.config.config_hash(),
            "seed": self.config.seed,
            "versions": {
                "twisted_recurrence_lab": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "mpmath": mpmath.__version__,
            },
        }

    def to_dict(self) -> dict:
        ce_bound = self.quasi[-1].chung_erdos_bound if self.quasi else None
        return {
            "name": self.name,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "provenance": self.provenance(),
            "config": {k: v for k, v in self.config.to_dict().items() if k not in ("threads", "out_dir")},
            "hypotheses": self.hypotheses.to_dict(),
            "correlations": [e.to_row() for e in self.hypotheses.series],
            "masses": [row.to_dict() for row in self.masses],
            "hit_distribution": {str(k): v for k, v in self.hits.count_histogram().items()},
            "tail": self.tail.to_dict(),
            "hit_threshold": self.hit_threshold.to_dict(),
            "quasi": [report.to_dict() for report in self.quasi],
            "ce_threshold": self.ce_threshold,
            "ce_bound": ce_bound,
            "control": self.control.to_dict() if self.control else None,
        }


# Stage helpers


def mass_table(system: IntervalMap, measure, schedule: TargetSchedule, twist, horizon: int,
               sample: HitSample, decay: DecayModel, radius_mode: str) -> List[MassRow]:
    """mu(R_n) for n = 1..horizon; exact when supported, else the sample frequencies."""
    exact = supports_exact(system, measure)
    estimates = None if exact else sample.mass_estimates()
    rows = []
    for n in range(1, horizon + 1):
        M = schedule.mass_at(n)
        bound = 3.0 * decay.p(n) if decay.fitted else None
        if exact:
            est = measure_Rn(system, measure, schedule, twist, n, EXACT, radius_mode=radius_mode)
            rows.append(MassRow(n, M, est.value, 0.0, bound, EXACT))
        else:
            row = estimates[n - 1]
            rows.append(MassRow(n, M, row["value"], row["stderr"], bound, MONTE_CARLO))
    outside = [row.n for row in rows if row.within_bound is False]
    if outside:
        logger.warning(f"⚠ mu(R_n) outside M_n +/- 3p(n) at n={outside}")
    return rows


def tail_statistics(sample: HitSample, masses: List[MassRow], config: ExperimentConfig) -> TailStats:
    """Fraction of seeds with a hit at n >= n0 = ceil(tail_fraction N) and their mean tail hit count."""
    N = sample.horizon
    n0 = max(1, math.ceil(config.verdict.tail_fraction * N))
    tail = [float(row.estimate) for row in masses if row.n >= n0]
    size = sample.size

    predicted = prob_any(tail)
    observed = sample.fraction_with_tail_hit(n0)
    sigma = max(math.sqrt(predicted * (1.0 - predicted) / size), 1.0 / size)

    expected_mean = math.fsum(tail)
    observed_mean = sample.mean_tail_hits(n0)
    mean_sigma = max(sample.tail_hit_std(n0) / math.sqrt(size), 1.0 / size)

    return TailStats(
        n0=n0,
        predicted_fraction=predicted,
        observed_fraction=observed,
        sigma=sigma,
        expected_mean=expected_mean,
        observed_mean=observed_mean,
        mean_sigma=mean_sigma,
        fraction_ok=abs(observed - predicted) <= config.verdict.tail_sigmas * sigma,
        mean_ok=observed_mean <= expected_mean + config.verdict.mean_tail_sigmas * mean_sigma,
    )


def hit_threshold(sample: HitSample, masses: List[MassRow], config: ExperimentConfig) -> HitThreshold:
    """Threshold = min(configured fraction, Poisson-binomial P(>= k) - slack)."""
    v = config.verdict
    predicted = prob_at_least([float(row.estimate) for row in masses], v.min_hits)
    threshold = min(v.hit_fraction_threshold, predicted - v.hit_fraction_slack)
    return HitThreshold(v.min_hits, predicted, threshold, sample.fraction_with_at_least(v.min_hits))


def control_denominators(config: ExperimentConfig) -> Optional[List[int]]:
    """Verified convergent denominators of a continued-fraction rotation, or None."""
    if config.system.get("kind") != "rotation":
        return None
    liouville = config.liouville()
    if liouville is not None:
        return [check.q for check in liouville.checks if check.verified]
    if "partial_quotients" in config.system:
        conv = convergents([int(a) for a in config.system["partial_quotients"]])
        return [q for _, q in conv[:-1]]
    return None


def rotation_control(sample: HitSample, schedule: TargetSchedule, denominators: List[int],
                     fraction: float, summable: str) -> ControlReport:
    """
    Fraction of seeds hitting at every convergent denominator q_k within the horizon.

    Denominators whose radius exceeds 1 - fraction are skipped: distances
    are taken on [0,1], so about a radius-fraction of seeds wraps around.
    """
    rows, skipped = [], []
    for k, q in enumerate(denominators):
        if q < 1 or q > sample.horizon:
            skipped.append(q)
            continue
        radius = float(schedule.psi(q)) if schedule.kind == KIND_PSI else float(schedule.mass_at(q)) / 2.0
        if radius > 1.0 - fraction:
            skipped.append(q)
            continue
        hit = sample.fraction_hitting_at(q)
        rows.append(ControlRow(k, q, radius, hit, hit >= fraction))
    report = ControlReport(fraction, rows, skipped, summable)
    for row in rows:
        glyph = "✓" if row.passed else "✗"
        logger.info(f"{glyph} q_{row.k}={row.q}: {row.hit_fraction:.4f} of seeds hit")
    return report


def _verdict(report: ExperimentReport) -> None:
    hyp = report.hypotheses
    flags = hyp.schedule_flags
    reasons = report.reasons

    if report.control is not None:
        if report.control.passed and flags.summable == YES and hyp.status("decay") != PASS:
            reasons.append("summable schedule, yet every tested convergent denominator hits for most seeds")
            report.verdict = CONTROL_NO_MIXING
            return
        reasons.append("rotation control did not reach its hit fraction")

    if hyp.branch == BRANCH_ZERO:
        if not hyp.branch_supported:
            reasons.append(f"zero-law hypotheses not met: {hyp.statuses}")
        elif not report.tail.fraction_ok:
            reasons.append("tail-hit fraction outside the binomial band")
        elif not report.tail.mean_ok:
            reasons.append("mean tail hits exceed the expected count")
        else:
            reasons.append("tail hits match the summable-mass prediction")
            report.verdict = CONVERGENT_ZERO
            return

    if hyp.branch == BRANCH_FULL:
        if not hyp.branch_supported:
            reasons.append(f"full-measure hypotheses not met: {hyp.statuses}")
        elif not report.quasi or report.ce_threshold is None:
            reasons.append("no quasi-independence report")
        elif report.quasi[-1].chung_erdos_bound < report.ce_threshold:
            reasons.append(
                f"Chung-Erdos bound {report.quasi[-1].chung_erdos_bound:.4f} below {report.ce_threshold:.4f}"
            )
        elif not report.hit_threshold.passed:
            reasons.append(
                f"{report.hit_threshold.observed:.4f} of seeds with >= {report.hit_threshold.min_hits} hits, "
                f"threshold {report.hit_threshold.threshold:.4f}"
            )
        else:
            reasons.append("Chung-Erdos bound and hit counts clear their thresholds")
            report.verdict = DIVERGENT_FULL
            return

    report.verdict = INCONCLUSIVE


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Run every stage for `config`.

    Deterministic given the config and seed; the thread count only changes
    scheduling.

    Raises:
        ExperimentStageError: a stage failed (the cause is attached)
    """
    logger.info("=" * 60)
    logger.info(f"Experiment '{config.name}' (seed {config.seed}, hash {config.config_hash()[:12]})")
    logger.info("=" * 60)

    with _stage("build"):
        system = config.build_system()
        measure = config.build_measure()
        schedule = config.build_schedule(measure)
        twist = config.build_twist()

    with _stage("decay"):
        decay = fit_config_decay(config, system, measure)

    with _stage("hypotheses"):
        checklist = validate_hypotheses(config, decay)
    model = checklist.decay

    with _stage("hits"):
        sample = sample_hits(system, measure, schedule, twist, config.horizon, config.samples, config.seed,
                             config.radius_mode, config.threads, config.batch_size)

    with _stage("masses"):
        masses = mass_table(system, measure, schedule, twist, config.horizon, sample, model, config.radius_mode)

    with _stage("zero-law"):
        tail = tail_statistics(sample, masses, config)
        threshold = hit_threshold(sample, masses, config)

    report = ExperimentReport(config.name, config, checklist, masses, sample, tail, threshold)

    if checklist.branch == BRANCH_FULL:
        with _stage("quasi"):
            if not model.fitted:
                report.reasons.append("decay model not fitted; quasi-independence skipped")
                logger.warning("⚠ Decay model not fitted, skipping quasi-independence reports")
            else:
                cache = PairwiseCache()
                samples = config.quasi.samples or config.samples
                for N in config.grid:
                    report.quasi.append(quasi_independence_report(
                        system, measure, schedule, twist, model, N, config.quasi.method, samples, config.seed,
                        config.radius_mode, config.threads, config.quasi.pair_budget, config.quasi.window_budget,
                        cache,
                    ))
                reference = report.quasi[-1].independence_reference
                report.ce_threshold = min(config.verdict.ce_threshold, config.verdict.ce_ratio * reference)

    denominators = control_denominators(config)
    if denominators is not None:
        with _stage("control"):
            report.control = rotation_control(sample, schedule, denominators, config.verdict.control_fraction,
                                              checklist.schedule_flags.summable)

    _verdict(report)
    logger.info("=" * 60)
    glyph = "⚠" if report.verdict == INCONCLUSIVE else "✓"
    logger.info(f"{glyph} Verdict: {report.verdict}")
    for reason in report.reasons:
        logger.info(f"   {reason}")
    logger.info("=" * 60)
    return report
