# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Hypothesis checklist for an experiment config.

Every verdict is conditioned on these checks:

    twist        piecewise Lipschitz and monotone certificate
    regularity   declared mu(B(x,r)) <= c r^s holds on a probe grid
    decay        exponential decay fit of the probe autocorrelations
    schedule     summable / window-divergent classification

The zero-law branch needs a summable schedule and summable decay, the
full-measure branch additionally needs exponential decay, regularity and a
divergent window sum.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from twisted_recurrence_lab.correlations.decay import (
    FAIL,
    PASS,
    UNKNOWN,
    CorrelationEstimate,
    DecayModel,
    decay_hypothesis,
    estimate_decay,
)
from twisted_recurrence_lab.experiments.config import ExperimentConfig
from twisted_recurrence_lab.measures.regularity import probe_grid, verify_upper_ahlfors
from twisted_recurrence_lab.targets.schedules import YES, ScheduleFlags, classify_schedule
from twisted_recurrence_lab.twists.base import certify

logger = logging.getLogger(__name__)

BRANCH_ZERO = "zero-law"
BRANCH_FULL = "full-measure"
BRANCH_NONE = "none"

_GLYPHS = {PASS: "✓", FAIL: "✗", UNKNOWN: "⚠"}


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class HypothesisChecklist:
    checks: List[HypothesisCheck]
    branch: str
    decay: DecayModel
    series: List[CorrelationEstimate]
    schedule_flags: ScheduleFlags
    notes: List[str] = field(default_factory=list)

    def status(self, name: str) -> str:
        for check in self.checks:
            if check.name == name:
                return check.status
        raise KeyError(name)

    @property
    def statuses(self) -> Dict[str, str]:
        return {check.name: check.status for check in self.checks}

    @property
    def branch_supported(self) -> bool:
        """True when no hypothesis the selected branch depends on has failed."""
        if self.branch == BRANCH_ZERO:
            return self.status("twist") == PASS and self.status("decay") != FAIL
        if self.branch == BRANCH_FULL:
            return all(self.status(name) == PASS for name in ("twist", "regularity", "decay", "schedule"))
        return False

    @property
    def failed(self) -> List[str]:
        return [check.name for check in self.checks if check.status == FAIL]

    def to_dict(self) -> dict:
        return {
            "checks": [check.to_dict() for check in self.checks],
            "branch": self.branch,
            "branch_supported": self.branch_supported,
            "decay": self.decay.to_dict(),
            "schedule": self.schedule_flags.to_dict(),
            "notes": list(self.notes),
        }


def _regularity_check(measure) -> HypothesisCheck:
    if measure.regularity is None:
        return HypothesisCheck("regularity", UNKNOWN, f"no regularity constants declared for '{measure.name}'")
    c, s = measure.regularity
    report = verify_upper_ahlfors(measure, c, s, probe_grid())
    status = PASS if report.passed else FAIL
    return HypothesisCheck("regularity", status, f"c={c:.6g}, s={s:g}, worst ratio {report.worst_ratio:.6g}")


def _twist_check(twist) -> HypothesisCheck:
    certificate = certify(twist)
    status = PASS if certificate.passed else FAIL
    return HypothesisCheck("twist", status, f"{len(twist.pieces)} pieces, L={float(twist.global_lipschitz):g}")


def _decay_check(model: DecayModel, config: ExperimentConfig) -> HypothesisCheck:
    status = decay_hypothesis(model, config.decay.gamma_max, config.decay.r2_min)
    if model.fitted:
        detail = f"C={model.C:.6g}, gamma={model.gamma:.6g}, R2={model.r_squared:.4f}"
    else:
        detail = f"{model.status}: {model.n_points} points above floor {model.noise_floor:.3g}"
    return HypothesisCheck("decay", status, detail)


def _schedule_check(flags: ScheduleFlags) -> HypothesisCheck:
    # either branch needs a decided schedule
    if YES in (flags.summable, flags.window_divergent):
        status = PASS
    elif UNKNOWN in (flags.summable, flags.window_divergent):
        status = UNKNOWN
    else:
        status = FAIL
    return HypothesisCheck("schedule", status, f"summable={flags.summable}, window-divergent={flags.window_divergent}")


def fit_config_decay(config: ExperimentConfig, system=None, measure=None) -> Tuple[DecayModel, List[CorrelationEstimate]]:
    """Decay model for the config's system, estimated the way its decay section says."""
    system = system or config.build_system()
    measure = measure or config.build_measure()
    settings = config.decay
    return estimate_decay(
        system, measure, settings.horizon, settings.method, settings.probe,
        samples=settings.samples, seed=config.seed, threads=config.threads, batch_size=config.batch_size,
    )


def validate_hypotheses(config: ExperimentConfig,
                        decay: Optional[Tuple[DecayModel, List[CorrelationEstimate]]] = None) -> HypothesisChecklist:
    """
    Run the hypothesis checks and select the zero-one branch.

    Args:
        config: Experiment config
        decay: Precomputed (model, series) to reuse instead of a fresh fit

    Returns:
        HypothesisChecklist; never raises on a failed check
    """
    system = config.build_system()
    measure = config.build_measure()
    schedule = config.build_schedule(measure)
    twist = config.build_twist()

    model, series = decay if decay is not None else fit_config_decay(config, system, measure)
    flags = classify_schedule(schedule)

    checks = [
        _twist_check(twist),
        _regularity_check(measure),
        _decay_check(model, config),
        _schedule_check(flags),
    ]

    notes = []
    if flags.summable == YES:
        branch = BRANCH_ZERO
    elif flags.window_divergent == YES:
        branch = BRANCH_FULL
    else:
        branch = BRANCH_NONE
        notes.append("schedule is neither summable nor window-divergent; no branch applies")
    if system.invariant_measure != measure.name:
        notes.append(f"'{system.name}' preserves '{system.invariant_measure}', run uses '{measure.name}'")

    checklist = HypothesisChecklist(checks, branch, model, series, flags, notes)
    for check in checks:
        logger.info(f"{_GLYPHS[check.status]} {check.name}: {check.status} ({check.detail})")
    logger.info(f"Branch: {branch} (supported: {checklist.branch_supported})")
    return checklist
