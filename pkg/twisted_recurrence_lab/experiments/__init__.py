# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Experiment configs, hypothesis checks, the staged runner and report files."""

from twisted_recurrence_lab.experiments.config import (
    DecaySettings,
    ExperimentConfig,
    QuasiSettings,
    VerdictThresholds,
    build_measure,
    build_schedule,
    build_system,
    build_twist,
    config_from_dict,
    load_experiment,
)
from twisted_recurrence_lab.experiments.hypotheses import (
    BRANCH_FULL,
    BRANCH_NONE,
    BRANCH_ZERO,
    HypothesisCheck,
    HypothesisChecklist,
    fit_config_decay,
    validate_hypotheses,
)
from twisted_recurrence_lab.experiments.runner import (
    CONTROL_NO_MIXING,
    CONVERGENT_ZERO,
    DIVERGENT_FULL,
    INCONCLUSIVE,
    ControlReport,
    ExperimentReport,
    MassRow,
    TailStats,
    run_experiment,
)
from twisted_recurrence_lab.experiments.report import emit_report, report_files

__all__ = [
    'DecaySettings',
    'ExperimentConfig',
    'QuasiSettings',
    'VerdictThresholds',
    'build_measure',
    'build_schedule',
    'build_system',
    'build_twist',
    'config_from_dict',
    'load_experiment',
    'BRANCH_FULL',
    'BRANCH_NONE',
    'BRANCH_ZERO',
    'HypothesisCheck',
    'HypothesisChecklist',
    'fit_config_decay',
    'validate_hypotheses',
    'CONTROL_NO_MIXING',
    'CONVERGENT_ZERO',
    'DIVERGENT_FULL',
    'INCONCLUSIVE',
    'ControlReport',
    'ExperimentReport',
    'MassRow',
    'TailStats',
    'run_experiment',
    'emit_report',
    'report_files',
]
