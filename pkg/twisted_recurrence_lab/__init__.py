# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Twisted Recurrence Lab - finite-horizon experiments on twisted recurrence

Measures how often T^n x lands in a shrinking ball around f(x) for interval
maps, and collects the evidence for the zero-one law of the limsup set.
"""

__version__ = "1.0.0"
__author__ = "chiefgyk3d"
__license__ = "MPL-2.0"

from twisted_recurrence_lab.measures import (
    MeasureModel,
    LebesgueMeasure,
    GaussMeasure,
    TabulatedMeasure,
)

from twisted_recurrence_lab.dynamics import (
    IntervalMap,
    AffineMap,
    GaussMap,
)

from twisted_recurrence_lab.twists import TwistSpec
from twisted_recurrence_lab.targets import TargetSchedule

from twisted_recurrence_lab.experiments import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    load_experiment,
    run_experiment,
    validate_hypotheses,
)

__all__ = [
    # Measures
    'MeasureModel',
    'LebesgueMeasure',
    'GaussMeasure',
    'TabulatedMeasure',
    # Systems
    'IntervalMap',
    'AffineMap',
    'GaussMap',
    # Twists and targets
    'TwistSpec',
    'TargetSchedule',
    # Experiments
    'ExperimentConfig',
    'ExperimentReport',
    'emit_report',
    'load_experiment',
    'run_experiment',
    'validate_hypotheses',
    # Metadata
    '__version__',
    '__author__',
    '__license__',
]
