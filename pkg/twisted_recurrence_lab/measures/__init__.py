# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Probability measures on [0,1] and their regularity probes."""

from twisted_recurrence_lab.measures.base import MeasureModel, CallableMeasure
from twisted_recurrence_lab.measures.lebesgue import LebesgueMeasure
from twisted_recurrence_lab.measures.gauss import GaussMeasure
from twisted_recurrence_lab.measures.tabulated import TabulatedMeasure
from twisted_recurrence_lab.measures.regularity import (
    AhlforsReport,
    probe_grid,
    verify_upper_ahlfors,
    verify_lower_ahlfors,
)

__all__ = [
    'MeasureModel',
    'CallableMeasure',
    'LebesgueMeasure',
    'GaussMeasure',
    'TabulatedMeasure',
    'AhlforsReport',
    'probe_grid',
    'verify_upper_ahlfors',
    'verify_lower_ahlfors',
]
