# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Interval maps, honest orbit iteration and continued-fraction rotations."""

from twisted_recurrence_lab.dynamics.base import (
    IntervalMap,
    Orbit,
    PrecisionPolicy,
    evaluate_map,
    iterate_orbit,
)
from twisted_recurrence_lab.dynamics.intervals import Interval, merge_intervals, total_length
from twisted_recurrence_lab.dynamics.affine import AffineBranch, AffineMap, PreimageSet, preimage_intervals
from twisted_recurrence_lab.dynamics.gauss_map import GaussMap
from twisted_recurrence_lab.dynamics.invariance import InvarianceReport, check_invariance
from twisted_recurrence_lab.dynamics.liouville import (
    LiouvilleRotation,
    build_liouville_rotation,
    convergents,
    rotation_from_cf,
)

__all__ = [
    'IntervalMap',
    'Orbit',
    'PrecisionPolicy',
    'evaluate_map',
    'iterate_orbit',
    'Interval',
    'merge_intervals',
    'total_length',
    'AffineBranch',
    'AffineMap',
    'PreimageSet',
    'preimage_intervals',
    'GaussMap',
    'InvarianceReport',
    'check_invariance',
    'LiouvilleRotation',
    'build_liouville_rotation',
    'convergents',
    'rotation_from_cf',
]
