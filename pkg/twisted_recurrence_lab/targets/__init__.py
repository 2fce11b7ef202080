# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Target-mass schedules, radius solving and window diagnostics."""

from twisted_recurrence_lab.targets.schedules import (
    PsiForm,
    ScheduleFlags,
    TargetSchedule,
    WindowRow,
    classify_schedule,
    geometric_grid,
    mass_at,
    window_sum,
    window_table,
)
from twisted_recurrence_lab.targets.radii import (
    LipschitzReport,
    RadiusSolution,
    lipschitz_radius_check,
    radius_for_mass,
    solve_radius,
)

__all__ = [
    'PsiForm',
    'ScheduleFlags',
    'TargetSchedule',
    'WindowRow',
    'classify_schedule',
    'geometric_grid',
    'mass_at',
    'window_sum',
    'window_table',
    'LipschitzReport',
    'RadiusSolution',
    'lipschitz_radius_check',
    'radius_for_mass',
    'solve_radius',
]
