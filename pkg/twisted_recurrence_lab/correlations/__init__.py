# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Step observables, correlation estimates and decay fits."""

from twisted_recurrence_lab.correlations.observables import ObservableSpec, bv_norm, l1_norm
from twisted_recurrence_lab.correlations.decay import (
    EXACT,
    MONTE_CARLO,
    CorrelationEstimate,
    DecayModel,
    MixingGap,
    ball_mixing_gap,
    correlation,
    correlation_series,
    decay_hypothesis,
    estimate_decay,
    fit_decay,
    noise_floor_for,
    supports_exact_preimage,
)

__all__ = [
    'ObservableSpec',
    'bv_norm',
    'l1_norm',
    'EXACT',
    'MONTE_CARLO',
    'CorrelationEstimate',
    'DecayModel',
    'MixingGap',
    'ball_mixing_gap',
    'correlation',
    'correlation_series',
    'decay_hypothesis',
    'estimate_decay',
    'fit_decay',
    'noise_floor_for',
    'supports_exact_preimage',
]
