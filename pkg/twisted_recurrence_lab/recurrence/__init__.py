# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Hit detection, R_n masses and quasi-independence bookkeeping."""

from twisted_recurrence_lab.recurrence.bands import (
    AT_FX,
    AT_X,
    RADIUS_MODES,
    BandSegment,
    lebesgue_band,
    lebesgue_bands,
    lebesgue_radius,
)
from twisted_recurrence_lab.recurrence.hits import HitRecord, HitSample, hit_times, sample_hits
from twisted_recurrence_lab.recurrence.masses import (
    EXACT,
    MONTE_CARLO,
    MassEstimate,
    measure_Rn,
    pairwise_mass,
    rn_intervals,
    supports_exact,
)
from twisted_recurrence_lab.recurrence.chung_erdos import (
    chung_erdos_lower_bound,
    chung_erdos_ratio,
    independence_reference,
    poisson_binomial_pmf,
    prob_any,
    prob_at_least,
    validate_pairwise,
)
from twisted_recurrence_lab.recurrence.quasi import (
    AUTO,
    KConstants,
    PairRow,
    PairwiseCache,
    QuasiIndependenceReport,
    d_sum,
    index_window,
    k_constants,
    pairwise_rhs,
    quasi_independence_report,
)

__all__ = [
    'AT_FX',
    'AT_X',
    'RADIUS_MODES',
    'BandSegment',
    'lebesgue_band',
    'lebesgue_bands',
    'lebesgue_radius',
    'HitRecord',
    'HitSample',
    'hit_times',
    'sample_hits',
    'EXACT',
    'MONTE_CARLO',
    'MassEstimate',
    'measure_Rn',
    'pairwise_mass',
    'rn_intervals',
    'supports_exact',
    'chung_erdos_lower_bound',
    'chung_erdos_ratio',
    'independence_reference',
    'poisson_binomial_pmf',
    'prob_any',
    'prob_at_least',
    'validate_pairwise',
    'AUTO',
    'KConstants',
    'PairRow',
    'PairwiseCache',
    'QuasiIndependenceReport',
    'd_sum',
    'index_window',
    'k_constants',
    'pairwise_rhs',
    'quasi_independence_report',
]
