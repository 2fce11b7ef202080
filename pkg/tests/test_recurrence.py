#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Tests for target bands, hit detection, R_n masses and Chung-Erdos bounds.
"""

import math
import pytest
import random
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from twisted_recurrence_lab.dynamics import GaussMap
from twisted_recurrence_lab.dynamics.intervals import total_length
from twisted_recurrence_lab.recurrence import (
    AT_X,
    EXACT,
    MONTE_CARLO,
    HitRecord,
    HitSample,
    chung_erdos_lower_bound,
    chung_erdos_ratio,
    hit_times,
    independence_reference,
    lebesgue_bands,
    lebesgue_radius,
    measure_Rn,
    pairwise_mass,
    poisson_binomial_pmf,
    prob_any,
    prob_at_least,
    rn_intervals,
    sample_hits,
    validate_pairwise,
)
from twisted_recurrence_lab.targets import TargetSchedule
from twisted_recurrence_lab.twists import constant, identity, tent
from twisted_recurrence_lab.utils.errors import BudgetExceededError, MethodMismatchError

F = Fraction
TENTH = TargetSchedule.constant("0.1")


class TestBands:
    """Test Lebesgue radii and band segments."""

    @pytest.mark.parametrize("center,M,radius", [
        (F(1, 10), F(1, 2), F(2, 5)),
        (F(19, 20), F(1, 5), F(3, 20)),
        (F(1, 2), F(1, 5), F(1, 10)),
        (F(0), F(1, 10), F(1, 10)),
    ])
    def test_radius_regimes(self, center, M, radius):
        """Left, right and interior radii."""
        assert lebesgue_radius(center, M) == radius

    def test_identity_bands_split_at_regime_changes(self, identity_twist):
        """Identity twist splits at M/2 and 1 - M/2."""
        segments = lebesgue_bands(identity_twist, F(1, 10))
        assert [(s.lo, s.hi) for s in segments] == [(F(0), F(1, 20)), (F(1, 20), F(19, 20)), (F(19, 20), F(1))]

    def test_constant_twist_single_band(self):
        """Constant twist needs no split."""
        (segment,) = lebesgue_bands(constant("0.3"), F(1, 10))
        assert segment.lower == (F(0), F(1, 4))
        assert segment.upper == (F(0), F(7, 20))

    def test_bad_mode(self, identity_twist):
        """Unknown radius modes are rejected."""
        with pytest.raises(ValueError):
            lebesgue_bands(identity_twist, F(1, 10), "at-y")

    def test_bad_mass(self, identity_twist):
        """Band mass must lie in (0,1)."""
        with pytest.raises(ValueError):
            lebesgue_bands(identity_twist, 1)


class TestHits:
    """Test hit times of single orbits."""

    @pytest.mark.exact
    def test_period_two_orbit(self, doubling, lebesgue, identity_twist):
        """1/3 -> 2/3 -> 1/3: hits at even times only."""
        record = hit_times(doubling, lebesgue, TargetSchedule.constant("0.5"), identity_twist, F(1, 3), 6)
        assert record.times == [2, 4, 6]
        assert record.first_hit == 2
        assert record.last_hit == 6
        assert record.hits_from(5) == 1
        assert not record.hit_at(3)

    @pytest.mark.exact
    def test_fixed_point_always_hits(self, doubling, lebesgue, identity_twist):
        """0 is fixed and sits inside every ball around itself."""
        record = hit_times(doubling, lebesgue, TENTH, identity_twist, F(0), 8)
        assert record.times == list(range(1, 9))
        assert record.count == 8

    @pytest.mark.exact
    def test_rotation_returns_after_period(self, rotation, lebesgue, identity_twist):
        """Rational rotation comes back exactly after 201 steps."""
        record = hit_times(rotation, lebesgue, TargetSchedule.constant("0.001"), identity_twist, F(1, 7), 250)
        assert record.times == [201]

    @pytest.mark.exact
    def test_longer_horizon_extends_hit_times(self, doubling, lebesgue, identity_twist):
        """Hits up to N1 are the same whatever horizon N2 >= N1 is used."""
        rng = random.Random(17)
        schedule = TargetSchedule.power("0.5", 1)
        for _ in range(20):
            x = F(rng.randrange(1, 997), 997)
            for twist in (identity_twist, tent()):
                short = hit_times(doubling, lebesgue, schedule, twist, x, 25)
                long = hit_times(doubling, lebesgue, schedule, twist, x, 40)
                assert short.times == [t for t in long.times if t <= 25]

    def test_numeric_path_matches_exact(self, doubling, lebesgue, identity_twist):
        """Float seeds go through certified iteration with the same answer."""
        exact = hit_times(doubling, lebesgue, TargetSchedule.constant("0.5"), identity_twist, F(1, 3), 6)
        numeric = hit_times(doubling, lebesgue, TargetSchedule.constant("0.5"), identity_twist, 1 / 3, 6)
        assert numeric.times == exact.times

    def test_bad_mode(self, doubling, lebesgue, identity_twist):
        """Unknown radius modes are rejected."""
        with pytest.raises(ValueError):
            hit_times(doubling, lebesgue, TENTH, identity_twist, F(1, 3), 3, radius_mode="at-y")


class TestHitSample:
    """Test sample statistics."""

    def _sample(self):
        records = [HitRecord(F(0), 3, 0b1010, index=0), HitRecord(F(1, 2), 3, 0b1000, index=1)]
        return HitSample(records, 3)

    def test_per_n_counts(self):
        """Counts per time index."""
        assert self._sample().per_n_counts() == [1, 0, 2]

    def test_tail_statistics(self):
        """Tail hits from n0 onwards."""
        sample = self._sample()
        assert sample.fraction_with_tail_hit(3) == 1.0
        assert sample.fraction_with_tail_hit(4) == 0.0
        assert sample.mean_tail_hits(1) == 1.5
        assert sample.tail_hit_std(1) == pytest.approx(0.5)

    def test_histogram(self):
        """Histogram of hit counts."""
        sample = self._sample()
        assert sample.count_histogram() == {1: 1, 2: 1}
        assert sample.fraction_with_at_least(2) == 0.5
        assert sample.fraction_hitting_at(3) == 1.0

    def test_to_row(self):
        """CSV row fields."""
        assert HitRecord(F(0), 3, 0b1010, index=4).to_row() == {
            "seed_index": 4, "hit_count": 2, "first_hit": 1, "last_hit": 3,
        }

    @pytest.mark.montecarlo
    def test_thread_count_does_not_change_sample(self, doubling, lebesgue, identity_twist):
        """Records come back in sample order with identical bits."""
        schedule = TargetSchedule.power("0.5", 1)
        single = sample_hits(doubling, lebesgue, schedule, identity_twist, 20, 300, seed=9, threads=1, batch_size=64)
        pooled = sample_hits(doubling, lebesgue, schedule, identity_twist, 20, 300, seed=9, threads=4, batch_size=64)
        assert [r.bits for r in single.records] == [r.bits for r in pooled.records]
        assert [r.seed for r in single.records] == [r.seed for r in pooled.records]
        assert [r.index for r in pooled.records] == list(range(300))


class TestMasses:
    """Test exact and sampled masses of R_n."""

    @pytest.mark.exact
    def test_first_mass(self, doubling, lebesgue, identity_twist):
        """mu(R_1) = 1/10 for f = id, M = 1/10."""
        estimate = measure_Rn(doubling, lebesgue, TENTH, identity_twist, 1)
        assert estimate.value == F(1, 10)
        assert estimate.exact
        assert estimate.stderr == 0

    @pytest.mark.exact
    def test_second_mass(self, doubling, lebesgue, identity_twist):
        """mu(R_2) = 7/60: two interior bands of 1/30 and two end bands of 1/40."""
        assert measure_Rn(doubling, lebesgue, TENTH, identity_twist, 2).value == F(7, 60)

    @pytest.mark.exact
    def test_rn_intervals(self, doubling, identity_twist):
        """R_1 = [0, 1/20) u (19/20, 1)."""
        intervals = rn_intervals(doubling, TENTH, identity_twist, 1)
        assert total_length(intervals) == F(1, 10)
        assert intervals[0].lo == 0
        assert intervals[-1].hi == 1

    @pytest.mark.exact
    def test_constant_twist_mass_is_ball_mass(self, doubling, lebesgue):
        """Invariance: mu(T^-n B) = mu(B)."""
        schedule = TargetSchedule.power("0.5", 1)
        for n in (1, 5, 12):
            assert measure_Rn(doubling, lebesgue, schedule, constant("0.3"), n).value == schedule.mass_at(n)

    @pytest.mark.exact
    def test_constant_twist_random_balls(self, doubling, lebesgue):
        """Twenty seeded (y, M, n) cases, edge-clipped balls included: mu(R_n) = M exactly."""
        rng = random.Random(20240501)
        for _ in range(20):
            y = F(rng.randrange(0, 1001), 1000)
            M = F(rng.randrange(1, 1000), 1000)
            n = rng.randint(1, 15)
            estimate = measure_Rn(doubling, lebesgue, TargetSchedule.constant(M), constant(y), n)
            assert estimate.value == M, (y, M, n)

    @pytest.mark.exact
    def test_at_x_mode(self, doubling, lebesgue, identity_twist):
        """For f = id both radius modes agree."""
        at_fx = measure_Rn(doubling, lebesgue, TENTH, identity_twist, 2)
        at_x = measure_Rn(doubling, lebesgue, TENTH, identity_twist, 2, radius_mode=AT_X)
        assert at_x.value == at_fx.value

    @pytest.mark.montecarlo
    def test_monte_carlo_agrees(self, doubling, lebesgue, identity_twist):
        """Sampled mu(R_2) is within a few standard errors of 7/60."""
        estimate = measure_Rn(doubling, lebesgue, TENTH, identity_twist, 2, MONTE_CARLO, samples=20_000, seed=3)
        assert estimate.method == MONTE_CARLO
        assert abs(estimate.value - 7 / 60) < 5 * estimate.stderr + 1e-3

    @pytest.mark.slow
    @pytest.mark.montecarlo
    def test_monte_carlo_matches_exact_on_random_cases(self, doubling, lebesgue, identity_twist):
        """100 seeded (twist, M, n) cases: at least 95 within four binomial standard errors."""
        rng = random.Random(7)
        twists = [identity_twist, tent(), constant("0.3"), constant("0.05")]
        samples = 1000
        within = 0
        for case in range(100):
            twist = rng.choice(twists)
            schedule = TargetSchedule.constant(F(rng.randrange(1, 11), 20))
            n = rng.randint(1, 6)
            exact = float(measure_Rn(doubling, lebesgue, schedule, twist, n).value)
            sampled = measure_Rn(doubling, lebesgue, schedule, twist, n, MONTE_CARLO, samples=samples, seed=case)
            sigma = math.sqrt(exact * (1 - exact) / samples)
            assert abs(sampled.value - exact) <= 8 * sigma + 2e-3, (twist.name, n)
            within += abs(sampled.value - exact) <= 4 * sigma + 1 / samples
        assert within >= 95

    def test_tolerance_flag(self, doubling, lebesgue, identity_twist):
        """Too few samples for the tolerance flags the estimate."""
        estimate = measure_Rn(doubling, lebesgue, TENTH, identity_twist, 1, MONTE_CARLO, samples=50, seed=1,
                              tolerance=1e-6)
        assert estimate.flagged or estimate.stderr == 0

    def test_exact_needs_lebesgue_affine(self, gauss_measure, identity_twist):
        """No exact masses for the Gauss map."""
        with pytest.raises(MethodMismatchError):
            measure_Rn(GaussMap(), gauss_measure, TENTH, identity_twist, 1)

    def test_index_starts_at_one(self, doubling, lebesgue, identity_twist):
        """n = 0 is rejected."""
        with pytest.raises(ValueError):
            measure_Rn(doubling, lebesgue, TENTH, identity_twist, 0)

    def test_unknown_method(self, doubling, lebesgue, identity_twist):
        """Methods outside the catalog are rejected."""
        with pytest.raises(MethodMismatchError):
            measure_Rn(doubling, lebesgue, TENTH, identity_twist, 1, "guess")


class TestMassBound:
    """|mu(R_n) - M_n| against 3 p(n), with p fitted from correlations alone."""

    @pytest.mark.exact
    @pytest.mark.parametrize("twist", [identity(), tent()], ids=["identity", "tent"])
    @pytest.mark.parametrize("n", range(1, 21))
    def test_mass_within_three_p(self, doubling, lebesgue, doubling_decay, twist, n):
        """Doubling map, M = 1/10."""
        assert doubling_decay.fitted
        estimate = measure_Rn(doubling, lebesgue, TENTH, twist, n)
        assert estimate.exact
        assert abs(float(estimate.value - TENTH.mass_at(n))) <= 3 * doubling_decay.p(n)


class TestPairwise:
    """Test mu(R_n n R_{n+m})."""

    @pytest.mark.exact
    def test_constant_twist_by_invariance(self, doubling, lebesgue):
        """y = 1/8, M = 1/4: B = [0,1/4) and B n T^-1 B = [0,1/8)."""
        estimate = pairwise_mass(doubling, lebesgue, TargetSchedule.constant("0.25"), constant("0.125"), 1, 1)
        assert estimate.value == F(1, 8)

    @pytest.mark.exact
    def test_constant_half_ball(self, doubling, lebesgue):
        """y = 1/4, M = 1/2: B = [0,1/2) and B n T^-1 B = [0,1/4)."""
        estimate = pairwise_mass(doubling, lebesgue, TargetSchedule.constant("0.5"), constant("0.25"), 1, 1)
        assert estimate.value == F(1, 4)

    @pytest.mark.exact
    def test_identity_twist_by_enumeration(self, doubling, lebesgue, identity_twist):
        """R_1 n R_2 = [0,1/40) u (39/40,1)."""
        assert pairwise_mass(doubling, lebesgue, TENTH, identity_twist, 1, 1).value == F(1, 20)

    @pytest.mark.exact
    def test_zero_gap_is_single_mass(self, doubling, lebesgue, identity_twist):
        """m = 0 returns mu(R_n)."""
        assert pairwise_mass(doubling, lebesgue, TENTH, identity_twist, 2, 0).value == F(7, 60)

    @pytest.mark.exact
    def test_tent_pair_within_budget(self, doubling, lebesgue):
        """Tent twist, n=6: 66 pieces x 4 bands = 264 window solves."""
        pair = pairwise_mass(doubling, lebesgue, TENTH, tent(), 6, 1, budget=400)
        single = measure_Rn(doubling, lebesgue, TENTH, tent(), 6)
        assert pair.exact
        assert isinstance(pair.value, Fraction)
        assert 0 <= pair.value <= single.value

    def test_tent_pair_over_budget(self, doubling, lebesgue):
        """n=7 needs 130 x 4 = 520 window solves; refused before enumerating."""
        with pytest.raises(BudgetExceededError):
            pairwise_mass(doubling, lebesgue, TENTH, tent(), 7, 1, budget=400)

    def test_default_budget_refuses_deep_tent_pairs(self, doubling, lebesgue):
        """Deep non-constant pairs are refused quickly under the default budget."""
        with pytest.raises(BudgetExceededError):
            pairwise_mass(doubling, lebesgue, TENTH, tent(), 15, 1)

    def test_negative_gap(self, doubling, lebesgue, identity_twist):
        """m must be nonnegative."""
        with pytest.raises(ValueError):
            pairwise_mass(doubling, lebesgue, TENTH, identity_twist, 1, -1)


class TestChungErdos:
    """Test the second-moment bound and independence references."""

    def test_exact_bound(self):
        """S = 1, C = 3/2 gives 2/3 exactly."""
        masses = [F(1, 2), F(1, 2)]
        pairwise = [[F(1, 2), F(1, 4)], [F(1, 4), F(1, 2)]]
        assert chung_erdos_lower_bound(masses, pairwise) == F(2, 3)

    def test_float_bound(self):
        """Float inputs give a float."""
        assert chung_erdos_lower_bound([0.5, 0.5], [[0.5, 0.25], [0.25, 0.5]]) == pytest.approx(2 / 3)

    def test_random_finite_spaces(self):
        """200 seeded weighted atom spaces: the bound never exceeds the union found by enumeration."""
        rng = random.Random(99)
        for _ in range(200):
            atoms = rng.randint(2, 8)
            raw = [rng.randint(1, 20) for _ in range(atoms)]
            weights = [F(w, sum(raw)) for w in raw]
            events = []
            for _ in range(rng.randint(1, 6)):
                members = {a for a in range(atoms) if rng.random() < 0.5} or {rng.randrange(atoms)}
                events.append(members)

            def weight(members):
                return sum((weights[a] for a in members), F(0))

            masses = [weight(e) for e in events]
            pairwise = [[weight(e & g) for g in events] for e in events]
            union = weight(set().union(*events))
            bound = chung_erdos_lower_bound(masses, pairwise)
            assert isinstance(bound, Fraction)
            assert 0 < bound <= union

    @pytest.mark.parametrize("parts", [[1], [1, 1], [1, 2, 3], [5, 1, 1, 1], [3, 7, 10]])
    def test_disjoint_family_is_tight(self, parts):
        """Disjoint events: S^2 / C = S = mu(union)."""
        masses = [F(p, 20) for p in parts]
        pairwise = [[masses[i] if i == j else F(0) for j in range(len(parts))] for i in range(len(parts))]
        assert chung_erdos_lower_bound(masses, pairwise) == sum(masses)

    def test_independence_reference(self):
        """Independent halves give the same 2/3."""
        assert independence_reference([0.5, 0.5]) == pytest.approx(2 / 3)

    def test_zero_second_moment(self):
        """Empty unions bound nothing."""
        assert chung_erdos_ratio(0, 0) == 0

    @pytest.mark.parametrize("masses,pairwise", [
        ([0.5, 0.5], [[0.5, 0.25]]),
        ([0.5, 0.5], [[0.5, 0.25], [0.3, 0.5]]),
        ([0.5, 0.5], [[0.4, 0.25], [0.25, 0.5]]),
        ([0.5, 0.2], [[0.5, 0.3], [0.3, 0.2]]),
    ])
    def test_inconsistent_matrix(self, masses, pairwise):
        """Shape, symmetry, diagonal and entry bounds are checked."""
        with pytest.raises(ValueError):
            validate_pairwise(masses, pairwise)

    def test_poisson_binomial(self):
        """Two fair coins."""
        assert poisson_binomial_pmf([0.5, 0.5]).tolist() == pytest.approx([0.25, 0.5, 0.25])
        assert prob_at_least([0.5, 0.5], 2) == pytest.approx(0.25)
        assert prob_any([0.5, 0.5]) == pytest.approx(0.75)
