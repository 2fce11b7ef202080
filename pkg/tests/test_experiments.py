#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Tests for experiment configs, hypothesis checks, the runner and report files.
"""

import copy
import json
import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from twisted_recurrence_lab.correlations.decay import DEGENERATE, NO_FIT, PASS
from twisted_recurrence_lab.experiments import (
    BRANCH_FULL,
    BRANCH_ZERO,
    CONTROL_NO_MIXING,
    CONVERGENT_ZERO,
    DIVERGENT_FULL,
    config_from_dict,
    emit_report,
    fit_config_decay,
    load_experiment,
    report_files,
    run_experiment,
    validate_hypotheses,
)
from twisted_recurrence_lab.experiments.report import render_csv
from twisted_recurrence_lab.experiments.runner import (
    MassRow,
    control_denominators,
    hit_threshold,
    rotation_control,
    tail_statistics,
)
from twisted_recurrence_lab.recurrence import EXACT, HitRecord, HitSample
from twisted_recurrence_lab.targets import TargetSchedule
from twisted_recurrence_lab.targets.schedules import YES
from twisted_recurrence_lab.utils.errors import ConfigError

F = Fraction

SMALL_ZERO_LAW = {
    "name": "small_zero_law",
    "system": {"kind": "doubling"},
    "measure": {"kind": "lebesgue"},
    "schedule": {"kind": "power", "c": "0.1", "a": 2},
    "twist": {"kind": "identity"},
    "horizon": 10,
    "samples": 200,
    "seed": 17,
    "batch_size": 50,
    "decay": {"horizon": 8},
}

SMALL_DIVERGENCE = {
    "name": "small_divergence",
    "system": {"kind": "doubling"},
    "measure": {"kind": "lebesgue"},
    "schedule": {"kind": "harmonic-log", "c": 2, "b": 0, "cap": "0.5"},
    "twist": {"kind": "constant", "y": "3/10"},
    "horizon": 15,
    "n_grid": [8, 15],
    "samples": 300,
    "seed": 5,
    "decay": {"horizon": 12},
}


def with_changes(base, **changes):
    data = copy.deepcopy(base)
    data.update(changes)
    return data


class TestConfig:
    """Test config parsing and overrides."""

    def test_defaults_and_sections(self):
        """Components are kept as mappings and built on demand."""
        config = config_from_dict(SMALL_ZERO_LAW)
        assert config.name == "small_zero_law"
        assert config.radius_mode == "at-fx"
        assert config.grid == [10]
        assert config.build_system().name == "doubling"
        assert config.build_schedule().mass_at(2) == F(1, 40)

    @pytest.mark.parametrize("section", ["system", "measure", "schedule", "twist"])
    def test_missing_section(self, section):
        """Every component section is required."""
        data = copy.deepcopy(SMALL_ZERO_LAW)
        del data[section]
        with pytest.raises(ConfigError):
            config_from_dict(data)

    @pytest.mark.parametrize("section,spec", [
        ("system", {"kind": "baker"}),
        ("measure", {"kind": "counting"}),
        ("schedule", {"kind": "cubic", "c": 1}),
        ("twist", {"kind": "spiral"}),
        ("schedule", {"kind": "power", "c": "0.1"}),
        ("twist", {"kind": "constant"}),
        ("system", {"kind": "rotation"}),
        ("measure", {"kind": "cdf-table", "path": "/nonexistent/table.csv"}),
    ])
    def test_bad_component(self, section, spec):
        """Unknown kinds and missing parameters fail at load time."""
        with pytest.raises(ConfigError):
            config_from_dict(with_changes(SMALL_ZERO_LAW, **{section: spec}))

    @pytest.mark.parametrize("changes", [
        {"horizon": 0},
        {"samples": 0},
        {"radius_mode": "at-y"},
        {"n_grid": [0, 4]},
        {"quasi": {"method": "guess"}},
        {"decay": {"method": "guess"}},
        {"verdict": {"confidence": 0.5}},
    ])
    def test_out_of_range(self, changes):
        """Out-of-range values and unknown keys are rejected."""
        with pytest.raises(ConfigError):
            config_from_dict(with_changes(SMALL_ZERO_LAW, **changes))

    def test_env_fallback(self, monkeypatch):
        """Keys missing from the JSON come from the environment."""
        monkeypatch.setenv("RUNNER_THREADS", "3")
        data = copy.deepcopy(SMALL_ZERO_LAW)
        config = config_from_dict(data)
        assert config.threads == 3

    def test_json_wins_over_env(self, monkeypatch):
        """Values in the document take priority."""
        monkeypatch.setenv("SEED", "99")
        assert config_from_dict(SMALL_ZERO_LAW).seed == 17

    def test_overrides(self):
        """None overrides are ignored, others replace the value."""
        config = config_from_dict(SMALL_ZERO_LAW)
        assert config.with_overrides(seed=None) is config
        assert config.with_overrides(seed=3, horizon=12).horizon == 12

    def test_bad_override(self):
        """Overrides are validated like the document."""
        with pytest.raises(ConfigError):
            config_from_dict(SMALL_ZERO_LAW).with_overrides(threads=0)

    def test_hash_ignores_scheduling(self):
        """threads and out_dir never change the hash; the seed does."""
        config = config_from_dict(SMALL_ZERO_LAW)
        assert config.with_overrides(threads=8, out_dir="elsewhere").config_hash() == config.config_hash()
        assert config.with_overrides(seed=18).config_hash() != config.config_hash()

    def test_load_missing_file(self, tmp_path):
        """Missing files are config errors."""
        with pytest.raises(ConfigError):
            load_experiment(tmp_path / "nope.json")

    def test_load_invalid_json(self, tmp_path):
        """Malformed JSON is a config error."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_experiment(path)

    def test_name_defaults_to_file_stem(self, tmp_path):
        """Unnamed configs take the file name."""
        data = copy.deepcopy(SMALL_ZERO_LAW)
        del data["name"]
        path = tmp_path / "from_file.json"
        path.write_text(json.dumps(data))
        assert load_experiment(path).name == "from_file"

    @pytest.mark.parametrize("name", ["zero_law", "divergence", "rotation_control", "gauss_zero_law"])
    def test_shipped_configs_load(self, config_dir, name):
        """Every shipped config parses."""
        assert load_experiment(config_dir / f"{name}.json").name == name

    def test_partial_quotient_rotation(self):
        """[0; 201, 3] gives alpha = 3/604 and control denominators 1, 201."""
        config = config_from_dict(with_changes(SMALL_ZERO_LAW, system={"kind": "rotation",
                                                                        "partial_quotients": [201, 3]}))
        assert config.build_system().alpha == F(3, 604)
        assert control_denominators(config) == [1, 201]

    def test_liouville_rotation(self, config_dir):
        """The shipped control config builds its construction."""
        config = load_experiment(config_dir / "rotation_control.json")
        liouville = config.liouville()
        assert liouville.partial_quotients[0] == 201
        assert control_denominators(config) == [1, 201]

    def test_no_control_for_mixing_maps(self):
        """Only rotations have a control stage."""
        assert control_denominators(config_from_dict(SMALL_ZERO_LAW)) is None


class TestHypotheses:
    """Test the checklist and branch selection."""

    def test_zero_law_branch(self):
        """Summable schedule on the doubling map."""
        checklist = validate_hypotheses(config_from_dict(SMALL_ZERO_LAW))
        assert checklist.branch == BRANCH_ZERO
        assert checklist.branch_supported
        assert checklist.status("decay") == PASS
        assert checklist.failed == []

    def test_full_measure_branch(self):
        """Divergent window sums select the full-measure branch."""
        checklist = validate_hypotheses(config_from_dict(SMALL_DIVERGENCE))
        assert checklist.branch == BRANCH_FULL
        assert checklist.branch_supported
        assert checklist.schedule_flags.window_divergent == YES

    def test_wrong_regularity_fails(self):
        """Declared constants that do not hold fail the regularity check."""
        data = with_changes(SMALL_DIVERGENCE, measure={"kind": "lebesgue", "regularity": [1, 1.5]})
        checklist = validate_hypotheses(config_from_dict(data))
        assert checklist.status("regularity") == "fail"
        assert not checklist.branch_supported
        assert "regularity" in checklist.failed

    def test_missing_regularity_is_unknown(self):
        """regularity: null leaves the check undecided."""
        data = with_changes(SMALL_DIVERGENCE, measure={"kind": "lebesgue", "regularity": None})
        assert validate_hypotheses(config_from_dict(data)).status("regularity") == "unknown"

    def test_non_invariant_measure_noted(self):
        """Running the doubling map under the Gauss measure is flagged."""
        data = with_changes(SMALL_ZERO_LAW, measure={"kind": "gauss"}, decay={"horizon": 4, "method": "monte-carlo",
                                                                             "samples": 200})
        checklist = validate_hypotheses(config_from_dict(data))
        assert any("preserves 'lebesgue'" in note for note in checklist.notes)

    def test_rotation_config_decay_is_not_fitted(self, config_dir):
        """Rotation correlations fall linearly: the decay fit refuses them."""
        model, series = fit_config_decay(load_experiment(config_dir / "rotation_control.json"))
        assert series
        assert model.status in (DEGENERATE, NO_FIT)
        assert not model.fitted

    @pytest.mark.slow
    def test_gauss_regularity(self, config_dir):
        """The Gauss measure passes its declared regularity."""
        checklist = validate_hypotheses(load_experiment(config_dir / "gauss_zero_law.json"))
        assert checklist.status("regularity") == PASS
        assert checklist.branch == BRANCH_ZERO


class TestStages:
    """Test stage helpers on hand-built samples."""

    def test_mass_row_bound(self):
        """Within M_n +/- 3p(n), allowing three standard errors."""
        assert MassRow(1, F(1, 10), F(1, 10), 0.0, 0.01, EXACT).within_bound is True
        assert MassRow(1, F(1, 10), F(1, 5), 0.0, 0.01, EXACT).within_bound is False
        assert MassRow(1, F(1, 10), F(1, 5), 0.0, None, EXACT).within_bound is None

    def test_tail_statistics(self):
        """Observed tail hits match the independent prediction."""
        config = config_from_dict(with_changes(SMALL_ZERO_LAW, horizon=4))
        records = [HitRecord(F(0), 4, bits, index=i) for i, bits in enumerate([0b1000, 0b10000, 0b11000, 0])]
        sample = HitSample(records, 4)
        masses = [MassRow(n, F(1, 2), F(1, 2), 0.0, None, EXACT) for n in range(1, 5)]
        tail = tail_statistics(sample, masses, config)
        assert tail.n0 == 3
        assert tail.predicted_fraction == pytest.approx(0.75)
        assert tail.observed_fraction == 0.75
        assert tail.expected_mean == pytest.approx(1.0)
        assert tail.observed_mean == 1.0
        assert tail.fraction_ok and tail.mean_ok

        threshold = hit_threshold(sample, masses, config)
        assert threshold.predicted == 0.0
        assert threshold.passed

    def test_rotation_control(self):
        """Denominators past the horizon are skipped."""
        records = [HitRecord(F(0), 10, (1 << 1) | (1 << 5), index=i) for i in range(10)]
        report = rotation_control(HitSample(records, 10), TargetSchedule.constant("0.01"), [1, 5, 50], 0.99, YES)
        assert [row.q for row in report.rows] == [1, 5]
        assert report.skipped == [50]
        assert report.passed
        assert report.rows[0].radius == pytest.approx(0.005)


class TestRunner:
    """Test full runs and their report files."""

    @pytest.mark.integration
    def test_thread_count_does_not_change_files(self):
        """Reports are byte-identical for 1 and 2 threads."""
        config = config_from_dict(SMALL_ZERO_LAW)
        single = report_files(run_experiment(config.with_overrides(threads=1)))
        pooled = report_files(run_experiment(config.with_overrides(threads=2)))
        assert single == pooled

    @pytest.mark.integration
    def test_emit_report(self, tmp_path):
        """All four files land in the output directory."""
        report = run_experiment(config_from_dict(SMALL_ZERO_LAW))
        written = emit_report(report, tmp_path / "out")
        assert sorted(p.name for p in written) == ["hits.csv", "masses.csv", "quasi.csv", "report.json"]

        masses = (tmp_path / "out" / "masses.csv").read_text().splitlines()
        assert masses[0] == "n,M_n,mu_Rn_est,stderr,three_p_bound"
        assert len(masses) == 1 + 10
        assert len((tmp_path / "out" / "hits.csv").read_text().splitlines()) == 1 + 200

        data = json.loads((tmp_path / "out" / "report.json").read_text())
        assert data["name"] == "small_zero_law"
        assert data["hypotheses"]["branch"] == BRANCH_ZERO
        assert "threads" not in data["config"]
        assert len(data["provenance"]["config_hash"]) == 64

    @pytest.mark.integration
    def test_exact_mass_table(self):
        """Exact masses for the doubling map: mu(R_1) = M_1 = 1/10."""
        report = run_experiment(config_from_dict(SMALL_ZERO_LAW))
        first = report.masses[0]
        assert first.method == EXACT
        assert first.estimate == F(1, 10)
        assert first.stderr == 0.0

    @pytest.mark.integration
    def test_full_measure_run_has_quasi_reports(self):
        """One quasi-independence report per grid point."""
        report = run_experiment(config_from_dict(SMALL_DIVERGENCE))
        assert [q.N for q in report.quasi] == [8, 15]
        assert report.ce_threshold is not None
        assert report.ce_threshold <= report.config.verdict.ce_threshold
        files = report_files(report)
        assert len(files["quasi.csv"].splitlines()) == 3

    @pytest.mark.slow
    @pytest.mark.integration
    def test_zero_law_verdict(self, config_dir):
        """The shipped zero-law experiment finds convergent-zero evidence."""
        report = run_experiment(load_experiment(config_dir / "zero_law.json"))
        assert report.verdict == CONVERGENT_ZERO

    @pytest.mark.slow
    @pytest.mark.integration
    def test_rotation_control_verdict(self, config_dir):
        """Summable psi yet hits at every denominator: no mixing."""
        report = run_experiment(load_experiment(config_dir / "rotation_control.json"))
        assert report.control is not None and report.control.passed
        assert report.hypotheses.status("decay") != PASS
        assert report.verdict == CONTROL_NO_MIXING

    @pytest.mark.slow
    @pytest.mark.integration
    def test_divergence_verdict(self, config_dir):
        """Tent twist, divergent harmonic-log sum: full-measure evidence within the pair budget."""
        report = run_experiment(load_experiment(config_dir / "divergence.json"))
        assert report.hypotheses.branch == BRANCH_FULL
        assert report.verdict == DIVERGENT_FULL


class TestReportFiles:
    """Test CSV rendering."""

    def test_none_becomes_empty_cell(self):
        """Missing bounds are written as empty cells."""
        text = render_csv(("n", "bound"), [{"n": 1, "bound": None}, {"n": 2, "bound": 0.5}])
        assert text == "n,bound\n1,\n2,0.5\n"
