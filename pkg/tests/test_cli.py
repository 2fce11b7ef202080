#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Tests for the trl command line.
"""

import json
import pytest
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from twisted_recurrence_lab.main import EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_OK, run_cli

CONFIG = {
    "name": "cli_check",
    "system": {"kind": "doubling"},
    "measure": {"kind": "lebesgue"},
    "schedule": {"kind": "constant", "c": "0.1"},
    "twist": {"kind": "identity"},
    "horizon": 10,
    "samples": 200,
    "seed": 4,
    "decay": {"horizon": 8},
}


@pytest.fixture
def write_config(tmp_path, monkeypatch):
    """Write a config into an isolated working directory."""
    monkeypatch.chdir(tmp_path)

    def _write(data=None, name="cli_check.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data or CONFIG))
        return path

    return _write


class TestCommands:
    """Test each subcommand's output and exit code."""

    def test_validate(self, write_config, capsys):
        """Checklist JSON on stdout."""
        assert run_cli(["validate", str(write_config())]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["branch"] == "full-measure"
        assert [check["name"] for check in data["checks"]] == ["twist", "regularity", "decay", "schedule"]

    def test_validate_strict_failure(self, write_config):
        """A failed check exits 2 under --strict."""
        bad = dict(CONFIG, measure={"kind": "lebesgue", "regularity": [1, 1.5]})
        assert run_cli(["validate", str(write_config(bad)), "--strict"]) == EXIT_HYPOTHESIS
        assert run_cli(["validate", str(write_config(bad))]) == EXIT_OK

    def test_rn_mass(self, write_config, capsys):
        """Exact mu(R_1) = 1/10."""
        assert run_cli(["rn-mass", str(write_config()), "--n", "1"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["exact_value"] == "1/10"
        assert data["method"] == "exact"

    def test_pairwise(self, write_config, capsys):
        """Exact mu(R_1 n R_2) = 1/20."""
        assert run_cli(["pairwise", str(write_config()), "--n", "1", "--m", "1"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["exact_value"] == "1/20"

    def test_rn_mass_monte_carlo(self, write_config, capsys):
        """--method forces sampling."""
        path = str(write_config())
        assert run_cli(["rn-mass", path, "--n", "1", "--method", "monte-carlo", "--samples", "100"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["method"] == "monte-carlo"
        assert data["exact_value"] is None

    def test_corr(self, write_config, capsys):
        """Correlation CSV with one row per lag."""
        assert run_cli(["corr", str(write_config())]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,corr,stderr"
        assert len(lines) == 1 + 8

    def test_window(self, write_config, capsys):
        """Window sums on the doubling grid."""
        assert run_cli(["window", str(write_config()), "--n-max", "10"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "N,low_index,window_sum"
        assert [line.split(",")[0] for line in lines[1:]] == ["4", "8", "10"]

    def test_quasi_report(self, write_config, capsys):
        """One report at the horizon when no grid is given."""
        assert run_cli(["quasi-report", str(write_config())]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert [report["N"] for report in data["reports"]] == [10]

    def test_rotation_control_needs_rotation(self, write_config):
        """Mixing maps have no convergent denominators."""
        assert run_cli(["rotation-control", str(write_config())]) == EXIT_ERROR

    @pytest.mark.integration
    def test_run_writes_reports(self, write_config, tmp_path):
        """run writes into out_dir/name."""
        out = tmp_path / "results"
        assert run_cli(["run", str(write_config()), "--out-dir", str(out)]) == EXIT_OK
        assert (out / "cli_check" / "report.json").exists()
        assert (out / "cli_check" / "masses.csv").exists()

    @pytest.mark.integration
    def test_run_json_only(self, write_config, tmp_path):
        """--format json writes only report.json."""
        out = tmp_path / "results"
        assert run_cli(["run", str(write_config()), "--out-dir", str(out), "--format", "json"]) == EXIT_OK
        assert sorted(p.name for p in (out / "cli_check").iterdir()) == ["report.json"]


class TestErrors:
    """Test exit codes for bad input."""

    def test_missing_config(self, tmp_path, monkeypatch):
        """Missing files exit 1."""
        monkeypatch.chdir(tmp_path)
        assert run_cli(["validate", str(tmp_path / "nope.json")]) == EXIT_ERROR

    def test_invalid_config(self, write_config):
        """Unknown kinds exit 1."""
        bad = dict(CONFIG, system={"kind": "baker"})
        assert run_cli(["validate", str(write_config(bad))]) == EXIT_ERROR

    def test_bad_override(self, write_config):
        """Overrides are validated."""
        assert run_cli(["validate", str(write_config()), "--horizon", "0"]) == EXIT_ERROR

    def test_missing_required_flag(self, write_config):
        """argparse exits 2 without --n."""
        with pytest.raises(SystemExit) as excinfo:
            run_cli(["rn-mass", str(write_config())])
        assert excinfo.value.code == 2
