# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Report files.

report.json plus masses.csv, hits.csv and quasi.csv. Nothing time- or
machine-dependent beyond the recorded library versions is written, so the
same config and seed reproduce every byte.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

from twisted_recurrence_lab.experiments.runner import ExperimentReport

logger = logging.getLogger(__name__)

FORMAT_JSON = "json"
FORMAT_CSV = "csv-bundle"
FORMAT_ALL = "all"
FORMATS = (FORMAT_JSON, FORMAT_CSV, FORMAT_ALL)

MASS_HEADER = ("n", "M_n", "mu_Rn_est", "stderr", "three_p_bound")
HIT_HEADER = ("seed_index", "hit_count", "first_hit", "last_hit")
QUASI_HEADER = ("N", "sigma_N", "S_N", "C_N", "ce_bound")


def render_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=str) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Dict]) -> str:
    """CSV text with '\\n' line endings; None becomes an empty cell."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if row[key] is None else row[key] for key in header])
    return buffer.getvalue()


def report_files(report: ExperimentReport, fmt: str = FORMAT_ALL) -> Dict[str, str]:
    """File name -> content for the requested format."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format '{fmt}'")
    files = {}
    if fmt in (FORMAT_JSON, FORMAT_ALL):
        files["report.json"] = render_json(report.to_dict())
    if fmt in (FORMAT_CSV, FORMAT_ALL):
        files["masses.csv"] = render_csv(MASS_HEADER, (row.to_row() for row in report.masses))
        files["hits.csv"] = render_csv(HIT_HEADER, (record.to_row() for record in report.hits.records))
        files["quasi.csv"] = render_csv(QUASI_HEADER, (q.to_row() for q in report.quasi))
    return files


def emit_report(report: ExperimentReport, out_dir: Union[str, Path], fmt: str = FORMAT_ALL) -> List[Path]:
    """
    Write the report files into out_dir.

    Raises:
        OSError: the directory or a file cannot be written
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in report_files(report, fmt).items():
        path = out / name
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)
        written.append(path)
        logger.info(f"✓ Wrote {path}")
    return written
