#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Run the trl command line from a source checkout without installing.

    python3 main.py run configs/zero_law.json --threads 4
    python3 main.py validate configs/divergence.json --strict
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from twisted_recurrence_lab.main import main  # noqa: E402

if __name__ == "__main__":
    main()
