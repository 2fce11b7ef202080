# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Utility modules for configuration, errors and deterministic sampling."""

from twisted_recurrence_lab.utils.config import (
    load_config,
    get_config,
    get_int_config,
    get_float_config,
)
from twisted_recurrence_lab.utils.sampling import (
    Batch,
    SeedStream,
    run_batches,
    uniform_dyadic,
)

__all__ = [
    'load_config',
    'get_config',
    'get_int_config',
    'get_float_config',
    'Batch',
    'SeedStream',
    'run_batches',
    'uniform_dyadic',
]
