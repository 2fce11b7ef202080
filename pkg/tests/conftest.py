#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Pytest configuration and fixtures for Twisted Recurrence Lab tests.
"""

import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

CONFIG_DIR = project_root / "configs"


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as full experiment runs"
    )
    config.addinivalue_line(
        "markers", "exact: marks tests checked against exact rational oracles"
    )
    config.addinivalue_line(
        "markers", "montecarlo: marks tests relying on seeded Monte Carlo estimates"
    )


@pytest.fixture
def lebesgue():
    from twisted_recurrence_lab.measures import LebesgueMeasure
    return LebesgueMeasure()


@pytest.fixture
def gauss_measure():
    from twisted_recurrence_lab.measures import GaussMeasure
    return GaussMeasure()


@pytest.fixture
def doubling():
    from twisted_recurrence_lab.dynamics import AffineMap
    return AffineMap.doubling()


@pytest.fixture
def tripling():
    from twisted_recurrence_lab.dynamics import AffineMap
    return AffineMap.tripling()


@pytest.fixture
def rotation():
    """Rational rotation by 1/201."""
    from twisted_recurrence_lab.dynamics import AffineMap
    return AffineMap.rotation(Fraction(1, 201))


@pytest.fixture
def identity_twist():
    from twisted_recurrence_lab.twists import identity
    return identity()


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep .env style overrides out of the tests."""
    for key in ("SEED", "SAMPLES", "HORIZON", "THREADS", "BATCH_SIZE", "OUT_DIR", "PAIR_BUDGET",
                "CE_THRESHOLD", "HIT_FRACTION_THRESHOLD", "EXPERIMENT_SEED", "EXPERIMENT_SAMPLES",
                "EXPERIMENT_HORIZON", "RUNNER_THREADS", "RUNNER_BATCH_SIZE", "RUNNER_OUT_DIR",
                "QUASI_PAIR_BUDGET", "VERDICT_CE_THRESHOLD", "VERDICT_HIT_FRACTION_THRESHOLD"):
        monkeypatch.delenv(key, raising=False)


@pytest.fixture(scope="session")
def doubling_decay():
    """Decay model fitted from exact doubling-map correlations, independent of any target."""
    from twisted_recurrence_lab.correlations import estimate_decay
    from twisted_recurrence_lab.dynamics import AffineMap
    from twisted_recurrence_lab.measures import LebesgueMeasure
    model, _ = estimate_decay(AffineMap.doubling(), LebesgueMeasure(), horizon=12)
    return model
