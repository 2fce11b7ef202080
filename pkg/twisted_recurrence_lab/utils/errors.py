# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Exception hierarchy shared by all lab modules."""

from typing import Any, Optional, Tuple


class LabError(Exception):
    """Base class for every error raised by the lab."""


class PrecisionError(LabError):
    """Working precision is too small for the requested orbit accuracy."""


class UnsupportedSystemError(LabError):
    """The operation needs an affine-rational system (or measure) it did not get."""


class BudgetExceededError(LabError):
    """An interval or pair enumeration would exceed its configured cap."""


class NonInvertibleCdfError(LabError):
    """The CDF is not strictly increasing, so its inverse is not unique."""


class DensityNormalizationError(LabError):
    """A measure density does not integrate to 1 over [0,1]."""


class RadiusSolveError(LabError):
    """No radius reproduces the requested ball mass at the given center."""


class MethodMismatchError(LabError):
    """Requested computation method is not available for the given inputs."""


class ConfigError(LabError):
    """An experiment config is malformed or names an unknown kind."""


class TwistCertificateError(LabError):
    """A twist piece failed its monotonicity or Lipschitz certificate."""

    def __init__(self, message: str, pair: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.pair = pair


class ExperimentStageError(LabError):
    """Wraps a failure inside run_experiment with the name of the stage."""

    def __init__(self, stage: str, cause: Any):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
