# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Experiment configuration.

A JSON document names the system, measure, schedule and twist by kind and
carries the run parameters. Parameters missing from the document fall back
to environment / .env values, then to built-in defaults.

Example:

    {
      "name": "zero_law",
      "system": {"kind": "doubling"},
      "measure": {"kind": "lebesgue"},
      "schedule": {"kind": "power", "c": "0.1", "a": 2},
      "twist": {"kind": "identity"},
      "horizon": 40,
      "samples": 10000,
      "seed": 7
    }
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from twisted_recurrence_lab.correlations.decay import DECAY_PROBE, DEFAULT_SAMPLES, EXACT as CORR_EXACT
from twisted_recurrence_lab.correlations.decay import MONTE_CARLO as CORR_MONTE_CARLO
from twisted_recurrence_lab.dynamics.affine import AffineMap
from twisted_recurrence_lab.dynamics.base import IntervalMap
from twisted_recurrence_lab.dynamics.gauss_map import GaussMap
from twisted_recurrence_lab.dynamics.liouville import LiouvilleRotation, build_liouville_rotation, rotation_from_cf
from twisted_recurrence_lab.measures.base import MeasureModel
from twisted_recurrence_lab.measures.gauss import GaussMeasure
from twisted_recurrence_lab.measures.lebesgue import LebesgueMeasure
from twisted_recurrence_lab.measures.tabulated import TabulatedMeasure
from twisted_recurrence_lab.recurrence.bands import AT_FX, RADIUS_MODES
from twisted_recurrence_lab.recurrence.masses import DEFAULT_PAIR_WINDOW_BUDGET
from twisted_recurrence_lab.recurrence.quasi import AUTO, DEFAULT_PAIR_BUDGET, QUASI_METHODS
from twisted_recurrence_lab.targets.schedules import (
    KIND_CONSTANT,
    KIND_HARMONIC_LOG,
    KIND_LIST,
    KIND_POWER,
    KIND_PSI,
    PsiForm,
    TargetSchedule,
    exact,
)
from twisted_recurrence_lab.twists import catalog
from twisted_recurrence_lab.twists.base import TwistSpec
from twisted_recurrence_lab.utils.config import get_config, get_float_config, get_int_config
from twisted_recurrence_lab.utils.errors import ConfigError

logger = logging.getLogger(__name__)

SYSTEM_KINDS = ("doubling", "tripling", "beta-int", "gauss", "rotation")
MEASURE_KINDS = ("lebesgue", "gauss", "cdf-table")
TWIST_KINDS = ("identity", "constant", "affine", "tent", "pw-affine")

DEFAULT_HORIZON = 40
DEFAULT_SAMPLES_PER_RUN = 10_000
DEFAULT_DECAY_HORIZON = 12

# keys that never change results
_HASH_EXCLUDED = ("threads", "out_dir")


@dataclass(frozen=True)
class DecaySettings:
    """How the decay model is estimated before the recurrence stages."""

    horizon: int = DEFAULT_DECAY_HORIZON
    method: Optional[str] = None
    samples: int = DEFAULT_SAMPLES
    probe: Tuple[Fraction, Fraction] = DECAY_PROBE
    gamma_max: float = 0.9
    r2_min: float = 0.8


@dataclass(frozen=True)
class VerdictThresholds:
    """Finite-horizon evidence cutoffs; all overridable per config."""

    ce_threshold: float = 0.9
    ce_ratio: float = 0.9
    min_hits: int = 5
    hit_fraction_threshold: float = 0.95
    hit_fraction_slack: float = 0.05
    tail_fraction: float = 0.75
    tail_sigmas: float = 3.0
    mean_tail_sigmas: float = 4.0
    control_fraction: float = 0.99


@dataclass(frozen=True)
class QuasiSettings:
    method: str = AUTO
    pair_budget: int = DEFAULT_PAIR_BUDGET
    window_budget: int = DEFAULT_PAIR_WINDOW_BUDGET
    samples: Optional[int] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment config; component sections stay as JSON mappings and are built on demand."""

    name: str
    system: Dict[str, Any]
    measure: Dict[str, Any]
    schedule: Dict[str, Any]
    twist: Dict[str, Any]
    horizon: int = DEFAULT_HORIZON
    n_grid: Tuple[int, ...] = ()
    samples: int = DEFAULT_SAMPLES_PER_RUN
    seed: int = 0
    radius_mode: str = AT_FX
    threads: int = 1
    batch_size: int = 1024
    out_dir: str = "results"
    decay: DecaySettings = field(default_factory=DecaySettings)
    quasi: QuasiSettings = field(default_factory=QuasiSettings)
    verdict: VerdictThresholds = field(default_factory=VerdictThresholds)
    mc_tolerance: Optional[float] = None

    # Builders

    def build_system(self) -> IntervalMap:
        return build_system(self.system)

    def build_measure(self) -> MeasureModel:
        return build_measure(self.measure)

    def build_schedule(self, measure: Optional[MeasureModel] = None) -> TargetSchedule:
        return build_schedule(self.schedule, measure)

    def build_twist(self) -> TwistSpec:
        return build_twist(self.twist)

    def liouville(self) -> Optional[LiouvilleRotation]:
        """The continued-fraction construction behind a Liouville rotation, if any."""
        spec = self.system.get("liouville")
        if self.system.get("kind") != "rotation" or spec is None:
            return None
        return _build_liouville(spec)

    @property
    def grid(self) -> List[int]:
        """N-grid for quasi-independence reports; the horizon alone when none is given."""
        return sorted(set(self.n_grid)) if self.n_grid else [self.horizon]

    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "system": self.system,
            "measure": self.measure,
            "schedule": self.schedule,
            "twist": self.twist,
            "horizon": self.horizon,
            "n_grid": list(self.n_grid),
            "samples": self.samples,
            "seed": self.seed,
            "radius_mode": self.radius_mode,
            "threads": self.threads,
            "batch_size": self.batch_size,
            "out_dir": self.out_dir,
            "decay": {
                "horizon": self.decay.horizon,
                "method": self.decay.method,
                "samples": self.decay.samples,
                "probe": [str(v) for v in self.decay.probe],
                "gamma_max": self.decay.gamma_max,
                "r2_min": self.decay.r2_min,
            },
            "quasi": {
                "method": self.quasi.method,
                "pair_budget": self.quasi.pair_budget,
                "window_budget": self.quasi.window_budget,
                "samples": self.quasi.samples,
            },
            "verdict": dict(vars(self.verdict)),
            "mc_tolerance": self.mc_tolerance,
        }

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form, ignoring scheduling-only keys."""
        data = {k: v for k, v in self.to_dict().items() if k not in _HASH_EXCLUDED}
        payload = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Copy with CLI overrides applied; None values are ignored."""
        values = {k: v for k, v in overrides.items() if v is not None}
        if not values:
            return self
        updated = replace(self, **values)
        _validate(updated)
        return updated


# Component builders


def _require(spec: Mapping[str, Any], key: str, section: str):
    if key not in spec:
        raise ConfigError(f"{section}: missing required key '{key}'")
    return spec[key]


def _kind(spec: Mapping[str, Any], section: str, kinds: Tuple[str, ...]) -> str:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{section}: expected an object, got {type(spec).__name__}")
    kind = _require(spec, "kind", section)
    if kind not in kinds:
        raise ConfigError(f"{section}.kind: unknown kind '{kind}' (expected one of {', '.join(kinds)})")
    return kind


def _build_psi(spec: Mapping[str, Any]) -> PsiForm:
    try:
        return PsiForm(
            form=spec.get("form", "power"),
            c=exact(_require(spec, "c", "psi")),
            a=exact(spec.get("a", 1)),
            base=exact(spec.get("base", 2)),
        )
    except ValueError as e:
        raise ConfigError(f"psi: {e}") from e


def _build_liouville(spec: Mapping[str, Any]) -> LiouvilleRotation:
    psi = _build_psi(_require(spec, "psi", "system.liouville"))
    depth = int(spec.get("depth", 2))
    kwargs = {"max_bits": int(spec["max_bits"])} if "max_bits" in spec else {}
    return build_liouville_rotation(psi, depth, **kwargs)


def build_system(spec: Mapping[str, Any]) -> IntervalMap:
    """
    Build an interval map from its config section.

    Raises:
        ConfigError: unknown kind or missing parameter
    """
    kind = _kind(spec, "system", SYSTEM_KINDS)
    try:
        if kind == "doubling":
            return AffineMap.doubling()
        if kind == "tripling":
            return AffineMap.tripling()
        if kind == "beta-int":
            return AffineMap.beta_int(int(_require(spec, "k", "system")))
        if kind == "gauss":
            return GaussMap()

        if "alpha" in spec:
            alpha = exact(spec["alpha"])
        elif "partial_quotients" in spec:
            alpha = rotation_from_cf([int(a) for a in spec["partial_quotients"]])
        elif "liouville" in spec:
            alpha = _build_liouville(spec["liouville"]).alpha
        else:
            raise ConfigError("system: rotation needs 'alpha', 'partial_quotients' or 'liouville'")
        return AffineMap.rotation(alpha)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"system: {e}") from e


def build_measure(spec: Mapping[str, Any]) -> MeasureModel:
    """
    Build a measure; an optional 'regularity': [c, s] overrides the declared constants.

    Raises:
        ConfigError: unknown kind, missing table path
    """
    kind = _kind(spec, "measure", MEASURE_KINDS)
    if kind == "lebesgue":
        measure = LebesgueMeasure()
    elif kind == "gauss":
        measure = GaussMeasure()
    else:
        path = _require(spec, "path", "measure")
        if not Path(path).exists():
            raise ConfigError(f"measure: cdf table '{path}' not found")
        measure = TabulatedMeasure.from_csv(path)

    if "regularity" in spec:
        regularity = spec["regularity"]
        if regularity is None:
            measure.regularity = None
        else:
            c, s = (float(v) for v in regularity)
            if c <= 0 or s <= 0:
                raise ConfigError(f"measure.regularity: c and s must be positive, got {regularity}")
            measure.regularity = (c, s)
    return measure


def build_schedule(spec: Mapping[str, Any], measure: Optional[MeasureModel] = None) -> TargetSchedule:
    """
    Build a target schedule; numeric parameters are read exactly from their decimal form.

    Raises:
        ConfigError: unknown kind or missing parameter
    """
    kind = _kind(spec, "schedule", (KIND_POWER, KIND_HARMONIC_LOG, KIND_CONSTANT, KIND_PSI, KIND_LIST))
    cap = spec.get("cap")
    try:
        if kind == KIND_POWER:
            return TargetSchedule.power(_require(spec, "c", "schedule"), _require(spec, "a", "schedule"), cap)
        if kind == KIND_HARMONIC_LOG:
            return TargetSchedule.harmonic_log(_require(spec, "c", "schedule"), spec.get("b", 0), cap)
        if kind == KIND_CONSTANT:
            return TargetSchedule.constant(_require(spec, "c", "schedule"), cap)
        if kind == KIND_PSI:
            return TargetSchedule.from_psi(_build_psi(_require(spec, "psi", "schedule")), measure, cap)
        return TargetSchedule.from_list(_require(spec, "values", "schedule"), cap)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"schedule: {e}") from e


def build_twist(spec: Mapping[str, Any]) -> TwistSpec:
    """
    Build a twist from the catalog.

    Raises:
        ConfigError: unknown kind or missing parameter
    """
    kind = _kind(spec, "twist", TWIST_KINDS)
    try:
        if kind == "identity":
            return catalog.identity()
        if kind == "constant":
            return catalog.constant(_require(spec, "y", "twist"))
        if kind == "affine":
            return catalog.affine(_require(spec, "alpha", "twist"), _require(spec, "beta", "twist"))
        if kind == "tent":
            return catalog.tent(spec.get("center", "1/2"), spec.get("slope", 1), spec.get("peak", 0))
        if "knots" in spec:
            return catalog.pw_affine_knots(spec["knots"])
        return catalog.pw_affine_pieces(_require(spec, "pieces", "twist"))
    except (ValueError, TypeError, KeyError) as e:
        raise ConfigError(f"twist: {e}") from e


# Loading


def _validate(config: ExperimentConfig) -> None:
    if config.horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {config.horizon}")
    if config.samples < 1:
        raise ConfigError(f"samples must be >= 1, got {config.samples}")
    if config.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {config.threads}")
    if config.batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {config.batch_size}")
    if config.radius_mode not in RADIUS_MODES:
        raise ConfigError(f"radius_mode: unknown mode '{config.radius_mode}'")
    if any(n < 1 for n in config.n_grid):
        raise ConfigError(f"n_grid entries must be >= 1, got {list(config.n_grid)}")
    if config.quasi.method not in QUASI_METHODS:
        raise ConfigError(f"quasi.method: unknown method '{config.quasi.method}'")
    if config.decay.method not in (None, CORR_EXACT, CORR_MONTE_CARLO):
        raise ConfigError(f"decay.method: unknown method '{config.decay.method}'")


def _decay_settings(spec: Mapping[str, Any]) -> DecaySettings:
    defaults = DecaySettings()
    probe = spec.get("probe")
    return DecaySettings(
        horizon=int(spec.get("horizon", defaults.horizon)),
        method=spec.get("method"),
        samples=int(spec.get("samples", defaults.samples)),
        probe=tuple(exact(v) for v in probe) if probe else defaults.probe,
        gamma_max=float(spec.get("gamma_max", defaults.gamma_max)),
        r2_min=float(spec.get("r2_min", defaults.r2_min)),
    )


def _verdict_thresholds(spec: Mapping[str, Any]) -> VerdictThresholds:
    defaults = VerdictThresholds()
    unknown = set(spec) - set(vars(defaults))
    if unknown:
        raise ConfigError(f"verdict: unknown keys {sorted(unknown)}")
    values = {
        "ce_threshold": get_float_config("Verdict", "ce_threshold", defaults.ce_threshold),
        "hit_fraction_threshold": get_float_config(
            "Verdict", "hit_fraction_threshold", defaults.hit_fraction_threshold
        ),
    }
    values.update(spec)
    return replace(defaults, **values)


def _quasi_settings(spec: Mapping[str, Any]) -> QuasiSettings:
    samples = spec.get("samples")
    return QuasiSettings(
        method=spec.get("method", AUTO),
        pair_budget=int(spec.get("pair_budget", get_int_config("Quasi", "pair_budget", DEFAULT_PAIR_BUDGET))),
        window_budget=int(spec.get("window_budget", DEFAULT_PAIR_WINDOW_BUDGET)),
        samples=int(samples) if samples is not None else None,
    )


def config_from_dict(data: Mapping[str, Any], name: Optional[str] = None) -> ExperimentConfig:
    """
    Parse a config mapping.

    Every component is built once here so bad kinds fail at load time.

    Raises:
        ConfigError: malformed section, unknown kind or out-of-range value
    """
    if not isinstance(data, Mapping):
        raise ConfigError("experiment config must be a JSON object")

    sections = {}
    for section in ("system", "measure", "schedule", "twist"):
        sections[section] = dict(_require(data, section, "config"))

    tolerance = data.get("mc_tolerance")
    try:
        config = ExperimentConfig(
            name=str(data.get("name", name or "experiment")),
            horizon=int(data.get("horizon", get_int_config("Experiment", "horizon", DEFAULT_HORIZON))),
            n_grid=tuple(int(n) for n in data.get("n_grid", ())),
            samples=int(data.get("samples", get_int_config("Experiment", "samples", DEFAULT_SAMPLES_PER_RUN))),
            seed=int(data.get("seed", get_int_config("Experiment", "seed", 0))),
            radius_mode=str(data.get("radius_mode", AT_FX)),
            threads=int(data.get("threads", get_int_config("Runner", "threads", 1))),
            batch_size=int(data.get("batch_size", get_int_config("Runner", "batch_size", 1024))),
            out_dir=str(data.get("out_dir", get_config("Runner", "out_dir", "results"))),
            decay=_decay_settings(data.get("decay", {})),
            quasi=_quasi_settings(data.get("quasi", {})),
            verdict=_verdict_thresholds(data.get("verdict", {})),
            mc_tolerance=float(tolerance) if tolerance is not None else None,
            **sections,
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"config: {e}") from e

    _validate(config)
    measure = config.build_measure()
    config.build_system()
    config.build_schedule(measure)
    config.build_twist()
    return config


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load an experiment config from a JSON file.

    Raises:
        ConfigError: file missing, not JSON, or invalid
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    config = config_from_dict(data, name=path.stem)
    logger.info(f"✓ Loaded experiment '{config.name}' from {path}")
    return config
