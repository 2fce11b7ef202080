# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Runner defaults from .env files and environment variables.

Lookup order for a (section, key) pair:

    KEY            e.g. SEED
    SECTION_KEY    e.g. EXPERIMENT_SEED
    default

JSON experiment configs override these values, CLI flags override both.
Sections in use: Experiment, Runner, Quasi, Verdict, Logging.
"""

import logging
import os
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

T = TypeVar("T")

_loaded_from: Optional[Path] = None


def load_config(env_path: str = ".env") -> bool:
    """
    Load a .env file into the environment once; existing variables win.

    Returns:
        True if a file was loaded (now or by an earlier call)
    """
    global _loaded_from

    if _loaded_from is not None:
        return True

    env_file = Path(env_path)
    if not env_file.exists():
        logger.debug(f"No {env_path}; runner defaults come from the environment")
        return False

    load_dotenv(env_file, override=False)
    _loaded_from = env_file
    logger.info(f"✓ Loaded runner defaults from {env_path}")
    return True


def get_config(section: str, key: str, default: Any = None) -> Optional[str]:
    """Raw string value for section.key, or the default."""
    for name in (key.upper(), f"{section}_{key}".upper()):
        value = os.getenv(name)
        if value is not None:
            return value
    return default


def _typed(section: str, key: str, default: T, cast: Callable[[str], T]) -> T:
    value = get_config(section, key)
    if value is None:
        return default
    try:
        return cast(value)
    except (ValueError, TypeError):
        logger.warning(f"⚠ Ignoring {section}.{key}={value!r} (not a {cast.__name__}), using {default}")
        return default


def get_int_config(section: str, key: str, default: int = 0) -> int:
    return _typed(section, key, default, int)


def get_float_config(section: str, key: str, default: float = 0.0) -> float:
    return _typed(section, key, default, float)
