"""
Run configuration: schema, parsing and stack assembly
"""

from .base import (
    CONFIG_VERSION,
    MASS_RATIO_CONCENTRATION_MM,
    StackPreset,
    SweepKind,
    mass_ratio_to_concentration,
)
from .config import RunConfig, apply_overrides, load_config, parse_config
from .registry import StackRegistry

__all__ = [
    "CONFIG_VERSION",
    "MASS_RATIO_CONCENTRATION_MM",
    "RunConfig",
    "StackPreset",
    "StackRegistry",
    "SweepKind",
    "apply_overrides",
    "load_config",
    "mass_ratio_to_concentration",
    "parse_config",
]
