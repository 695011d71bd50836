"""
Enums and fixed tables shared by the configuration layer
"""

from enum import Enum
from typing import Dict

CONFIG_VERSION = 1


class SweepKind(Enum):
    """What a sweep varies from point to point"""

    DETUNING = "detuning"
    THICKNESS = "thickness"
    CONCENTRATION = "concentration"


class StackPreset(Enum):
    """Sample geometry built from the configured layers"""

    CAVITY = "cavity"
    BARE_FILM = "bare_film"


# Dye-to-host mass ratio of the spin-coated film and its molar concentration
MASS_RATIO_CONCENTRATION_MM: Dict[str, float] = {
    "1:10": 170.0,
    "1:20": 85.0,
    "1:30": 56.0,
    "1:50": 34.0,
    "1:100": 17.0,
}


def mass_ratio_to_concentration(ratio: str) -> float:
    """Concentration in mM for a dye:PVA mass ratio such as "1:30" """
    key = ratio.replace(" ", "")
    if key not in MASS_RATIO_CONCENTRATION_MM:
        known = ", ".join(MASS_RATIO_CONCENTRATION_MM)
        raise ValueError(f"unknown mass ratio {ratio!r} (known: {known})")
    return MASS_RATIO_CONCENTRATION_MM[key]
