"""
Spectrum value type shared by the simulation, synthesis and fitting code
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.signal import find_peaks

from ..errors import GridOrderError

BOUND_SLACK = 1e-9
# A = 1 - R - T - S carries the rounding of three channels
BALANCE_SLACK = 1e-6


class Channel(Enum):
    """Physical meaning of the spectrum values"""

    REFLECTANCE = "R"
    TRANSMITTANCE = "T"
    ABSORBANCE = "A"
    SCATTERING = "S"
    RAW = "raw"

    @property
    def is_fraction(self) -> bool:
        return self is not Channel.RAW

    @property
    def slack(self) -> float:
        """How far a fraction may stray outside [0, 1]"""
        return BALANCE_SLACK if self is Channel.ABSORBANCE else BOUND_SLACK


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Real-valued signal on a strictly increasing energy grid (eV)"""

    energies: np.ndarray
    values: np.ndarray
    channel: Channel = Channel.RAW

    def __post_init__(self):
        energies = np.array(self.energies, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        if energies.shape != values.shape:
            raise ValueError(
                f"grid has {energies.size} points but values has {values.size}"
            )
        if energies.size > 1 and np.any(np.diff(energies) <= 0):
            raise GridOrderError("energy grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.channel.value} spectrum has non-finite values")
        if self.channel.is_fraction and values.size:
            slack = self.channel.slack
            if values.min() < -slack or values.max() > 1 + slack:
                raise ValueError(
                    f"{self.channel.value} spectrum leaves [0, 1]: "
                    f"[{values.min():.3g}, {values.max():.3g}]"
                )
        energies.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.energies.size)

    @property
    def step(self) -> float:
        """Median grid spacing"""
        if len(self) < 2:
            return 0.0
        return float(np.median(np.diff(self.energies)))

    def same_grid(self, other: "Spectrum") -> bool:
        return self.energies.shape == other.energies.shape and np.array_equal(
            self.energies, other.energies
        )

    def with_values(
        self, values: np.ndarray, channel: Optional[Channel] = None
    ) -> "Spectrum":
        return Spectrum(self.energies, values, channel or self.channel)

    def peak(self):
        """(energy, value) of the largest sample"""
        i = int(np.argmax(self.values))
        return float(self.energies[i]), float(self.values[i])


@dataclass(frozen=True)
class Extremum:
    """Refined local extremum of a sampled spectrum"""

    energy: float
    value: float
    prominence: float
    index: int


def refine_vertex(x: np.ndarray, y: np.ndarray, i: int) -> Tuple[float, float]:
    """
    Vertex of the parabola through samples i-1, i, i+1.

    Falls back to the sample itself at the grid edges or when the three
    points are collinear.
    """
    if i <= 0 or i >= len(x) - 1:
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    curvature = (d12 - d01) / (x2 - x0)
    if curvature == 0:
        return float(x1), float(y1)
    # Newton form y0 + d01 (x - x0) + curvature (x - x0)(x - x1)
    vertex = 0.5 * (x0 + x1) - d01 / (2 * curvature)
    vertex = min(max(vertex, x0), x2)
    value = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1)
    return float(vertex), float(value)


def locate_extrema(
    spectrum: Spectrum, minima: bool, rel_prominence: float
) -> List[Extremum]:
    """
    Local extrema whose prominence exceeds rel_prominence times the signal
    range, refined to sub-grid accuracy. Positive affine rescaling of the
    values leaves the result unchanged.
    """
    if len(spectrum) < 3:
        return []
    y = np.asarray(spectrum.values, dtype=float)
    span = float(y.max() - y.min())
    if span <= 0:
        return []
    signal = -y if minima else y
    indices, props = find_peaks(signal, prominence=rel_prominence * span)
    extrema = []
    for i, prominence in zip(indices, props["prominences"]):
        energy, value = refine_vertex(spectrum.energies, y, int(i))
        extrema.append(Extremum(energy, value, float(prominence), int(i)))
    return extrema


def energy_grid(min_ev: float, max_ev: float, step_ev: float) -> np.ndarray:
    """Inclusive uniform grid; endpoints land exactly on min and max"""
    count = int(round((max_ev - min_ev) / step_ev)) + 1
    return np.linspace(min_ev, max_ev, count)
