"""
Dielectric-function models evaluated on an energy grid (eV)
"""

import cmath
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

import numpy as np

from ..errors import InvalidModelError

EnergyLike = Union[float, np.ndarray]


class ModelKind(Enum):
    """Variant tag of a dielectric model"""

    CONSTANT = "constant"
    LORENTZ = "lorentz"
    DRUDE = "drude"


def _require_finite(model_name: str, **values) -> None:
    for name, value in values.items():
        if not cmath.isfinite(complex(value)):
            raise InvalidModelError(f"{model_name}: {name} must be finite, got {value}")


@dataclass(frozen=True)
class ConstantModel:
    """Non-dispersive medium, eps(E) = eps_b"""

    eps_b: complex = 1.0

    kind = ModelKind.CONSTANT

    def __post_init__(self):
        _require_finite("constant", eps_b=self.eps_b)
        if complex(self.eps_b).imag < 0:
            raise InvalidModelError("constant: Im eps_b must be >= 0 (passive medium)")

    def epsilon(self, energy: np.ndarray) -> np.ndarray:
        return np.full(np.shape(energy), complex(self.eps_b), dtype=complex)


@dataclass(frozen=True)
class LorentzModel:
    """
    Single Lorentz oscillator on a constant background.

    Attributes:
        eps_b: background dielectric constant
        e_x: resonance energy (eV)
        gamma_x: FWHM linewidth (eV)
        strength: oscillator strength f (eV^2), proportional to concentration
    """

    eps_b: float
    e_x: float
    gamma_x: float
    strength: float

    kind = ModelKind.LORENTZ

    def __post_init__(self):
        _require_finite(
            "lorentz",
            eps_b=self.eps_b,
            e_x=self.e_x,
            gamma_x=self.gamma_x,
            strength=self.strength,
        )
        if self.e_x <= 0:
            raise InvalidModelError("lorentz: e_x must be > 0")
        if self.gamma_x <= 0:
            raise InvalidModelError("lorentz: gamma_x must be > 0")
        if self.strength < 0:
            raise InvalidModelError("lorentz: strength must be >= 0")

    @classmethod
    def from_concentration(
        cls,
        eps_b: float,
        e_x: float,
        gamma_x: float,
        concentration_mm: float,
        strength_per_mm: float,
    ) -> "LorentzModel":
        """Build a dye layer with f = k * c"""
        return cls(eps_b, e_x, gamma_x, strength_per_mm * concentration_mm)

    def epsilon(self, energy: np.ndarray) -> np.ndarray:
        return self.eps_b + self.strength / (
            self.e_x**2 - energy**2 - 1j * self.gamma_x * energy
        )

    def with_strength(self, strength: float) -> "LorentzModel":
        return replace(self, strength=strength)

    def undoped(self) -> ConstantModel:
        """Same host without dye molecules"""
        return ConstantModel(self.eps_b)


@dataclass(frozen=True)
class DrudeModel:
    """Free-electron metal, eps(E) = eps_inf - E_p^2 / (E^2 + i Gamma E)"""

    eps_inf: float = 4.0
    e_p: float = 9.0
    gamma: float = 0.07

    kind = ModelKind.DRUDE

    def __post_init__(self):
        _require_finite("drude", eps_inf=self.eps_inf, e_p=self.e_p, gamma=self.gamma)
        if self.e_p <= 0:
            raise InvalidModelError("drude: e_p must be > 0")
        if self.gamma <= 0:
            raise InvalidModelError("drude: gamma must be > 0")

    def epsilon(self, energy: np.ndarray) -> np.ndarray:
        return self.eps_inf - self.e_p**2 / (energy**2 + 1j * self.gamma * energy)


DielectricModel = Union[ConstantModel, LorentzModel, DrudeModel]

SILVER = DrudeModel(eps_inf=4.0, e_p=9.0, gamma=0.07)


def _as_energy_array(energy: EnergyLike) -> np.ndarray:
    e = np.asarray(energy, dtype=float)
    if not np.all(np.isfinite(e)):
        raise ValueError("energy must be finite")
    if np.any(e <= 0):
        raise ValueError("energy must be > 0 eV")
    return e


def _unwrap(values: np.ndarray, energy: EnergyLike):
    if np.ndim(energy) == 0:
        return complex(values)
    return values


def eval_epsilon(model: DielectricModel, energy: EnergyLike):
    """
    Evaluate the complex dielectric function.

    Args:
        model: dielectric model
        energy: photon energy in eV, scalar or array (> 0)

    Returns:
        complex scalar for scalar input, complex array otherwise
    """
    e = _as_energy_array(energy)
    return _unwrap(np.asarray(model.epsilon(e), dtype=complex), energy)


def refractive_index_from_epsilon(eps):
    """Principal square root, branch chosen so that Im n >= 0"""
    n = np.sqrt(np.asarray(eps, dtype=complex))
    n = np.where(n.imag < 0, -n, n)
    if np.ndim(eps) == 0:
        return complex(n)
    return n


def refractive_index(model: DielectricModel, energy: EnergyLike):
    """Complex refractive index n = sqrt(eps) with Im n >= 0"""
    return refractive_index_from_epsilon(eval_epsilon(model, energy))


def describe(model: DielectricModel) -> str:
    """Short human-readable summary used by reports"""
    if isinstance(model, LorentzModel):
        return (
            f"lorentz(eps_b={model.eps_b:g}, e_x={model.e_x:g} eV, "
            f"gamma_x={model.gamma_x:g} eV, f={model.strength:.4g} eV^2)"
        )
    if isinstance(model, DrudeModel):
        return (
            f"drude(eps_inf={model.eps_inf:g}, e_p={model.e_p:g} eV, "
            f"gamma={model.gamma:g} eV)"
        )
    eps = complex(model.eps_b)
    if eps.imag == 0:
        return f"constant(eps={eps.real:g})"
    return f"constant(eps={eps})"
