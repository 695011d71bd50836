"""
Builds dielectric models and layer stacks from a validated run configuration
"""

from typing import List, Optional, Tuple

from ..optics.dielectric import ConstantModel, DielectricModel, DrudeModel, LorentzModel
from ..optics.stack import Layer, Stack
from ..polaritons.oscillator import CoupledOscillatorParams
from ..polaritons.scattering import ScatteringLaw
from .base import StackPreset
from .config import ConstantMaterial, DrudeMaterial, LorentzMaterial, RunConfig


class StackRegistry:
    """Resolves material names and assembles sample stacks"""

    @classmethod
    def build_model(
        cls,
        material,
        strength_per_mm: Optional[float] = None,
        concentration_mm: Optional[float] = None,
    ) -> DielectricModel:
        """
        Dielectric model for one material entry.

        Args:
            material: validated material section
            strength_per_mm: calibrated k replacing the configured one
            concentration_mm: concentration replacing the configured one

        Returns:
            ConstantModel, LorentzModel or DrudeModel
        """
        if isinstance(material, ConstantMaterial):
            return ConstantModel(complex(material.eps, material.eps_imag))
        if isinstance(material, DrudeMaterial):
            return DrudeModel(material.eps_inf, material.e_p, material.gamma)
        if isinstance(material, LorentzMaterial):
            if concentration_mm is not None and material.uses_concentration:
                k = material.strength_per_mm if strength_per_mm is None else strength_per_mm
                strength = k * concentration_mm
            else:
                strength = material.strength(strength_per_mm)
            return LorentzModel(material.eps_b, material.e_x, material.gamma_x, strength)
        raise TypeError(f"unsupported material {type(material).__name__}")

    @classmethod
    def cavity_layer(cls, config: RunConfig) -> int:
        """Index into config.stack.layers of the tunable cavity layer"""
        if config.stack.cavity_layer is not None:
            return config.stack.cavity_layer
        for index, layer in enumerate(config.stack.layers):
            if isinstance(config.material(layer.material), LorentzMaterial):
                return index
        return len(config.stack.layers) // 2

    @classmethod
    def cavity_index(
        cls, config: RunConfig, preset: StackPreset = StackPreset.CAVITY
    ) -> int:
        """Index of the cavity layer inside the built Stack (ambient is 0)"""
        if preset is StackPreset.BARE_FILM:
            return 1
        return cls.cavity_layer(config) + 1

    @classmethod
    def _interior(
        cls,
        config: RunConfig,
        strength_per_mm: Optional[float],
        concentration_mm: Optional[float],
    ) -> List[Tuple[DielectricModel, float, str]]:
        return [
            (
                cls.build_model(
                    config.material(layer.material), strength_per_mm, concentration_mm
                ),
                layer.thickness_nm,
                layer.name or layer.material,
            )
            for layer in config.stack.layers
        ]

    @classmethod
    def build_stack(
        cls,
        config: RunConfig,
        strength_per_mm: Optional[float] = None,
        concentration_mm: Optional[float] = None,
        cavity_thickness_nm: Optional[float] = None,
        preset: Optional[StackPreset] = None,
    ) -> Stack:
        """
        Assemble the sample stack.

        The bare-film preset drops every layer in front of the cavity layer,
        leaving the dye film on the back mirror as on the uncovered half of a
        sample.
        """
        preset = preset or config.stack.preset
        interior = cls._interior(config, strength_per_mm, concentration_mm)
        cavity = cls.cavity_layer(config)
        if cavity_thickness_nm is not None:
            model, _, name = interior[cavity]
            interior[cavity] = (model, cavity_thickness_nm, name)
        if preset is StackPreset.BARE_FILM:
            interior = interior[cavity:]
        ambient = cls.build_model(config.material(config.stack.ambient))
        substrate = cls.build_model(config.material(config.stack.substrate))
        layers = [Layer.bounding(ambient, config.stack.ambient)]
        layers += [Layer(model=m, thickness_nm=d, name=n) for m, d, n in interior]
        layers.append(Layer.bounding(substrate, config.stack.substrate))
        return Stack(tuple(layers))

    @classmethod
    def dye_concentration(cls, config: RunConfig) -> Optional[float]:
        """Configured concentration of the cavity dye layer, if any"""
        cavity = config.stack.layers[cls.cavity_layer(config)]
        material = config.material(cavity.material)
        if isinstance(material, LorentzMaterial):
            return material.concentration
        return None

    @classmethod
    def oscillator_params(
        cls, config: RunConfig, detuning: float, coupling: Optional[float] = None
    ) -> CoupledOscillatorParams:
        osc = config.oscillator
        return CoupledOscillatorParams(
            e_c=osc.e_x + detuning,
            e_x=osc.e_x,
            coupling=osc.coupling if coupling is None else coupling,
            gamma_c=osc.gamma_c,
            gamma_x=osc.gamma_x,
        )

    @classmethod
    def scattering_law(cls, config: RunConfig) -> ScatteringLaw:
        s = config.scattering
        return ScatteringLaw(
            total=s.total,
            slope=s.slope,
            offset_upper=s.offset_upper,
            offset_lower=s.offset_lower,
            width=s.width,
            skew_upper=s.skew_upper,
            skew_lower=s.skew_lower,
            noise_floor=s.noise_floor,
        )
