"""
Run configuration schema, parsing and dotted-path overrides
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ..errors import ConfigSchemaError, SpectrumIOError
from .base import CONFIG_VERSION, StackPreset, SweepKind, mass_ratio_to_concentration

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConstantMaterial(_Section):
    """Non-dispersive medium"""

    model: Literal["constant"]
    eps: float = Field(default=1.0, description="Real part of the dielectric constant")
    eps_imag: float = Field(default=0.0, ge=0, description="Imaginary part (absorption)")


class LorentzMaterial(_Section):
    """Host with a single excitonic Lorentz line; f = k * c unless given"""

    model: Literal["lorentz"]
    eps_b: float = Field(default=2.2, description="Background dielectric constant")
    e_x: float = Field(default=2.11, gt=0, description="Exciton energy (eV)")
    gamma_x: float = Field(default=0.040, gt=0, description="Exciton FWHM (eV)")
    oscillator_strength: Optional[float] = Field(
        default=None, ge=0, description="Explicit oscillator strength f (eV^2)"
    )
    concentration_mm: Optional[float] = Field(
        default=None, ge=0, description="Dye concentration (mM)"
    )
    mass_ratio: Optional[str] = Field(
        default=None, description="Dye:PVA mass ratio, e.g. '1:30'"
    )
    strength_per_mm: float = Field(
        default=9.0e-4, gt=0, description="Oscillator strength per mM (eV^2/mM)"
    )

    @model_validator(mode="after")
    def _one_strength_source(self) -> "LorentzMaterial":
        sources = [
            self.oscillator_strength is not None,
            self.concentration_mm is not None,
            self.mass_ratio is not None,
        ]
        if sum(sources) > 1:
            raise ValueError(
                "give only one of oscillator_strength, concentration_mm, mass_ratio"
            )
        if self.mass_ratio is not None:
            mass_ratio_to_concentration(self.mass_ratio)
        return self

    @property
    def concentration(self) -> Optional[float]:
        if self.mass_ratio is not None:
            return mass_ratio_to_concentration(self.mass_ratio)
        return self.concentration_mm

    @property
    def uses_concentration(self) -> bool:
        return self.oscillator_strength is None

    def strength(self, strength_per_mm: Optional[float] = None) -> float:
        """Oscillator strength, optionally with a calibrated k"""
        if self.oscillator_strength is not None:
            return self.oscillator_strength
        k = self.strength_per_mm if strength_per_mm is None else strength_per_mm
        return k * (self.concentration or 0.0)


class DrudeMaterial(_Section):
    """Free-electron metal"""

    model: Literal["drude"]
    eps_inf: float = 4.0
    e_p: float = Field(default=9.0, gt=0, description="Plasma energy (eV)")
    gamma: float = Field(default=0.07, gt=0, description="Damping (eV)")


Material = Annotated[
    Union[ConstantMaterial, LorentzMaterial, DrudeMaterial],
    Field(discriminator="model"),
]


def default_materials() -> Dict[str, Dict[str, Any]]:
    return {
        "air": {"model": "constant", "eps": 1.0},
        "glass": {"model": "constant", "eps": 2.25},
        "pva": {"model": "constant", "eps": 2.2},
        "silver": {"model": "drude", "eps_inf": 4.0, "e_p": 9.0, "gamma": 0.07},
        "pva_tdbc": {
            "model": "lorentz",
            "eps_b": 2.2,
            "e_x": 2.11,
            "gamma_x": 0.040,
            "concentration_mm": 56.0,
        },
    }


class LayerConfig(_Section):
    material: str
    thickness_nm: float = Field(ge=0, description="Layer thickness (nm)")
    name: str = ""


def default_layers() -> List[LayerConfig]:
    return [
        LayerConfig(material="silver", thickness_nm=35.0, name="top mirror"),
        LayerConfig(material="pva_tdbc", thickness_nm=135.0, name="dye layer"),
        LayerConfig(material="silver", thickness_nm=120.0, name="bottom mirror"),
    ]


class StackConfig(_Section):
    """Ambient first; light enters through the first listed layer"""

    ambient: str = "air"
    substrate: str = "glass"
    layers: List[LayerConfig] = Field(default_factory=default_layers, min_length=1)
    cavity_layer: Optional[int] = Field(
        default=None, ge=0, description="Index into layers of the tunable cavity layer"
    )
    preset: StackPreset = StackPreset.CAVITY
    tune_thickness: bool = Field(
        default=True, description="Retune the cavity layer so E_c matches E_x"
    )


class GridConfig(_Section):
    min_ev: float = Field(default=1.8, gt=0)
    max_ev: float = Field(default=2.4, gt=0)
    step_ev: float = Field(default=0.001, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "GridConfig":
        if self.max_ev <= self.min_ev:
            raise ValueError("max_ev must exceed min_ev")
        return self


class OscillatorConfig(_Section):
    e_x: float = Field(default=2.11, gt=0)
    coupling: float = Field(default=0.075, ge=0, description="Coupling V (eV)")
    gamma_c: float = Field(default=0.060, ge=0)
    gamma_x: float = Field(default=0.040, ge=0)


class CalibrationConfig(_Section):
    """Fix k so the reference concentration shows the target splitting"""

    enabled: bool = True
    concentration_mm: float = Field(default=56.0, gt=0)
    target_splitting_ev: float = Field(default=0.140, gt=0)


def default_detunings() -> List[float]:
    return [-0.10, -0.075, -0.05, -0.025, 0.0, 0.025, 0.05, 0.075, 0.10]


class SweepConfig(_Section):
    kind: SweepKind = SweepKind.DETUNING
    detunings_ev: List[float] = Field(default_factory=default_detunings)
    thicknesses_nm: List[float] = Field(default_factory=list)
    concentrations_mm: List[float] = Field(
        default_factory=lambda: [17.0, 34.0, 56.0, 85.0, 170.0]
    )

    @field_validator("thicknesses_nm", "concentrations_mm")
    @classmethod
    def _non_negative(cls, values: List[float]) -> List[float]:
        if any(v < 0 for v in values):
            raise ValueError("values must be >= 0")
        return values

    def points(self) -> List[float]:
        return {
            SweepKind.DETUNING: self.detunings_ev,
            SweepKind.THICKNESS: self.thicknesses_nm,
            SweepKind.CONCENTRATION: self.concentrations_mm,
        }[self.kind]


class ScatteringConfig(_Section):
    total: float = Field(default=0.25, ge=0, le=1)
    slope: float = 1.0
    offset_upper: float = 0.0
    offset_lower: float = 0.0
    width: float = Field(default=0.040, gt=0)
    skew_upper: float = 0.0
    skew_lower: float = 0.0
    noise_floor: float = Field(default=0.03, ge=0, le=0.05)
    bare_film_efficiency: float = Field(default=0.18, ge=0, le=1)


class FitConfig(_Section):
    max_iterations: int = Field(default=500, ge=1)
    free_cavity: Optional[bool] = None
    extraction: Literal["dips", "peaks"] = "dips"


class RunConfig(_Section):
    """Validated run description; {"version": 1} is complete"""

    version: Literal[1]
    seed: int = Field(default=0, ge=0)
    materials: Dict[str, Material] = Field(default_factory=dict)
    stack: StackConfig = Field(default_factory=StackConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    oscillator: OscillatorConfig = Field(default_factory=OscillatorConfig)
    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    scattering: ScatteringConfig = Field(default_factory=ScatteringConfig)
    fit: FitConfig = Field(default_factory=FitConfig)

    @field_validator("materials", mode="before")
    @classmethod
    def _merge_default_materials(cls, value: Any) -> Any:
        if not isinstance(value, dict):
            return value
        merged = default_materials()
        merged.update(value)
        return merged

    @model_validator(mode="before")
    @classmethod
    def _ensure_materials(cls, data: Any) -> Any:
        if isinstance(data, dict) and "materials" not in data:
            data = dict(data, materials={})
        return data

    @model_validator(mode="after")
    def _references_resolve(self) -> "RunConfig":
        names = [self.stack.ambient, self.stack.substrate]
        names += [layer.material for layer in self.stack.layers]
        missing = sorted({n for n in names if n not in self.materials})
        if missing:
            raise ValueError(f"unknown material(s): {', '.join(missing)}")
        for bound in (self.stack.ambient, self.stack.substrate):
            if isinstance(self.materials[bound], LorentzMaterial):
                raise ValueError(f"bounding medium {bound!r} cannot be a dye layer")
        index = self.stack.cavity_layer
        if index is not None and index >= len(self.stack.layers):
            raise ValueError(
                f"cavity_layer {index} outside {len(self.stack.layers)} layers"
            )
        return self

    def material(self, name: str):
        return self.materials[name]


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _set_path(document: Any, path: List[str], value: Any, full: str) -> None:
    node = document
    for depth, key in enumerate(path):
        last = depth == len(path) - 1
        if isinstance(node, list):
            try:
                index = int(key)
                if last:
                    node[index] = value
                    return
                node = node[index]
            except (ValueError, IndexError):
                raise ConfigSchemaError(f"--set {full}: bad list index {key!r}")
        elif isinstance(node, dict):
            if last:
                node[key] = value
                return
            if key not in node:
                node[key] = {}
            node = node[key]
        else:
            raise ConfigSchemaError(f"--set {full}: {key!r} is not a section")


def apply_overrides(document: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    """
    Apply key=value overrides with dotted paths.

    List items are addressed by index (stack.layers.0.thickness_nm=30).
    Values are parsed as JSON when possible, otherwise kept as strings.
    """
    document = json.loads(json.dumps(document))
    for item in overrides or []:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigSchemaError(f"--set expects key=value, got {item!r}")
        path = [part for part in key.strip().split(".") if part]
        _set_path(document, path, _parse_value(raw.strip()), key)
        logger.debug("override %s = %s", key, raw)
    return document


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for problem in error.errors():
        location = ".".join(str(part) for part in problem["loc"]) or "(root)"
        lines.append(f"{location}: {problem['msg']}")
    return "\n".join(lines)


def parse_config(text: str, overrides: Optional[List[str]] = None) -> RunConfig:
    """
    Parse and validate a JSON run configuration.

    Args:
        text: JSON document
        overrides: key=value strings applied before validation

    Returns:
        Fully validated RunConfig

    Raises:
        ConfigSchemaError: malformed JSON, unknown keys, bad values
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSchemaError(f"config is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise ConfigSchemaError("config must be a JSON object")
    document = apply_overrides(document, overrides or [])
    if document.get("version") not in (None, CONFIG_VERSION):
        raise ConfigSchemaError(
            f"unsupported config version {document.get('version')!r}, "
            f"expected {CONFIG_VERSION}"
        )
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigSchemaError(_format_validation_error(e))


def load_config(path: Path, overrides: Optional[List[str]] = None) -> RunConfig:
    """Read and parse a config file"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpectrumIOError(f"cannot read config {path}: {e}")
    return parse_config(text, overrides)


def config_digest_source(config: RunConfig) -> str:
    """Canonical JSON of a validated config, used for the inputs hash"""
    return json.dumps(
        config.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )
