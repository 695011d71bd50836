"""
Layer and stack descriptions for the transfer-matrix model
"""

import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Tuple

from ..errors import InvalidStackError
from .dielectric import DielectricModel, LorentzModel


@dataclass(frozen=True)
class Layer:
    """One homogeneous layer; bounding media are semi-infinite"""

    model: DielectricModel
    thickness_nm: float = 0.0
    semi_infinite: bool = False
    name: str = ""

    @classmethod
    def bounding(cls, model: DielectricModel, name: str = "") -> "Layer":
        return cls(model=model, thickness_nm=math.inf, semi_infinite=True, name=name)


@dataclass(frozen=True)
class Stack:
    """
    Ordered multilayer, ambient first: light enters from layers[0] and the
    last layer is the substrate.
    """

    layers: Tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 3:
            raise InvalidStackError(f"stack needs >= 3 layers, got {len(layers)}")
        if not (layers[0].semi_infinite and layers[-1].semi_infinite):
            raise InvalidStackError("first and last layers must be semi-infinite")
        for index, layer in enumerate(layers[1:-1], start=1):
            if layer.semi_infinite:
                raise InvalidStackError(f"interior layer {index} is semi-infinite")
            if not math.isfinite(layer.thickness_nm) or layer.thickness_nm < 0:
                raise InvalidStackError(
                    f"interior layer {index} has invalid thickness {layer.thickness_nm}"
                )

    @classmethod
    def build(
        cls,
        ambient: DielectricModel,
        interior: Iterable[Tuple[DielectricModel, float]],
        substrate: DielectricModel,
        names: Optional[List[str]] = None,
    ) -> "Stack":
        """Build from (model, thickness) pairs between two bounding media"""
        interior = list(interior)
        names = names or [""] * len(interior)
        layers = [Layer.bounding(ambient, "ambient")]
        layers += [
            Layer(model=m, thickness_nm=float(d), name=name)
            for (m, d), name in zip(interior, names)
        ]
        layers.append(Layer.bounding(substrate, "substrate"))
        return cls(tuple(layers))

    @property
    def interior(self) -> Tuple[Layer, ...]:
        return self.layers[1:-1]

    def _check_interior_index(self, index: int) -> None:
        if not 0 < index < len(self.layers) - 1:
            raise InvalidStackError(f"layer {index} is not an interior layer")

    def with_thickness(self, index: int, thickness_nm: float) -> "Stack":
        self._check_interior_index(index)
        layers = list(self.layers)
        layers[index] = replace(layers[index], thickness_nm=float(thickness_nm))
        return Stack(tuple(layers))

    def with_model(self, index: int, model: DielectricModel) -> "Stack":
        layers = list(self.layers)
        layers[index] = replace(layers[index], model=model)
        return Stack(tuple(layers))

    def undoped(self) -> "Stack":
        """Replace every Lorentz layer by its bare host"""
        layers = [
            replace(layer, model=layer.model.undoped())
            if isinstance(layer.model, LorentzModel)
            else layer
            for layer in self.layers
        ]
        return Stack(tuple(layers))

    def reversed(self) -> "Stack":
        return Stack(tuple(reversed(self.layers)))
