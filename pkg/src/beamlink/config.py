"""
Scenario configuration.

A scenario is a JSON document validated by the pydantic models below.
Unknown keys are rejected, and every failure is re-raised as a
``ConfigurationError`` whose ``key`` is the dotted path of the offending
entry (e.g. ``solid.material.poisson_ratio``). See docs/configuration.md
for an annotated example.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

from beamlink.beam.section import BeamLoads, BeamSection
from beamlink.errors import ConfigurationError, InvalidArgumentError
from beamlink.solid.material import SolidLoads, SolidMaterial

logger = logging.getLogger(__name__)

Vector3 = tuple[float, float, float]
ZERO: Vector3 = (0.0, 0.0, 0.0)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_poisson(value: Optional[float]) -> Optional[float]:
    if value is not None and not -1.0 < value < 0.5:
        raise ValueError(f"poisson_ratio must lie in (-1, 0.5), got {value}")
    return value


# ===================================================================
# Solid
# ===================================================================

class MaterialConfig(_Strict):
    """Either (youngs_modulus, poisson_ratio) or (lame_lambda, lame_mu)."""
    youngs_modulus: Optional[PositiveFloat] = None
    poisson_ratio: Optional[float] = None
    lame_lambda: Optional[float] = None
    lame_mu: Optional[PositiveFloat] = None

    @field_validator("poisson_ratio")
    @classmethod
    def check_poisson_ratio(cls, v: Optional[float]) -> Optional[float]:
        return _check_poisson(v)

    @model_validator(mode="after")
    def check_one_pair(self) -> MaterialConfig:
        engineering = self.youngs_modulus is not None or self.poisson_ratio is not None
        lame = self.lame_lambda is not None or self.lame_mu is not None
        if engineering == lame:
            raise ValueError(
                "give exactly one of (youngs_modulus, poisson_ratio) or (lame_lambda, lame_mu)"
            )
        if engineering and (self.youngs_modulus is None or self.poisson_ratio is None):
            raise ValueError("youngs_modulus and poisson_ratio must be given together")
        if lame and (self.lame_lambda is None or self.lame_mu is None):
            raise ValueError("lame_lambda and lame_mu must be given together")
        return self

    def to_material(self) -> SolidMaterial:
        if self.youngs_modulus is not None:
            return SolidMaterial.from_engineering(self.youngs_modulus, self.poisson_ratio)
        return SolidMaterial(lame_lambda=self.lame_lambda, mu=self.lame_mu)


class SolidConfig(_Strict):
    dimensions: tuple[PositiveFloat, PositiveFloat, PositiveFloat]
    divisions: tuple[PositiveInt, PositiveInt, PositiveInt]
    origin: Vector3 = ZERO
    material: MaterialConfig


# ===================================================================
# Beam
# ===================================================================

class SectionConfig(_Strict):
    """
    Rectangular (width, height) or explicit constants. The shear modulus
    is ``shear_modulus`` or derived from ``poisson_ratio``.
    """
    youngs_modulus: PositiveFloat
    poisson_ratio: Optional[float] = None
    shear_modulus: Optional[PositiveFloat] = None
    width: Optional[PositiveFloat] = None
    height: Optional[PositiveFloat] = None
    shear_coefficient: PositiveFloat = 5.0 / 6.0
    area: Optional[PositiveFloat] = None
    shear_area_1: Optional[PositiveFloat] = None
    shear_area_2: Optional[PositiveFloat] = None
    inertia_1: Optional[PositiveFloat] = None
    inertia_2: Optional[PositiveFloat] = None
    torsion_constant: Optional[PositiveFloat] = None

    @field_validator("poisson_ratio")
    @classmethod
    def check_poisson_ratio(cls, v: Optional[float]) -> Optional[float]:
        return _check_poisson(v)

    @model_validator(mode="after")
    def check_complete(self) -> SectionConfig:
        if (self.poisson_ratio is None) == (self.shear_modulus is None):
            raise ValueError("give exactly one of poisson_ratio or shear_modulus")
        explicit = [self.area, self.shear_area_1, self.shear_area_2,
                    self.inertia_1, self.inertia_2, self.torsion_constant]
        rectangle = [self.width, self.height]
        if all(v is not None for v in rectangle) and all(v is None for v in explicit):
            return self
        if all(v is None for v in rectangle) and all(v is not None for v in explicit):
            return self
        raise ValueError(
            "give either width and height, or all of area, shear_area_1, shear_area_2, "
            "inertia_1, inertia_2, torsion_constant"
        )

    @property
    def shear(self) -> float:
        if self.shear_modulus is not None:
            return self.shear_modulus
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    def to_section(self) -> BeamSection:
        E = self.youngs_modulus
        if self.width is not None:
            nu = E / (2.0 * self.shear) - 1.0
            return BeamSection.rectangular(
                self.width, self.height, E, nu, shear_coefficient=self.shear_coefficient
            )
        return BeamSection(
            E=E, G=self.shear, A=self.area, A1=self.shear_area_1, A2=self.shear_area_2,
            I1=self.inertia_1, I2=self.inertia_2, It=self.torsion_constant,
        )


class BeamConfig(_Strict):
    length: PositiveFloat
    elements: PositiveInt
    section: SectionConfig
    axis_direction: Vector3 = (0.0, 0.0, 1.0)
    axis_origin: Optional[Vector3] = None          # default: tip on the interface centroid
    section_axis: Optional[Vector3] = None

    @field_validator("axis_direction")
    @classmethod
    def check_axis_direction(cls, v: Vector3) -> Vector3:
        if not any(v):
            raise ValueError("axis_direction must be non-zero")
        return v


# ===================================================================
# Interface, loads, analysis, output
# ===================================================================

class InterfaceConfig(_Strict):
    face_set: str = "-z"


class TractionConfig(_Strict):
    face_set: str
    traction: Vector3


class LoadsConfig(_Strict):
    body_force: Vector3 = ZERO
    tractions: list[TractionConfig] = Field(default_factory=list)
    distributed_force: Vector3 = ZERO
    distributed_moment: Vector3 = ZERO
    tip_force: Vector3 = ZERO
    tip_moment: Vector3 = ZERO

    def to_solid_loads(self) -> SolidLoads:
        return SolidLoads(self.body_force, tuple((t.face_set, t.traction) for t in self.tractions))

    def to_beam_loads(self) -> BeamLoads:
        return BeamLoads(self.distributed_force, self.distributed_moment,
                         self.tip_force, self.tip_moment)


class AnalysisConfig(_Strict):
    solve: bool = True
    stability: bool = True
    refinement_levels: PositiveInt = 1
    export: bool = False
    include_gram: bool = False
    parallel_workers: Optional[PositiveInt] = None


class OutputConfig(_Strict):
    directory: str = "beamlink-out"
    stability_csv: str = "stability.csv"
    failures: str = "failures.json"


class ScenarioConfig(_Strict):
    solid: SolidConfig
    beam: BeamConfig
    interface: InterfaceConfig = Field(default_factory=InterfaceConfig)
    loads: LoadsConfig = Field(default_factory=LoadsConfig)
    characteristic_length: Optional[PositiveFloat] = None
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def default_characteristic_length(self) -> ScenarioConfig:
        if self.characteristic_length is None:
            self.characteristic_length = self.beam.length
        return self


# ===================================================================
# Parsing
# ===================================================================

def _dotted(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def parse_config_text(text: str) -> ScenarioConfig:
    """Validate a JSON scenario."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("scenario must be a JSON object")
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        details = "; ".join(
            f"{_dotted(e['loc']) or '<root>'}: {e['msg']}" for e in exc.errors()
        )
        raise ConfigurationError(details, key=_dotted(first["loc"]) or None) from exc
    for key, build in (("solid.material", config.solid.material.to_material),
                       ("beam.section", config.beam.section.to_section)):
        try:
            build()
        except InvalidArgumentError as exc:
            raise ConfigurationError(str(exc), key=key) from exc
    return config


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    config = parse_config_text(text)
    logger.debug("parsed scenario %s", path)
    return config


def dump_config(config: ScenarioConfig) -> str:
    """Canonical JSON text; ``parse_config_text(dump_config(c)) == c``."""
    return json.dumps(config.model_dump(mode="json"), indent=2) + "\n"


def with_overrides(config: ScenarioConfig, **analysis) -> ScenarioConfig:
    """
    Copy with command-line overrides applied. ``None`` leaves a value
    untouched; ``directory`` targets the output section.
    """
    updates = {k: v for k, v in analysis.items() if v is not None}
    directory = updates.pop("directory", None)
    new = config.model_copy(deep=True)
    new.analysis = new.analysis.model_copy(update=updates)
    if directory is not None:
        new.output = new.output.model_copy(update={"directory": str(directory)})
    return new
