"""
Straight cantilever beam discretizations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from beamlink.beam.section import BeamSection
from beamlink.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def section_frame(
    axis_direction: np.ndarray, section_axis: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    Rotation Lambda with Lambda e3 = axis and Lambda e1 along ``section_axis``.

    ``section_axis`` is projected onto the plane normal to the axis; by default
    the Cartesian base vector least aligned with the axis is used.
    """
    t = np.asarray(axis_direction, dtype=float)
    if section_axis is None:
        ref = np.eye(3)[int(np.argmin(np.abs(t)))]
    else:
        ref = np.asarray(section_axis, dtype=float)
    e1 = ref - (ref @ t) * t
    norm = np.linalg.norm(e1)
    if norm < 1e-8:
        raise InvalidArgumentError("section_axis is parallel to the beam axis")
    e1 /= norm
    e2 = np.cross(t, e1)
    return np.column_stack([e1, e2, t])


@dataclass(frozen=True)
class BeamModel:
    """Straight beam clamped at s = 0, free (coupled) at s = L."""
    length: float
    n_elements: int
    axis_origin: np.ndarray
    axis_direction: np.ndarray
    section: BeamSection
    rotation: np.ndarray        # Lambda, constant along the axis
    clamped_end: float = 0.0

    def __post_init__(self):
        if abs(np.linalg.norm(self.axis_direction) - 1.0) > 1e-12:
            raise InvalidArgumentError("axis_direction must have unit norm")
        for name in ("axis_origin", "axis_direction", "rotation"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def tip_end(self) -> float:
        return self.length

    @property
    def n_nodes(self) -> int:
        return self.n_elements + 1

    @property
    def element_length(self) -> float:
        return self.length / self.n_elements

    @property
    def arclengths(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    @property
    def node_positions(self) -> np.ndarray:
        return self.axis_origin + np.outer(self.arclengths, self.axis_direction)

    @property
    def tip_position(self) -> np.ndarray:
        return self.axis_origin + self.length * self.axis_direction

    def translated(self, offset: Sequence[float]) -> BeamModel:
        return build_beam(
            self.length, self.n_elements, self.section,
            axis_origin=self.axis_origin + np.asarray(offset, dtype=float),
            axis_direction=self.axis_direction, section_axis=self.rotation[:, 0],
        )


def build_beam(
    length: float,
    n_elements: int,
    section: BeamSection,
    *,
    axis_origin: Sequence[float] = (0.0, 0.0, 0.0),
    axis_direction: Sequence[float] = (0.0, 0.0, 1.0),
    section_axis: Optional[Sequence[float]] = None,
) -> BeamModel:
    """Equally spaced 2-node discretization of a straight beam."""
    if not length > 0.0:
        raise InvalidArgumentError(f"beam length must be positive, got {length}")
    if int(n_elements) != n_elements or n_elements < 1:
        raise InvalidArgumentError(
            f"beam element count must be a positive integer, got {n_elements}"
        )
    direction = np.asarray(axis_direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise InvalidArgumentError("axis_direction must be non-zero")
    direction = direction / norm
    return BeamModel(
        length=float(length),
        n_elements=int(n_elements),
        axis_origin=np.asarray(axis_origin, dtype=float),
        axis_direction=direction,
        section=section,
        rotation=section_frame(direction, section_axis),
    )
