"""
Beam section properties, loads and state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from beamlink.errors import InvalidArgumentError


def as_vec3(value, name: str) -> np.ndarray:
    v = np.array(value, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidArgumentError(f"{name} must be a finite 3-vector, got {value!r}")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class BeamSection:
    """
    Section constants of a straight prismatic shear-deformable beam.

    ``A1``/``A2`` are the shear-reduced areas and ``I1``/``I2`` the principal
    moments of inertia about the section axes e1/e2; ``It`` is the torsion
    constant.
    """
    E: float
    G: float
    A: float
    A1: float
    A2: float
    I1: float
    I2: float
    It: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value) or value <= 0.0:
                raise InvalidArgumentError(f"section.{f.name} must be positive, got {value}")

    @property
    def C_gamma(self) -> np.ndarray:
        return np.diag([self.G * self.A1, self.G * self.A2, self.E * self.A])

    @property
    def C_omega(self) -> np.ndarray:
        return np.diag([self.E * self.I1, self.E * self.I2, self.G * self.It])

    @classmethod
    def rectangular(
        cls, width: float, height: float, E: float, poisson_ratio: float,
        shear_coefficient: float = 5.0 / 6.0,
    ) -> BeamSection:
        """
        Solid rectangle, ``width`` along e1 and ``height`` along e2.

        Uses the thin-strip series for the torsion constant.
        """
        if width <= 0.0 or height <= 0.0:
            raise InvalidArgumentError("rectangle sides must be positive")
        b, t = max(width, height), min(width, height)
        it = b * t**3 * (1.0 / 3.0 - 0.21 * (t / b) * (1.0 - t**4 / (12.0 * b**4)))
        area = width * height
        return cls(
            E=E, G=E / (2.0 * (1.0 + poisson_ratio)), A=area,
            A1=shear_coefficient * area, A2=shear_coefficient * area,
            I1=width * height**3 / 12.0, I2=height * width**3 / 12.0, It=it,
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class BeamLoads:
    """Constant distributed force/moment per unit length plus tip force/moment."""
    distributed_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    distributed_moment: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tip_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tip_moment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, as_vec3(getattr(self, f.name), f.name))

    def scaled(self, factor: float) -> BeamLoads:
        return BeamLoads(*(factor * getattr(self, f.name) for f in fields(self)))


@dataclass(frozen=True)
class BeamState:
    """Nodal centroid displacements and incremental rotations, clamp row included."""
    w: np.ndarray       # (n + 1, 3)
    theta: np.ndarray   # (n + 1, 3)

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        theta = np.array(self.theta, dtype=float)
        if w.shape != theta.shape or w.ndim != 2 or w.shape[1] != 3:
            raise InvalidArgumentError("w and theta must both be (n + 1, 3) arrays")
        if np.any(w[0] != 0.0) or np.any(theta[0] != 0.0):
            raise InvalidArgumentError("beam state must vanish at the clamped end")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "theta", theta)

    @property
    def tip_displacement(self) -> np.ndarray:
        return self.w[-1]

    @property
    def tip_rotation(self) -> np.ndarray:
        return self.theta[-1]
