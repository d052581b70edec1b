"""
Isotropic material and loads of the solid body.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from beamlink.beam.section import as_vec3
from beamlink.errors import InvalidArgumentError


@dataclass(frozen=True)
class SolidMaterial:
    """Lamé constants of a linear isotropic solid."""
    lame_lambda: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.lame_lambda) and np.isfinite(self.mu)):
            raise InvalidArgumentError("Lamé constants must be finite")
        if self.mu <= 0.0:
            raise InvalidArgumentError(f"shear modulus mu must be positive, got {self.mu}")
        if self.bulk_modulus <= 0.0:
            raise InvalidArgumentError(
                f"bulk modulus lambda + 2 mu / 3 must be positive, got {self.bulk_modulus}"
            )

    @classmethod
    def from_engineering(cls, youngs_modulus: float, poisson_ratio: float) -> SolidMaterial:
        """Convert (E, nu) to Lamé constants; requires E > 0 and -1 < nu < 1/2."""
        E, nu = float(youngs_modulus), float(poisson_ratio)
        if E <= 0.0:
            raise InvalidArgumentError(f"youngs_modulus must be positive, got {E}")
        if not -1.0 < nu < 0.5:
            raise InvalidArgumentError(f"poisson_ratio must lie in (-1, 0.5), got {nu}")
        return cls(
            lame_lambda=E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            mu=E / (2.0 * (1.0 + nu)),
        )

    @property
    def bulk_modulus(self) -> float:
        return self.lame_lambda + 2.0 * self.mu / 3.0

    @property
    def youngs_modulus(self) -> float:
        lam, mu = self.lame_lambda, self.mu
        return mu * (3.0 * lam + 2.0 * mu) / (lam + mu)

    @property
    def poisson_ratio(self) -> float:
        return self.lame_lambda / (2.0 * (self.lame_lambda + self.mu))

    def elasticity_matrix(self) -> np.ndarray:
        """6x6 Voigt matrix for (xx, yy, zz, yz, xz, xy) with engineering shears."""
        lam, mu = self.lame_lambda, self.mu
        D = np.zeros((6, 6))
        D[:3, :3] = lam
        D[:3, :3] += 2.0 * mu * np.eye(3)
        D[3:, 3:] = mu * np.eye(3)
        return D

    def to_dict(self) -> dict:
        return {"lame_lambda": self.lame_lambda, "mu": self.mu}


@dataclass(frozen=True)
class SolidLoads:
    """Constant body force per unit volume and constant tractions on named face sets."""
    body_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tractions: tuple[tuple[str, np.ndarray], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body_force", as_vec3(self.body_force, "body_force"))
        object.__setattr__(self, "tractions", tuple(
            (str(name), as_vec3(value, f"traction on {name!r}")) for name, value in self.tractions
        ))

    def scaled(self, factor: float) -> SolidLoads:
        return SolidLoads(
            factor * self.body_force,
            tuple((name, factor * t) for name, t in self.tractions),
        )

    @property
    def is_zero(self) -> bool:
        return not np.any(self.body_force) and all(not np.any(t) for _, t in self.tractions)
