"""
Coupled mixed system

    [ K   B^T ] [x]   [f]
    [ B   0   ] [m] = [0]

with K = K_B (+) K_b block-diagonal over (solid, clamped beam), B the
6 x N interface block and m = (lambda, mu).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from beamlink.beam.section import BeamLoads
from beamlink.beam.timoshenko import assemble_beam, beam_load_vector, beam_norm_gram
from beamlink.coupling.constraints import ConstraintBlock, assemble_B, q_norm_gram
from beamlink.dofs import DofLayout
from beamlink.errors import ConfigurationError, InvalidArgumentError
from beamlink.geometry.beam_model import BeamModel
from beamlink.geometry.interface import InterfaceSurface
from beamlink.geometry.mesh import Mesh
from beamlink.solid.elasticity import assemble_solid, solid_load_vector, u_norm_gram
from beamlink.solid.material import SolidLoads, SolidMaterial

logger = logging.getLogger(__name__)

ALIGNMENT_TOL = 1e-8


@dataclass(frozen=True)
class SystemLoads:
    """Loads acting on both bodies."""
    solid: SolidLoads = field(default_factory=SolidLoads)
    beam: BeamLoads = field(default_factory=BeamLoads)

    def scaled(self, factor: float) -> SystemLoads:
        return SystemLoads(self.solid.scaled(factor), self.beam.scaled(factor))


@dataclass(frozen=True)
class SaddleSystem:
    """
    Assembled blocks of the mixed problem.

    ``mesh``, ``beam``, ``surface`` and ``material`` are kept for
    post-processing and are ``None`` for hand-built systems.
    """
    K: sp.csr_matrix
    constraints: ConstraintBlock
    f: np.ndarray
    G_V: sp.csr_matrix
    G_Q: np.ndarray
    layout: DofLayout
    characteristic_length: float
    mesh: Optional[Mesh] = None
    beam: Optional[BeamModel] = None
    surface: Optional[InterfaceSurface] = None
    material: Optional[SolidMaterial] = None
    loads: Optional[SystemLoads] = None

    def __post_init__(self):
        n = self.layout.n_primal
        if self.K.shape != (n, n) or self.G_V.shape != (n, n):
            raise ConfigurationError(
                f"primal blocks must be {n} x {n}, got K {self.K.shape}, G_V {self.G_V.shape}"
            )
        if self.constraints.B.shape[1] != n or len(self.f) != n:
            raise ConfigurationError("constraint block or load vector does not match the layout")
        m = self.constraints.n_rows
        if self.G_Q.shape != (m, m):
            raise ConfigurationError(f"G_Q must be {m} x {m}, got {self.G_Q.shape}")

    @property
    def B(self) -> sp.csr_matrix:
        return self.constraints.B

    @property
    def n_primal(self) -> int:
        return self.layout.n_primal

    @property
    def n_constraints(self) -> int:
        return self.constraints.n_rows

    @property
    def size(self) -> int:
        return self.n_primal + self.n_constraints

    def kkt_matrix(self) -> sp.csr_matrix:
        """Symmetric indefinite matrix [[K, B^T], [B, 0]]."""
        m = self.n_constraints
        if m == 0:
            return self.K.tocsr()
        zero = sp.csr_matrix((m, m))
        return sp.bmat([[self.K, self.B.T], [self.B, zero]], format="csr")

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.f, np.zeros(self.n_constraints)])

    def with_constraints(self, *, rotation: bool = True, displacement: bool = True) -> SaddleSystem:
        """Copy keeping only the requested constraint row groups."""
        block = self.constraints.select(rotation=rotation, displacement=displacement)
        layout = replace(self.layout, n_multipliers=block.n_rows)
        G_Q = q_norm_gram(self.characteristic_length, block.rows)
        return replace(self, constraints=block, G_Q=G_Q, layout=layout)

    def with_loads(self, loads: SystemLoads) -> SaddleSystem:
        if self.mesh is None or self.beam is None:
            raise InvalidArgumentError("loads can only be replaced on an assembled system")
        return replace(self, f=_load_vector(self.mesh, self.beam, self.surface, loads), loads=loads)

    def solid_block(self) -> sp.csr_matrix:
        s = self.layout.solid
        return self.K[s, s].tocsr()

    def beam_block(self) -> sp.csr_matrix:
        b = self.layout.beam
        return self.K[b, b].tocsr()


def _load_vector(
    mesh: Mesh, beam: BeamModel, surface: Optional[InterfaceSurface], loads: SystemLoads
) -> np.ndarray:
    return np.concatenate([
        solid_load_vector(mesh, loads.solid, surface),
        beam_load_vector(beam, loads.beam),
    ])


def check_alignment(beam: BeamModel, surface: InterfaceSurface) -> None:
    """
    The beam tip must sit on the centroid of Sigma and the axis must be
    normal to a planar Sigma. Section axes that are not parallel to the
    tangents of a planar Sigma are logged as a warning.

    Raises
    ------
    ConfigurationError
    """
    scale = max(beam.length, surface.diameter)
    gap = np.linalg.norm(beam.tip_position - surface.centroid)
    if gap > ALIGNMENT_TOL * scale:
        raise ConfigurationError(
            f"beam tip {beam.tip_position.tolist()} misses the interface centroid "
            f"{surface.centroid.tolist()} by {gap:.3e}",
            key="beam.axis_origin",
        )
    if surface.is_planar:
        tilt = np.linalg.norm(np.cross(beam.axis_direction, surface.normal))
        if tilt > ALIGNMENT_TOL:
            raise ConfigurationError(
                "beam axis is not normal to the interface", key="beam.axis_direction"
            )
        tangent = surface.quad_points[0].tangents[0]
        tangent = tangent / np.linalg.norm(tangent)
        skew = min(abs(beam.rotation[:, 0] @ tangent), abs(beam.rotation[:, 1] @ tangent))
        if skew > ALIGNMENT_TOL:
            logger.warning(
                "section axes are rotated against the interface tangents (|cos| = %.3e)", skew
            )


def assemble_system(
    mesh: Mesh,
    beam: BeamModel,
    surface: InterfaceSurface,
    material: SolidMaterial,
    loads: Optional[SystemLoads] = None,
    characteristic_length: Optional[float] = None,
    *,
    workers: Optional[int] = None,
) -> SaddleSystem:
    """
    Assemble K, B, f and both Gram matrices of the coupled problem.

    The section constants come from ``beam.section``; the characteristic
    length defaults to the beam length.

    Raises
    ------
    ConfigurationError
        The interface does not belong to ``mesh`` or the beam is misplaced.
    RankDeficiencyError
        B has rank below 6.
    """
    loads = loads or SystemLoads()
    L = beam.length if characteristic_length is None else float(characteristic_length)
    if surface.node_ids.max() >= mesh.n_nodes:
        raise ConfigurationError("interface references nodes outside the mesh", key="interface")
    check_alignment(beam, surface)

    layout = DofLayout(n_solid_nodes=mesh.n_nodes, n_beam_elements=beam.n_elements)
    K = sp.block_diag([assemble_solid(mesh, material, workers=workers), assemble_beam(beam)],
                      format="csr")
    G_V = sp.block_diag([u_norm_gram(mesh, L, workers=workers), beam_norm_gram(beam, L)],
                        format="csr")
    system = SaddleSystem(
        K=K,
        constraints=assemble_B(surface, layout),
        f=_load_vector(mesh, beam, surface, loads),
        G_V=G_V,
        G_Q=q_norm_gram(L),
        layout=layout,
        characteristic_length=L,
        mesh=mesh,
        beam=beam,
        surface=surface,
        material=material,
        loads=loads,
    )
    logger.info(
        "assembled coupled system: %d solid + %d beam dofs, %d multipliers",
        layout.n_solid, layout.n_beam, layout.n_multipliers,
    )
    return system
