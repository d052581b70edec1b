"""
Discrete continuity, coercivity and Garding constants of both bodies.

Each constant is an extreme generalized eigenvalue of a stiffness matrix
with respect to the Gram matrix of the corresponding norm; tracking them
over refinement levels shows whether they stay mesh-independent.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import scipy.sparse as sp

from beamlink.analysis.eigen import generalized_eigenvalue
from beamlink.beam.timoshenko import assemble_beam, beam_norm_gram
from beamlink.errors import InvalidArgumentError
from beamlink.geometry.beam_model import BeamModel
from beamlink.geometry.mesh import Mesh
from beamlink.saddle.system import SaddleSystem
from beamlink.solid.elasticity import assemble_solid, l2_gram, u_norm_gram
from beamlink.solid.material import SolidMaterial

logger = logging.getLogger(__name__)


def solid_continuity_constant(
    mesh: Mesh, material: SolidMaterial, characteristic_length: float
) -> float:
    """C with |a_B(v, w)| <= C ||v||_U ||w||_U, i.e. lambda_max(K_B, G_U)."""
    return generalized_eigenvalue(
        assemble_solid(mesh, material), u_norm_gram(mesh, characteristic_length), largest=True
    )


def solid_garding_constant(
    mesh: Mesh, material: SolidMaterial, characteristic_length: float
) -> float:
    """alpha_B with a_B(v, v) + ||v||^2_L2 >= alpha_B ||v||^2_U."""
    return generalized_eigenvalue(
        assemble_solid(mesh, material) + l2_gram(mesh), u_norm_gram(mesh, characteristic_length)
    )


def beam_coercivity_constant(beam: BeamModel, characteristic_length: float) -> float:
    """lambda_min(K_b, G_WxR) of the clamped beam."""
    return generalized_eigenvalue(assemble_beam(beam), beam_norm_gram(beam, characteristic_length))


def beam_continuity_constant(beam: BeamModel, characteristic_length: float) -> float:
    return generalized_eigenvalue(
        assemble_beam(beam), beam_norm_gram(beam, characteristic_length), largest=True
    )


def global_garding_constant(system: SaddleSystem) -> float:
    """lambda_min(K + M_solid, G_V): the solid L2 term compensates its rigid modes."""
    if system.mesh is None:
        raise InvalidArgumentError("the Garding constant needs the solid mesh")
    shift = sp.block_diag(
        [l2_gram(system.mesh), sp.csr_matrix((system.layout.n_beam, system.layout.n_beam))],
        format="csr",
    )
    return generalized_eigenvalue(system.K + shift, system.G_V)


@dataclass
class BoundConstants:
    solid_continuity: float
    solid_garding: float
    beam_coercivity: float
    beam_continuity: float
    global_garding: float

    def to_dict(self) -> dict:
        return asdict(self)


def bound_constants(system: SaddleSystem) -> BoundConstants:
    """All constants for an assembled coupled system."""
    if system.mesh is None or system.beam is None or system.material is None:
        raise InvalidArgumentError("bound constants need an assembled coupled system")
    L = system.characteristic_length
    out = BoundConstants(
        solid_continuity=solid_continuity_constant(system.mesh, system.material, L),
        solid_garding=solid_garding_constant(system.mesh, system.material, L),
        beam_coercivity=beam_coercivity_constant(system.beam, L),
        beam_continuity=beam_continuity_constant(system.beam, L),
        global_garding=global_garding_constant(system),
    )
    logger.debug("bound constants: %s", out.to_dict())
    return out
