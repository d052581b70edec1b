"""
Shear-Deformable Beam Elements

Two-node elements with linear interpolation of the centroid displacement
w and the incremental rotation theta, evaluated with a single midpoint
quadrature point. The transverse shear stiffness carries the residual
bending flexibility of the element (1/GA_eff = 1/GA + h^2 / 12 EI), which
makes cantilever tip deflections and rotations nodally exact.

Node ``i`` owns the six DOFs ``[w_i, theta_i]`` at ``6 * i``. With the
clamp eliminated the numbering starts at node 1.
"""

from __future__ import annotations

import logging
import time
from typing import Optional

import numpy as np
import scipy.sparse as sp

from beamlink.beam.section import BeamLoads, BeamSection, BeamState
from beamlink.errors import GeometryError, InvalidArgumentError
from beamlink.geometry.beam_model import BeamModel
from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)

NODE_DOFS = 6


def skew(v: np.ndarray) -> np.ndarray:
    """Matrix of the cross product, skew(a) @ b == a x b."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


# ===================================================================
# Strains and element kernels
# ===================================================================

def beam_strains(
    w_prime: np.ndarray,
    theta: np.ndarray,
    theta_prime: np.ndarray,
    tangent: np.ndarray,
    rotation: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Linearized section strains.

    Gamma = Lambda^T (w' + r' x theta) collects the two shear strains and
    the axial strain; Omega = Lambda^T theta' the two curvatures and the
    twist. Both vanish for every infinitesimal rigid motion
    ``w = omega x (r - p), theta = omega``.
    """
    Lam = np.asarray(rotation, dtype=float)
    gamma = Lam.T @ (np.asarray(w_prime, dtype=float) + np.cross(tangent, theta))
    omega = Lam.T @ np.asarray(theta_prime, dtype=float)
    return gamma, omega


def effective_shear_stiffness(section: BeamSection, element_length: float) -> np.ndarray:
    """Constitutive matrix of Gamma with the residual bending flexibility folded in."""
    h = element_length
    ga1 = 1.0 / (1.0 / (section.G * section.A1) + h**2 / (12.0 * section.E * section.I2))
    ga2 = 1.0 / (1.0 / (section.G * section.A2) + h**2 / (12.0 * section.E * section.I1))
    return np.diag([ga1, ga2, section.E * section.A])


def strain_operators(element_length: float, rotation: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint operators (B_gamma, B_omega), each 3 x 12, over [w1, theta1, w2, theta2]."""
    h = element_length
    Lam = np.asarray(rotation, dtype=float)
    eye = np.eye(3)
    half_t = 0.5 * skew(Lam[:, 2])
    b_gamma = Lam.T @ np.hstack([-eye / h, half_t, eye / h, half_t])
    b_omega = Lam.T @ np.hstack([np.zeros((3, 3)), -eye / h, np.zeros((3, 3)), eye / h])
    return b_gamma, b_omega


def beam_element_stiffness(
    element_length: float, section: BeamSection, rotation: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Stiffness of one straight two-node element.

    Parameters
    ----------
    element_length : float
        Length h of the element.
    section : BeamSection
    rotation : (3, 3) array, optional
        Section frame Lambda; its third column is the axis tangent.
        Defaults to the identity (axis along e3).

    Returns
    -------
    (12, 12) symmetric positive-semidefinite matrix annihilating the six
    infinitesimal rigid motions of the element.

    Raises
    ------
    GeometryError
        Non-positive element length.
    """
    h = float(element_length)
    if not h > 0.0:
        raise GeometryError(f"beam element length must be positive, got {h}")
    Lam = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    b_gamma, b_omega = strain_operators(h, Lam)
    k = h * (
        b_gamma.T @ effective_shear_stiffness(section, h) @ b_gamma
        + b_omega.T @ section.C_omega @ b_omega
    )
    return 0.5 * (k + k.T)


# ===================================================================
# Assembly
# ===================================================================

def _free_slice(clamped: bool) -> slice:
    return slice(NODE_DOFS, None) if clamped else slice(None)


def _assemble_elements(beam: BeamModel, block: np.ndarray, clamped: bool) -> sp.csr_matrix:
    n = NODE_DOFS * beam.n_nodes
    starts = NODE_DOFS * np.arange(beam.n_elements)
    dofs = starts[:, None] + np.arange(2 * NODE_DOFS)
    rows = np.repeat(dofs, 2 * NODE_DOFS, axis=1).ravel()
    cols = np.tile(dofs, (1, 2 * NODE_DOFS)).ravel()
    data = np.tile(block.ravel(), beam.n_elements)
    full = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    full = 0.5 * (full + full.T)
    keep = _free_slice(clamped)
    return full[keep, keep].tocsr()


def assemble_beam(beam: BeamModel, *, clamped: bool = True) -> sp.csr_matrix:
    """
    Global beam stiffness K_b.

    With ``clamped`` the six DOFs of the node at s = 0 are removed and the
    result is positive definite; otherwise the free-free matrix is returned.
    """
    start = time.perf_counter()
    k_e = beam_element_stiffness(beam.element_length, beam.section, beam.rotation)
    K = _assemble_elements(beam, k_e, clamped)
    elapsed = (time.perf_counter() - start) * 1000
    live.record_assembly(kind="beam", dofs=K.shape[0], elapsed_ms=elapsed)
    logger.debug("beam stiffness: %d elements, %d dofs", beam.n_elements, K.shape[0])
    return K


def beam_norm_gram(
    beam: BeamModel, characteristic_length: float, *, clamped: bool = True
) -> sp.csr_matrix:
    """
    Gram matrix of ||(w, theta)||^2 = ||w||^2_W + L^2 ||theta||^2_R,
    each factor being ||.||^2_L2 + L^2 ||.'||^2_L2.
    """
    L = characteristic_length
    if not L > 0.0:
        raise InvalidArgumentError(f"characteristic length must be positive, got {L}")
    h = beam.element_length
    g = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]]) \
        + L**2 / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
    weights = np.diag([1.0, 1.0, 1.0, L**2, L**2, L**2])
    return _assemble_elements(beam, np.kron(g, weights), clamped)


def beam_load_vector(beam: BeamModel, loads: BeamLoads, *, clamped: bool = True) -> np.ndarray:
    """Consistent nodal loads; tip force and moment land on the last node."""
    f = np.zeros((beam.n_nodes, NODE_DOFS))
    h = beam.element_length
    share = np.full(beam.n_nodes, h)
    share[[0, -1]] = 0.5 * h
    f[:, :3] += np.outer(share, loads.distributed_force)
    f[:, 3:] += np.outer(share, loads.distributed_moment)
    f[-1, :3] += loads.tip_force
    f[-1, 3:] += loads.tip_moment
    return f.ravel()[_free_slice(clamped)]


def beam_state(beam: BeamModel, x: np.ndarray) -> BeamState:
    """Unpack a clamped-beam vector of length 6n into a BeamState with the clamp row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (NODE_DOFS * beam.n_elements,):
        raise InvalidArgumentError(
            f"expected {NODE_DOFS * beam.n_elements} beam DOFs, got {x.shape}"
        )
    nodal = np.vstack([np.zeros(NODE_DOFS), x.reshape(beam.n_elements, NODE_DOFS)])
    return BeamState(w=nodal[:, :3], theta=nodal[:, 3:])


def section_resultants(beam: BeamModel, state: BeamState) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint force and moment resultants of every element, in global axes."""
    h = beam.element_length
    Lam = beam.rotation
    w_prime = np.diff(state.w, axis=0) / h
    theta_mid = 0.5 * (state.theta[1:] + state.theta[:-1])
    theta_prime = np.diff(state.theta, axis=0) / h
    c_gamma = effective_shear_stiffness(beam.section, h)
    forces, moments = [], []
    for wp, th, tp in zip(w_prime, theta_mid, theta_prime):
        gamma, omega = beam_strains(wp, th, tp, beam.axis_direction, Lam)
        forces.append(Lam @ (c_gamma @ gamma))
        moments.append(Lam @ (beam.section.C_omega @ omega))
    return np.array(forces), np.array(moments)
