"""
Hex8 Linear Elasticity

Element stiffness, consistent loads, the U-norm Gram matrix and
quadrature-point strain/stress recovery for the solid body. Global
matrices are node-major: DOF ``3 * node + i`` is component ``i``.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np
import scipy.sparse as sp

from beamlink.errors import ConfigurationError, InvalidArgumentError
from beamlink.geometry.mesh import HEX_N, HEX_WEIGHTS, Mesh, element_gradients
from beamlink.solid.material import SolidLoads, SolidMaterial
from beamlink.utils.live_metrics import live

if TYPE_CHECKING:
    from beamlink.geometry.interface import InterfaceSurface

logger = logging.getLogger(__name__)


# ===================================================================
# Kinematics
# ===================================================================

def small_strain(displacement_gradient: np.ndarray) -> np.ndarray:
    """Symmetric part of a displacement gradient (batched over leading axes)."""
    G = np.asarray(displacement_gradient, dtype=float)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def strain_displacement_matrix(dn_dx: np.ndarray) -> np.ndarray:
    """
    Voigt B matrix (6 x 24) at one quadrature point.

    Strain order is (xx, yy, zz, yz, xz, xy) with engineering shear strains.
    """
    B = np.zeros((6, 24))
    for a in range(8):
        dx, dy, dz = dn_dx[a]
        c = 3 * a
        B[0, c] = dx
        B[1, c + 1] = dy
        B[2, c + 2] = dz
        B[3, c + 1], B[3, c + 2] = dz, dy
        B[4, c], B[4, c + 2] = dz, dx
        B[5, c], B[5, c + 1] = dy, dx
    return B


# ===================================================================
# Element kernels
# ===================================================================

def solid_element_stiffness(coords: np.ndarray, material: SolidMaterial) -> np.ndarray:
    """
    Stiffness of one hex8 element under full 2x2x2 Gauss quadrature.

    Parameters
    ----------
    coords : (8, 3) array
        Nodal coordinates in local node order.
    material : SolidMaterial

    Returns
    -------
    (24, 24) symmetric positive-semidefinite matrix whose nullspace is the
    six rigid-body modes of the element.

    Raises
    ------
    GeometryError
        The element is inverted or degenerate.
    """
    dn_dx, det_j = element_gradients(np.asarray(coords, dtype=float))
    D = material.elasticity_matrix()
    k = np.zeros((24, 24))
    for q in range(len(HEX_WEIGHTS)):
        B = strain_displacement_matrix(dn_dx[q])
        k += (B.T @ D @ B) * (det_j[q] * HEX_WEIGHTS[q])
    return 0.5 * (k + k.T)


def _element_gram(coords: np.ndarray, length: float) -> np.ndarray:
    dn_dx, det_j = element_gradients(coords)
    dv = det_j * HEX_WEIGHTS
    mass = np.einsum("qa,qb,q->ab", HEX_N, HEX_N, dv)
    grad = np.einsum("qai,qbi,q->ab", dn_dx, dn_dx, dv)
    return np.kron(mass + length**2 * grad, np.eye(3))


# ===================================================================
# Assembly
# ===================================================================

def element_dofs(mesh: Mesh) -> np.ndarray:
    """(m, 24) global DOF indices of every element."""
    return (3 * mesh.elements[:, :, None] + np.arange(3)).reshape(mesh.n_elements, 24)


def _assemble(
    mesh: Mesh,
    kernel: Callable[[np.ndarray], np.ndarray],
    workers: Optional[int],
) -> sp.csr_matrix:
    coords = [mesh.element_coordinates(e) for e in range(mesh.n_elements)]
    if workers is not None and workers > 1:
        # map() keeps element order, so the sum below is identical to the serial one
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(kernel, coords))
    else:
        blocks = [kernel(c) for c in coords]

    dofs = element_dofs(mesh)
    rows = np.repeat(dofs, 24, axis=1).ravel()
    cols = np.tile(dofs, (1, 24)).ravel()
    data = np.asarray(blocks).ravel()
    n = mesh.n_dofs
    A = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    return (0.5 * (A + A.T)).tocsr()


def assemble_solid(
    mesh: Mesh, material: SolidMaterial, *, workers: Optional[int] = None
) -> sp.csr_matrix:
    """Global free-free stiffness K_B of the solid."""
    start = time.perf_counter()
    K = _assemble(mesh, lambda c: solid_element_stiffness(c, material), workers)
    elapsed = (time.perf_counter() - start) * 1000
    live.record_assembly(kind="solid", dofs=mesh.n_dofs, elapsed_ms=elapsed)
    logger.debug("solid stiffness: %d dofs, nnz %d, %.1f ms", mesh.n_dofs, K.nnz, elapsed)
    return K


def u_norm_gram(
    mesh: Mesh, characteristic_length: float, *, workers: Optional[int] = None
) -> sp.csr_matrix:
    """Gram matrix of ||v||^2 = ||v||^2_L2 + L^2 ||grad v||^2_L2 over the solid."""
    if not characteristic_length > 0.0:
        raise InvalidArgumentError(
            f"characteristic length must be positive, got {characteristic_length}"
        )
    return _assemble(mesh, lambda c: _element_gram(c, characteristic_length), workers)


def l2_gram(mesh: Mesh, *, workers: Optional[int] = None) -> sp.csr_matrix:
    """Consistent vector mass matrix (L2 Gram) of the solid."""
    return _assemble(mesh, lambda c: _element_gram(c, 0.0), workers)


# ===================================================================
# Loads
# ===================================================================

def solid_load_vector(
    mesh: Mesh,
    loads: SolidLoads,
    interface: Optional[InterfaceSurface] = None,
) -> np.ndarray:
    """
    Consistent nodal loads of a constant body force and face tractions.

    Raises
    ------
    ConfigurationError
        A traction face set shares a face with the interface.
    """
    f = np.zeros(mesh.n_dofs)
    coupled = set(interface.faces) if interface is not None else set()

    if np.any(loads.body_force):
        for e in range(mesh.n_elements):
            _, det_j = element_gradients(mesh.element_coordinates(e))
            weights = HEX_N.T @ (det_j * HEX_WEIGHTS)          # (8,) int N_a dV
            nodal = np.outer(weights, loads.body_force)
            np.add.at(f, (3 * mesh.elements[e][:, None] + np.arange(3)), nodal)

    for name, traction in loads.tractions:
        faces = mesh.face_set(name, key="loads.tractions")
        if coupled.intersection(faces):
            raise ConfigurationError(
                f"traction on {name!r} acts on the coupling interface {interface.name!r}",
                key="loads.tractions",
            )
        for element, local_face in faces:
            for fp in mesh.face_points(element, local_face):
                nodal = np.outer(fp.shape * fp.weight, traction)
                np.add.at(f, (3 * fp.nodes[:, None] + np.arange(3)), nodal)
    return f


# ===================================================================
# Recovery
# ===================================================================

def recover_strains(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Small-strain tensors at every Gauss point, shape (m, 8, 3, 3)."""
    u = np.asarray(u, dtype=float).reshape(mesh.n_nodes, 3)
    out = np.empty((mesh.n_elements, len(HEX_WEIGHTS), 3, 3))
    for e in range(mesh.n_elements):
        dn_dx, _ = element_gradients(mesh.element_coordinates(e))
        grad = np.einsum("qaj,ai->qij", dn_dx, u[mesh.elements[e]])  # du_i/dx_j
        out[e] = small_strain(grad)
    return out


def recover_stresses(mesh: Mesh, u: np.ndarray, material: SolidMaterial) -> np.ndarray:
    """Cauchy stresses sigma = 2 mu eps + lambda tr(eps) I at every Gauss point."""
    eps = recover_strains(mesh, u)
    trace = np.trace(eps, axis1=-2, axis2=-1)[..., None, None]
    return 2.0 * material.mu * eps + material.lame_lambda * trace * np.eye(3)


def von_mises(stress: np.ndarray) -> np.ndarray:
    s = np.asarray(stress)
    dev = s - np.trace(s, axis1=-2, axis2=-1)[..., None, None] * np.eye(3) / 3.0
    return np.sqrt(1.5 * np.einsum("...ij,...ij->...", dev, dev))
