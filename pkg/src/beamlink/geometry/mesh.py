"""
Structured Hexahedral Meshes

Reference hex8 element, Gauss rules, bilinear face maps and the
axis-aligned block generator shared by the solid and coupling code.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from beamlink.errors import ConfigurationError, GeometryError, InvalidArgumentError

logger = logging.getLogger(__name__)


# ===================================================================
# Reference element
# ===================================================================

HEX_REFERENCE_NODES = np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
], dtype=float)

# Local faces, nodes counter-clockwise seen from outside the element.
FACE_NODES: tuple[tuple[int, int, int, int], ...] = (
    (0, 3, 2, 1),  # zeta = -1
    (4, 5, 6, 7),  # zeta = +1
    (0, 1, 5, 4),  # eta = -1
    (1, 2, 6, 5),  # xi = +1
    (2, 3, 7, 6),  # eta = +1
    (0, 4, 7, 3),  # xi = -1
)

QUAD_REFERENCE_NODES = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)

_GAUSS_1D = np.array([-1.0, 1.0]) / np.sqrt(3.0)


def hex_shape(xi: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Trilinear shape functions and their reference derivatives at ``xi``."""
    r = HEX_REFERENCE_NODES
    f = 1.0 + r * np.asarray(xi, dtype=float)
    n = 0.125 * f[:, 0] * f[:, 1] * f[:, 2]
    dn = 0.125 * np.column_stack([
        r[:, 0] * f[:, 1] * f[:, 2],
        f[:, 0] * r[:, 1] * f[:, 2],
        f[:, 0] * f[:, 1] * r[:, 2],
    ])
    return n, dn


def quad_shape(xi: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear shape functions and their reference derivatives at ``xi``."""
    r = QUAD_REFERENCE_NODES
    f = 1.0 + r * np.asarray(xi, dtype=float)
    n = 0.25 * f[:, 0] * f[:, 1]
    dn = 0.25 * np.column_stack([r[:, 0] * f[:, 1], f[:, 0] * r[:, 1]])
    return n, dn


def gauss_rule_3d() -> tuple[np.ndarray, np.ndarray]:
    """2x2x2 Gauss points and weights on [-1, 1]^3."""
    pts = np.array([[a, b, c] for c in _GAUSS_1D for b in _GAUSS_1D for a in _GAUSS_1D])
    return pts, np.ones(len(pts))


def gauss_rule_2d() -> tuple[np.ndarray, np.ndarray]:
    """2x2 Gauss points and weights on [-1, 1]^2."""
    pts = np.array([[a, b] for b in _GAUSS_1D for a in _GAUSS_1D])
    return pts, np.ones(len(pts))


_HEX_POINTS, HEX_WEIGHTS = gauss_rule_3d()
HEX_N = np.array([hex_shape(p)[0] for p in _HEX_POINTS])     # (8 qp, 8)
HEX_DN = np.array([hex_shape(p)[1] for p in _HEX_POINTS])    # (8 qp, 8, 3)

_QUAD_POINTS, QUAD_WEIGHTS = gauss_rule_2d()
QUAD_N = np.array([quad_shape(p)[0] for p in _QUAD_POINTS])  # (4 qp, 4)
QUAD_DN = np.array([quad_shape(p)[1] for p in _QUAD_POINTS])  # (4 qp, 4, 2)


def element_gradients(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Physical shape-function gradients of a hex8 at its 2x2x2 Gauss points.

    Parameters
    ----------
    coords : (8, 3) array
        Nodal coordinates in local node order.

    Returns
    -------
    dn_dx : (8, 8, 3) array
        ``dn_dx[q, a, i]`` = dN_a/dx_i at quadrature point q.
    det_j : (8,) array
        Jacobian determinants at the quadrature points.
    """
    jac = np.einsum("qai,aj->qij", HEX_DN, coords)  # dx_j/dxi_i
    det_j = np.linalg.det(jac)
    if np.any(det_j <= 0.0):
        raise GeometryError(
            f"inverted or degenerate hexahedron (min det J = {det_j.min():.3e})"
        )
    dn_dx = np.einsum("qij,qaj->qai", np.linalg.inv(jac), HEX_DN)
    return dn_dx, det_j


# ===================================================================
# Face quadrature
# ===================================================================

@dataclass(frozen=True)
class FacePoint:
    """One Gauss point of a bilinear boundary face."""
    nodes: np.ndarray       # (4,) global node ids, face order
    shape: np.ndarray       # (4,) face shape function values
    dshape: np.ndarray      # (4, 2) derivatives w.r.t. the face coordinates
    position: np.ndarray    # (3,)
    tangents: np.ndarray    # (2, 3) covariant tangents T_1, T_2
    weight: float           # area weight dA


# ===================================================================
# Mesh
# ===================================================================

@dataclass(frozen=True)
class Mesh:
    """Hex8 mesh of a solid with named boundary face sets."""
    nodes: np.ndarray                                   # (n, 3)
    elements: np.ndarray                                # (m, 8) int
    face_sets: Mapping[str, tuple[tuple[int, int], ...]]

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        elements = np.array(self.elements, dtype=np.int64)
        nodes.setflags(write=False)
        elements.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "face_sets", {
            name: tuple((int(e), int(f)) for e, f in faces)
            for name, faces in self.face_sets.items()
        })

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes

    def element_coordinates(self, element: int) -> np.ndarray:
        return self.nodes[self.elements[element]]

    def face_node_ids(self, element: int, local_face: int) -> np.ndarray:
        return self.elements[element][list(FACE_NODES[local_face])]

    def face_set(
        self, name: str, *, key: str = "interface.face_set"
    ) -> tuple[tuple[int, int], ...]:
        """Faces of a named set; errors report the configuration *key* that named it."""
        if name not in self.face_sets:
            raise ConfigurationError(
                f"unknown face set {name!r} (available: {sorted(self.face_sets)})", key=key,
            )
        faces = self.face_sets[name]
        if not faces:
            raise ConfigurationError(f"face set {name!r} is empty", key=key)
        return faces

    def face_points(self, element: int, local_face: int) -> list[FacePoint]:
        """2x2 Gauss points of one boundary face with tangents and area weights."""
        ids = self.face_node_ids(element, local_face)
        xyz = self.nodes[ids]
        scale = max(np.ptp(xyz, axis=0).max(), 1e-300)
        points = []
        for n, dn, w in zip(QUAD_N, QUAD_DN, QUAD_WEIGHTS):
            tangents = dn.T @ xyz
            area = np.linalg.norm(np.cross(tangents[0], tangents[1]))
            if area <= 1e-14 * scale**2:
                raise GeometryError(f"degenerate face {local_face} of element {element}")
            points.append(FacePoint(
                nodes=ids, shape=n, dshape=dn, position=n @ xyz,
                tangents=tangents, weight=float(area * w),
            ))
        return points

    def volume(self) -> float:
        total = 0.0
        for e in range(self.n_elements):
            _, det_j = element_gradients(self.element_coordinates(e))
            total += float(det_j @ HEX_WEIGHTS)
        return total

    def translated(self, offset: Sequence[float]) -> Mesh:
        """Copy of the mesh moved rigidly by ``offset``."""
        return Mesh(self.nodes + np.asarray(offset, dtype=float), self.elements, self.face_sets)

    def validate(self) -> None:
        """Check connectivity, element orientation and that face sets are on the boundary."""
        if self.elements.size and (self.elements.min() < 0 or self.elements.max() >= self.n_nodes):
            raise GeometryError("element connectivity references a missing node")
        for e in range(self.n_elements):
            element_gradients(self.element_coordinates(e))

        counts: dict[tuple[int, ...], int] = {}
        for e in range(self.n_elements):
            for f in range(6):
                key = tuple(sorted(self.face_node_ids(e, f)))
                counts[key] = counts.get(key, 0) + 1
        for name, faces in self.face_sets.items():
            for e, f in faces:
                if counts[tuple(sorted(self.face_node_ids(e, f)))] != 1:
                    raise GeometryError(f"face ({e}, {f}) of set {name!r} is interior")


def build_block_mesh(
    dimensions: Sequence[float],
    divisions: Sequence[int],
    origin: Sequence[float] = (0.0, 0.0, 0.0),
) -> Mesh:
    """
    Structured hex8 mesh of the box ``origin + [0, dx] x [0, dy] x [0, dz]``.

    The six face sets are named by their outward normal:
    ``"-x"``, ``"+x"``, ``"-y"``, ``"+y"``, ``"-z"``, ``"+z"``.
    """
    dims = [float(d) for d in dimensions]
    divs = [int(n) for n in divisions]
    if len(dims) != 3 or len(divs) != 3:
        raise InvalidArgumentError("dimensions and divisions need three entries each")
    if min(dims) <= 0.0:
        raise InvalidArgumentError(f"block dimensions must be positive, got {dims}")
    if min(divs) < 1 or any(n != d for n, d in zip(divs, divisions)):
        raise InvalidArgumentError(f"block divisions must be positive integers, got {divisions}")

    nx, ny, nz = divs
    axes = [np.linspace(0.0, d, n + 1) + o for d, n, o in zip(dims, divs, origin)]
    z, y, x = np.meshgrid(axes[2], axes[1], axes[0], indexing="ij")
    nodes = np.column_stack([x.ravel(), y.ravel(), z.ravel()])

    def nid(i: int, j: int, k: int) -> int:
        return i + (nx + 1) * (j + (ny + 1) * k)

    elements = []
    face_sets: dict[str, list[tuple[int, int]]] = {
        "-z": [], "+z": [], "-y": [], "+x": [], "+y": [], "-x": [],
    }
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                e = len(elements)
                elements.append([
                    nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k), nid(i, j + 1, k),
                    nid(i, j, k + 1), nid(i + 1, j, k + 1), nid(i + 1, j + 1, k + 1),
                    nid(i, j + 1, k + 1),
                ])
                if k == 0:
                    face_sets["-z"].append((e, 0))
                if k == nz - 1:
                    face_sets["+z"].append((e, 1))
                if j == 0:
                    face_sets["-y"].append((e, 2))
                if i == nx - 1:
                    face_sets["+x"].append((e, 3))
                if j == ny - 1:
                    face_sets["+y"].append((e, 4))
                if i == 0:
                    face_sets["-x"].append((e, 5))

    mesh = Mesh(nodes, np.array(elements), {k: tuple(v) for k, v in face_sets.items()})
    logger.debug("block mesh: %d nodes, %d elements", mesh.n_nodes, mesh.n_elements)
    return mesh
