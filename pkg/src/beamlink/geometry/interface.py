"""
Interface surface extraction.

Collects the face set tied to the beam, with covariant and dual tangent
bases at every Gauss point, its area, centroid and the tensor
J = int (2I - T^a (x) T_a) dA.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from beamlink.errors import GeometryError
from beamlink.geometry.mesh import Mesh

logger = logging.getLogger(__name__)

PLANARITY_TOL = 1e-8


@dataclass(frozen=True)
class InterfacePoint:
    """Quadrature data of the interface at one Gauss point."""
    nodes: np.ndarray       # (4,) global node ids of the owning face
    shape: np.ndarray       # (4,)
    dshape: np.ndarray      # (4, 2)
    position: np.ndarray    # (3,)
    tangents: np.ndarray    # (2, 3) T_1, T_2
    duals: np.ndarray       # (2, 3) T^1, T^2
    normal: np.ndarray      # (3,) unit outward normal
    weight: float           # dA


@dataclass(frozen=True)
class InterfaceSurface:
    """The coupled surface Sigma."""
    name: str
    faces: tuple[tuple[int, int], ...]
    quad_points: tuple[InterfacePoint, ...]
    area: float
    centroid: np.ndarray
    J: np.ndarray
    is_planar: bool

    @property
    def node_ids(self) -> np.ndarray:
        return np.unique(np.concatenate([p.nodes for p in self.quad_points]))

    @property
    def normal(self) -> np.ndarray:
        """Area-averaged unit normal."""
        n = sum(p.weight * p.normal for p in self.quad_points)
        return n / np.linalg.norm(n)

    @property
    def diameter(self) -> float:
        pts = np.array([p.position for p in self.quad_points])
        return float(np.linalg.norm(np.ptp(pts, axis=0)))

    def duality_error(self) -> float:
        """max |T^a . T_b - delta^a_b| over all Gauss points."""
        return max(
            float(np.abs(p.duals @ p.tangents.T - np.eye(2)).max()) for p in self.quad_points
        )

    def first_moment(self) -> np.ndarray:
        """int (x - x_G) dA, zero up to round-off."""
        return sum(p.weight * (p.position - self.centroid) for p in self.quad_points)

    def to_dict(self) -> dict:
        return {
            "face_set": self.name,
            "faces": len(self.faces),
            "area": self.area,
            "centroid": self.centroid.tolist(),
            "J": self.J.tolist(),
            "is_planar": self.is_planar,
        }


def extract_interface(mesh: Mesh, face_set: str) -> InterfaceSurface:
    """
    Build the interface surface from a named boundary face set.

    Raises
    ------
    ConfigurationError
        Unknown or empty face set.
    GeometryError
        Invalid connectivity, a face set off the boundary or a face with a singular metric.
    """
    mesh.validate()
    faces = mesh.face_set(face_set)

    points: list[InterfacePoint] = []
    for element, local_face in faces:
        for fp in mesh.face_points(element, local_face):
            metric = fp.tangents @ fp.tangents.T
            det = np.linalg.det(metric)
            if det <= 1e-28 * np.trace(metric) ** 2:
                raise GeometryError(
                    f"singular surface metric on face {local_face} of element {element}"
                )
            duals = np.linalg.solve(metric, fp.tangents)
            cross = np.cross(fp.tangents[0], fp.tangents[1])
            points.append(InterfacePoint(
                nodes=fp.nodes, shape=fp.shape, dshape=fp.dshape, position=fp.position,
                tangents=fp.tangents, duals=duals,
                normal=cross / np.linalg.norm(cross), weight=fp.weight,
            ))

    area = sum(p.weight for p in points)
    centroid = sum(p.weight * p.position for p in points) / area
    J = sum(p.weight * (2.0 * np.eye(3) - p.duals.T @ p.tangents) for p in points)
    J = 0.5 * (J + J.T)

    n0 = points[0].normal
    is_planar = all(np.linalg.norm(np.cross(p.normal, n0)) < PLANARITY_TOL for p in points)
    if not is_planar:
        logger.warning(
            "interface %r is not planar; the rotation constraint uses the general "
            "dual-basis form", face_set,
        )

    surface = InterfaceSurface(
        name=face_set, faces=tuple(faces), quad_points=tuple(points),
        area=float(area), centroid=np.asarray(centroid), J=J, is_planar=is_planar,
    )
    logger.debug("interface %r: %d faces, area %.6g", face_set, len(faces), area)
    return surface
