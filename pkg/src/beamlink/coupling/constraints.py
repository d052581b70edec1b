"""
Interface Constraints

Rows of the 6 x N block B tying the beam tip to the solid surface Sigma:

    rotation rows (lambda):      int_S T^a x u_,a dA - J theta_*  = 0
    displacement rows (mu):      int_S u dA         - |S| w_*     = 0

Both are kept in integrated form, so a multiplier pair (lambda, mu) acts on
the solid as the moment -J lambda about x_G and the force -|S| mu.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from beamlink.beam.timoshenko import skew
from beamlink.dofs import DofLayout
from beamlink.errors import (
    InvalidArgumentError,
    RankDeficiencyError,
    UnsupportedConfigurationError,
)
from beamlink.geometry.interface import InterfaceSurface
from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12

ROTATION_ROWS = slice(0, 3)
DISPLACEMENT_ROWS = slice(3, 6)


# ===================================================================
# Data model
# ===================================================================

@dataclass(frozen=True)
class MultiplierState:
    """Interface multipliers: lam pairs with the rotation rows, mu with the displacement rows."""
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        for name in ("lam", "mu"):
            v = np.array(getattr(self, name), dtype=float).reshape(-1)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise InvalidArgumentError(f"multiplier {name} must be a finite 3-vector")
            object.__setattr__(self, name, v)

    @classmethod
    def from_vector(cls, values: np.ndarray) -> MultiplierState:
        values = np.asarray(values, dtype=float)
        return cls(lam=values[:3], mu=values[3:6])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.lam, self.mu])

    def to_dict(self) -> dict:
        return {"lambda": self.lam.tolist(), "mu": self.mu.tolist()}


@dataclass(frozen=True)
class ConstraintBlock:
    """The constraint matrix with its column layout and the kept row groups."""
    B: sp.csr_matrix
    layout: DofLayout
    rows: tuple[int, ...] = (0, 1, 2, 3, 4, 5)

    @property
    def n_rows(self) -> int:
        return self.B.shape[0]

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.B @ np.asarray(x, dtype=float)[: self.layout.n_primal]

    def singular_values(self) -> np.ndarray:
        if self.n_rows == 0:
            return np.zeros(0)
        return np.linalg.svd(self.B.toarray(), compute_uv=False)

    @property
    def rank(self) -> int:
        s = self.singular_values()
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > RANK_TOL * s[0]))

    def select(self, *, rotation: bool = True, displacement: bool = True) -> ConstraintBlock:
        """Keep only the requested row groups (for necessity studies)."""
        keep = [r for r in self.rows if (r < 3 and rotation) or (r >= 3 and displacement)]
        local = [self.rows.index(r) for r in keep]
        B = self.B[local, :] if local else sp.csr_matrix((0, self.B.shape[1]))
        return ConstraintBlock(B=B.tocsr(), layout=self.layout, rows=tuple(keep))


# ===================================================================
# Surface integrals
# ===================================================================

def _nodal_field(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u.reshape(-1, 3)


def surface_integrals(surface: InterfaceSurface, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(int u dA, int T^a x u_,a dA) of a solid nodal field over Sigma."""
    u = _nodal_field(u)
    total = np.zeros(3)
    curl = np.zeros(3)
    for p in surface.quad_points:
        ue = u[p.nodes]
        total += p.weight * (p.shape @ ue)
        du = p.dshape.T @ ue                 # (2, 3): u_,alpha
        curl += p.weight * np.cross(p.duals, du).sum(axis=0)
    return total, curl


def rotation_average(surface: InterfaceSurface, u: np.ndarray) -> np.ndarray:
    """Tip rotation that satisfies the rotation constraint for the solid field ``u``."""
    _, curl = surface_integrals(surface, u)
    return np.linalg.solve(surface.J, curl)


def displacement_average(surface: InterfaceSurface, u: np.ndarray) -> np.ndarray:
    total, _ = surface_integrals(surface, u)
    return total / surface.area


def skew_average_check(
    surface: InterfaceSurface, u: np.ndarray, theta_tip: np.ndarray
) -> float:
    """
    Discrepancy between the averaged skew part of the surface gradient and
    the averaged skew part of theta_* restricted to the tangent plane.

    Builds ``grad u = u_,a (x) T^a`` and ``skew(theta) P`` explicitly and
    returns the norm of the axial vector of
    ``int skew[grad u] dA - int skew[skew(theta) P] dA``. Vanishes whenever
    ``(u, theta_tip)`` satisfies the rotation constraint.

    Raises
    ------
    UnsupportedConfigurationError
        Sigma is not planar.
    """
    if not surface.is_planar:
        raise UnsupportedConfigurationError(
            f"skew-average check requires a planar interface, {surface.name!r} is curved"
        )
    u = _nodal_field(u)
    theta_hat = skew(np.asarray(theta_tip, dtype=float))
    diff = np.zeros((3, 3))
    for p in surface.quad_points:
        du = p.dshape.T @ u[p.nodes]
        grad = du.T @ p.duals                    # sum_a u_,a (x) T^a
        projector = p.tangents.T @ p.duals       # sum_a T_a (x) T^a
        diff += p.weight * (grad - theta_hat @ projector)
    sk = 0.5 * (diff - diff.T)
    axial = np.array([sk[2, 1], sk[0, 2], sk[1, 0]])
    return float(np.linalg.norm(axial))


# ===================================================================
# Rows of B
# ===================================================================

def displacement_constraint_rows(surface: InterfaceSurface, layout: DofLayout) -> sp.csr_matrix:
    """3 x N rows of int_S u dA - |S| w_*."""
    rows, cols, vals = [], [], []
    for p in surface.quad_points:
        for a, node in enumerate(p.nodes):
            for i in range(3):
                rows.append(i)
                cols.append(3 * node + i)
                vals.append(p.weight * p.shape[a])
    tip = layout.tip_w.start
    for i in range(3):
        rows.append(i)
        cols.append(tip + i)
        vals.append(-surface.area)
    return sp.coo_matrix((vals, (rows, cols)), shape=(3, layout.n_primal)).tocsr()


def rotation_constraint_rows(surface: InterfaceSurface, layout: DofLayout) -> sp.csr_matrix:
    """3 x N rows of int_S T^a x u_,a dA - J theta_*."""
    rows, cols, vals = [], [], []
    for p in surface.quad_points:
        grads = p.dshape @ p.duals           # (4, 3): sum_a dN/dxi^a T^a
        for a, node in enumerate(p.nodes):
            block = p.weight * skew(grads[a])
            for i in range(3):
                for j in range(3):
                    rows.append(i)
                    cols.append(3 * node + j)
                    vals.append(block[i, j])
    tip = layout.tip_theta.start
    for i in range(3):
        for j in range(3):
            rows.append(i)
            cols.append(tip + j)
            vals.append(-surface.J[i, j])
    return sp.coo_matrix((vals, (rows, cols)), shape=(3, layout.n_primal)).tocsr()


def assemble_B(
    surface: InterfaceSurface, layout: DofLayout, *, check_rank: bool = True
) -> ConstraintBlock:
    """
    Stack the rotation rows over the displacement rows.

    Raises
    ------
    RankDeficiencyError
        B has rank below 6; ``row_space`` holds the left singular vectors
        of the dependent row combinations.
    """
    start = time.perf_counter()
    B = sp.vstack([
        rotation_constraint_rows(surface, layout),
        displacement_constraint_rows(surface, layout),
    ]).tocsr()
    block = ConstraintBlock(B=B, layout=layout)
    if check_rank:
        U, s, _ = np.linalg.svd(B.toarray(), full_matrices=False)
        deficient = s <= RANK_TOL * max(s[0], np.finfo(float).tiny)
        if np.any(deficient):
            raise RankDeficiencyError(
                f"constraint block has rank {int(np.sum(~deficient))} < 6 "
                f"(singular values {np.array2string(s, precision=3)})",
                row_space=U[:, deficient], rank=int(np.sum(~deficient)),
            )
    live.record_assembly(
        kind="constraint", dofs=layout.size, elapsed_ms=(time.perf_counter() - start) * 1000
    )
    return block


def q_norm_gram(characteristic_length: float, rows: Optional[tuple[int, ...]] = None) -> np.ndarray:
    """diag(L^-2 I, I) for (lambda, mu), optionally restricted to kept rows."""
    L = characteristic_length
    if not L > 0.0:
        raise InvalidArgumentError(f"characteristic length must be positive, got {L}")
    G = np.diag([L**-2] * 3 + [1.0] * 3)
    if rows is not None:
        G = G[np.ix_(rows, rows)]
    return G
