"""
Direct solution of the coupled mixed system.

The KKT matrix is symmetrically equilibrated (unit primal diagonal, unit
constraint rows) before factorization so that pivot tolerances do not
depend on units. Up to ``DENSE_LIMIT`` unknowns a dense Bunch-Kaufman
LDL^T factorization gives the exact inertia; larger systems use a sparse
LU and count vanishing pivots of U.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from beamlink.beam.section import BeamState
from beamlink.beam.timoshenko import assemble_beam, beam_load_vector, beam_state
from beamlink.coupling.constraints import MultiplierState
from beamlink.errors import InvalidArgumentError, WellPosednessError
from beamlink.saddle.system import SaddleSystem
from beamlink.solid.elasticity import recover_stresses, von_mises
from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)

DENSE_LIMIT = 3000
PIVOT_TOL = 1e-10


# ===================================================================
# Equilibration and factorization
# ===================================================================

def equilibrate(
    matrix: sp.spmatrix, n_primal: Optional[int] = None
) -> tuple[sp.csr_matrix, np.ndarray]:
    """
    Symmetric diagonal scaling ``S A S``.

    Primal rows get ``1/sqrt(A_ii)``; the trailing constraint rows (those
    past ``n_primal``) are scaled to unit Euclidean norm after the primal
    scaling. Returns the scaled matrix and the scaling vector.
    """
    A = sp.csr_matrix(matrix)
    n = A.shape[0]
    n_primal = n if n_primal is None else n_primal
    diag = np.abs(A.diagonal()[:n_primal])
    s = np.ones(n)
    positive = diag > 0.0
    s[:n_primal][positive] = 1.0 / np.sqrt(diag[positive])
    if n_primal < n:
        rows = A[n_primal:, :n_primal] @ sp.diags(s[:n_primal])
        norms = np.sqrt(np.asarray(rows.multiply(rows).sum(axis=1)).ravel())
        nonzero = norms > 0.0
        s[n_primal:][nonzero] = 1.0 / norms[nonzero]
    S = sp.diags(s)
    return (S @ A @ S).tocsr(), s


def _block_pivots(d: np.ndarray) -> np.ndarray:
    """Eigenvalues of the 1x1 / 2x2 diagonal blocks of an LDL^T factor."""
    n = d.shape[0]
    out = []
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            out.extend(np.linalg.eigvalsh(d[i:i + 2, i:i + 2]))
            i += 2
        else:
            out.append(d[i, i])
            i += 1
    return np.asarray(out)


@dataclass
class Factorization:
    """Factorization of an (already equilibrated) symmetric matrix."""
    method: str
    size: int
    zero_pivots: int
    negative_pivots: Optional[int]
    _factors: tuple
    elapsed_ms: float = 0.0

    @property
    def is_singular(self) -> bool:
        return self.zero_pivots > 0

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.is_singular:
            raise WellPosednessError(
                f"matrix is singular ({self.zero_pivots} zero pivots)",
                zero_pivots=self.zero_pivots,
            )
        if self.method == "dense-ldl":
            tri, d, perm = self._factors
            y = la.solve_triangular(tri, rhs[perm], lower=True, unit_diagonal=True)
            band = np.zeros((3, self.size))
            band[0, 1:] = np.diag(d, 1)
            band[1] = np.diag(d)
            band[2, :-1] = np.diag(d, -1)
            z = la.solve_banded((1, 1), band, y)
            w = la.solve_triangular(tri.T, z, lower=False, unit_diagonal=True)
            x = np.empty_like(w)
            x[perm] = w
            return x
        (lu,) = self._factors
        return lu.solve(rhs)


def factorize(matrix: sp.spmatrix, *, pivot_tol: float = PIVOT_TOL) -> Factorization:
    """
    Factorize a symmetric matrix and count its (near-)zero pivots.

    A pivot counts as zero when its magnitude is below ``pivot_tol`` times
    the largest pivot. Callers pass an equilibrated matrix.
    """
    start = time.perf_counter()
    A = sp.csr_matrix(matrix)
    n = A.shape[0]
    if A.shape != (n, n):
        raise InvalidArgumentError(f"matrix must be square, got {A.shape}")

    if n <= DENSE_LIMIT:
        lu, d, perm = la.ldl(A.toarray(), lower=True)
        pivots = _block_pivots(d)
        scale = np.abs(pivots).max() if n else 1.0
        zero = int(np.sum(np.abs(pivots) < pivot_tol * scale))
        negative = int(np.sum(pivots < -pivot_tol * scale))
        fac = Factorization("dense-ldl", n, zero, negative, (lu[perm], d, perm))
    else:
        try:
            lu = spla.splu(A.tocsc())
            u_diag = np.abs(lu.U.diagonal())
            zero = int(np.sum(u_diag < pivot_tol * u_diag.max()))
        except RuntimeError:
            lu, zero = None, 1
        fac = Factorization("sparse-lu", n, zero, None, (lu,))

    fac.elapsed_ms = (time.perf_counter() - start) * 1000
    live.record_factorization(zero_pivots=fac.zero_pivots, elapsed_ms=fac.elapsed_ms)
    logger.debug(
        "%s factorization of %d x %d: %d zero pivots, %.1f ms",
        fac.method, n, n, fac.zero_pivots, fac.elapsed_ms,
    )
    return fac


# ===================================================================
# Solve report
# ===================================================================

@dataclass
class SolverStats:
    method: str
    size: int
    zero_pivots: int
    negative_pivots: Optional[int]
    residual_norm: float
    elapsed_ms: float

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "size": self.size,
            "zero_pivots": self.zero_pivots,
            "negative_pivots": self.negative_pivots,
            "residual_norm": self.residual_norm,
            "elapsed_ms": round(self.elapsed_ms, 2),
        }


@dataclass
class SolveReport:
    """Solution of the mixed problem and its consistency diagnostics."""
    x: np.ndarray                       # primal vector (solid, beam)
    u: np.ndarray                       # (n_nodes, 3) solid displacements
    beam: Optional[BeamState]
    multipliers: Optional[MultiplierState]
    multiplier_vector: np.ndarray
    constraint_residual: np.ndarray
    strain_energy: float                # a(x, x)
    external_work: float                # f(x)
    stats: SolverStats
    max_von_mises: Optional[float] = None

    @property
    def energy_gap(self) -> float:
        return abs(self.strain_energy - self.external_work)

    @property
    def tip_displacement(self) -> np.ndarray:
        return self.beam.tip_displacement if self.beam is not None else np.zeros(3)

    @property
    def tip_rotation(self) -> np.ndarray:
        return self.beam.tip_rotation if self.beam is not None else np.zeros(3)

    def to_dict(self) -> dict:
        return {
            "tip_displacement": self.tip_displacement.tolist(),
            "tip_rotation": self.tip_rotation.tolist(),
            "multipliers": self.multipliers.to_dict() if self.multipliers else None,
            "constraint_residual": self.constraint_residual.tolist(),
            "constraint_residual_norm": float(np.linalg.norm(self.constraint_residual)),
            "strain_energy": self.strain_energy,
            "external_work": self.external_work,
            "energy_gap": self.energy_gap,
            "max_solid_displacement": float(np.abs(self.u).max()) if self.u.size else 0.0,
            "max_von_mises": self.max_von_mises,
            "solver": self.stats.to_dict(),
        }

    def to_record(self) -> str:
        """Flat ``key=value`` text, one entry per line."""
        lines = []

        def emit(prefix: str, value) -> None:
            if isinstance(value, dict):
                for k, v in value.items():
                    emit(f"{prefix}.{k}" if prefix else k, v)
            elif isinstance(value, list):
                emit(prefix, " ".join(repr(float(v)) for v in np.ravel(value)))
            elif isinstance(value, float):
                lines.append(f"{prefix}={value!r}")
            else:
                lines.append(f"{prefix}={value}")

        emit("", self.to_dict())
        return "\n".join(lines) + "\n"


def solve(system: SaddleSystem) -> SolveReport:
    """
    Solve the KKT system with a symmetric indefinite direct factorization.

    Raises
    ------
    WellPosednessError
        The equilibrated KKT matrix has vanishing pivots.
    """
    start = time.perf_counter()
    A = system.kkt_matrix()
    b = system.rhs()
    scaled, s = equilibrate(A, system.n_primal)
    fac = factorize(scaled)
    if fac.is_singular:
        raise WellPosednessError(
            f"KKT matrix of size {system.size} is singular: {fac.zero_pivots} zero pivots",
            zero_pivots=fac.zero_pivots,
        )
    sol = s * fac.solve(s * b)
    residual = float(np.linalg.norm(A @ sol - b))

    layout = system.layout
    x = sol[: system.n_primal]
    m = sol[system.n_primal:]
    u = x[layout.solid].reshape(-1, 3)
    state = beam_state(system.beam, x[layout.beam]) if system.beam is not None else None
    multipliers = MultiplierState.from_vector(m) if len(m) == 6 else None
    stress = None
    if system.mesh is not None and system.material is not None:
        stress = float(von_mises(recover_stresses(system.mesh, u, system.material)).max())

    elapsed = (time.perf_counter() - start) * 1000
    report = SolveReport(
        x=x,
        u=u,
        beam=state,
        multipliers=multipliers,
        multiplier_vector=m,
        constraint_residual=system.B @ x,
        strain_energy=float(x @ (system.K @ x)),
        external_work=float(system.f @ x),
        stats=SolverStats(
            method=fac.method, size=system.size, zero_pivots=fac.zero_pivots,
            negative_pivots=fac.negative_pivots, residual_norm=residual, elapsed_ms=elapsed,
        ),
        max_von_mises=stress,
    )
    live.record_solve(dofs=system.size, elapsed_ms=elapsed)
    logger.info(
        "solved %d unknowns (%s): residual %.2e, energy gap %.2e",
        system.size, fac.method, residual, report.energy_gap,
    )
    return report


# ===================================================================
# Lagrangian and resultants
# ===================================================================

def lagrangian_value(system: SaddleSystem, x: np.ndarray, multipliers: np.ndarray) -> float:
    """1/2 x^T K x - f^T x + m^T B x."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(multipliers, dtype=float)
    if x.shape != (system.n_primal,) or m.shape != (system.n_constraints,):
        raise InvalidArgumentError(
            f"expected primal {system.n_primal} and multipliers {system.n_constraints}, "
            f"got {x.shape} and {m.shape}"
        )
    return float(0.5 * x @ (system.K @ x) - system.f @ x + m @ (system.B @ x))


def kkt_residual(system: SaddleSystem, x: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
    """Gradient of the Lagrangian with respect to (x, m)."""
    return np.concatenate([
        system.K @ x - system.f + system.B.T @ multipliers,
        system.B @ x,
    ])


@dataclass
class InterfaceResultants:
    """Net force and moment about x_G that the beam exerts on the solid."""
    force: np.ndarray
    moment: np.ndarray
    expected_force: np.ndarray      # -|S| mu
    expected_moment: np.ndarray     # -J lambda

    @property
    def discrepancy(self) -> float:
        scale = max(np.linalg.norm(self.expected_force), np.linalg.norm(self.expected_moment),
                    np.finfo(float).tiny)
        return float(max(np.linalg.norm(self.force - self.expected_force),
                         np.linalg.norm(self.moment - self.expected_moment)) / scale)


def interface_resultants(system: SaddleSystem, report: SolveReport) -> InterfaceResultants:
    """Sum K_B u - f_B over the interface nodes and compare with the multipliers."""
    if system.mesh is None or system.surface is None or report.multipliers is None:
        raise InvalidArgumentError("interface resultants need a fully coupled system")
    layout = system.layout
    solid = layout.solid
    nodal = (system.K[solid, solid] @ report.x[solid] - system.f[solid]).reshape(-1, 3)
    ids = system.surface.node_ids
    arms = system.mesh.nodes[ids] - system.surface.centroid
    return InterfaceResultants(
        force=nodal[ids].sum(axis=0),
        moment=np.cross(arms, nodal[ids]).sum(axis=0),
        expected_force=-system.surface.area * report.multipliers.mu,
        expected_moment=-system.surface.J @ report.multipliers.lam,
    )


@dataclass
class ClampReactions:
    """Support reactions at s = 0 against the applied loads, moments about the clamp."""
    force: np.ndarray
    moment: np.ndarray
    applied_force: np.ndarray
    applied_moment: np.ndarray

    @property
    def imbalance(self) -> float:
        scale = max(np.linalg.norm(self.applied_force), np.linalg.norm(self.applied_moment),
                    np.linalg.norm(self.force), np.linalg.norm(self.moment),
                    np.finfo(float).tiny)
        return float(max(np.linalg.norm(self.force + self.applied_force),
                         np.linalg.norm(self.moment + self.applied_moment)) / scale)


def clamp_reactions(system: SaddleSystem, report: SolveReport) -> ClampReactions:
    """
    Reactions from the free-free beam equations at the clamped node, and
    the resultant of every applied load of both bodies about the clamp.
    """
    beam = system.beam
    if beam is None or system.mesh is None or system.loads is None:
        raise InvalidArgumentError("clamp reactions need an assembled coupled system")
    full_x = np.concatenate([np.zeros(6), report.x[system.layout.beam]])
    K_full = assemble_beam(beam, clamped=False)
    f_full = beam_load_vector(beam, system.loads.beam, clamped=False)
    reaction = (K_full @ full_x - f_full)[:6]

    origin = beam.node_positions[0]
    beam_f = f_full.reshape(-1, 6)
    solid_f = system.f[system.layout.solid].reshape(-1, 3)
    applied_force = beam_f[:, :3].sum(axis=0) + solid_f.sum(axis=0)
    applied_moment = (
        np.cross(beam.node_positions - origin, beam_f[:, :3]).sum(axis=0)
        + beam_f[:, 3:].sum(axis=0)
        + np.cross(system.mesh.nodes - origin, solid_f).sum(axis=0)
    )
    return ClampReactions(
        force=reaction[:3], moment=reaction[3:],
        applied_force=applied_force, applied_moment=applied_moment,
    )
