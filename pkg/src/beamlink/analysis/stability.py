"""
Well-Posedness Diagnostics

Discrete counterparts of the two stability properties of the coupled
problem:

  * kernel ellipticity  alpha = min over ker B of a(v, v) / ||v||_V^2
  * inf-sup constant    beta  = min over Q of sup_v b(q, v) / (||v||_V ||q||_Q)

plus the rigid-mode census of stiffness and KKT matrices, the inertia
tensor M of the solid about the interface centroid and the explicit
witness field u = mu + lambda x (x - x_G) that bounds the sup from below.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from beamlink.analysis.eigen import (
    DENSE_LIMIT,
    EIGSH_TOL,
    generalized_eigenvalue,
    symmetric_eigenvalues,
)
from beamlink.coupling.constraints import RANK_TOL
from beamlink.errors import (
    ExportError,
    InvalidArgumentError,
    RankDeficiencyError,
    WellPosednessError,
)
from beamlink.geometry.mesh import HEX_N, HEX_WEIGHTS, Mesh, element_gradients
from beamlink.saddle.solver import equilibrate, factorize
from beamlink.saddle.system import SaddleSystem
from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)

RIGID_TOL = 1e-8

CSV_COLUMNS = ("level", "N", "alpha", "beta", "rigid_unconstrained", "rigid_constrained")


# ===================================================================
# Report
# ===================================================================

@dataclass
class StabilityReport:
    level: int
    n_dofs: int
    alpha_kernel: float
    beta_infsup: float
    rigid_modes_unconstrained: int
    rigid_modes_constrained: int
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["elapsed_ms"] = round(self.elapsed_ms, 2)
        return out

    def csv_row(self) -> dict:
        return {
            "level": self.level,
            "N": self.n_dofs,
            "alpha": repr(self.alpha_kernel),
            "beta": repr(self.beta_infsup),
            "rigid_unconstrained": self.rigid_modes_unconstrained,
            "rigid_constrained": self.rigid_modes_constrained,
        }


def append_stability_csv(path: Union[str, Path], reports: Iterable[StabilityReport]) -> Path:
    """Append one row per report, writing the header when the file is new."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            if new:
                writer.writeheader()
            for report in reports:
                writer.writerow(report.csv_row())
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


# ===================================================================
# Kernel ellipticity
# ===================================================================

def kernel_basis(B: sp.spmatrix) -> np.ndarray:
    """
    Orthonormal basis of ker B from the full SVD of B.

    Raises
    ------
    RankDeficiencyError
        B does not have full row rank.
    """
    dense = B.toarray() if sp.issparse(B) else np.asarray(B, dtype=float)
    m, n = dense.shape
    if m == 0:
        return np.eye(n)
    U, s, Vt = np.linalg.svd(dense, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s[0] > 0.0 else 0
    if rank < m:
        raise RankDeficiencyError(
            f"constraint block has rank {rank} < {m}", row_space=U[:, rank:], rank=rank,
        )
    return Vt[m:].T


def kernel_ellipticity(system: SaddleSystem) -> float:
    """
    Smallest eigenvalue of K on ker B relative to the V-norm.

    With no constraint rows the whole space is the kernel. Values below zero
    are round-off and are clipped.
    """
    K, G = system.K, system.G_V
    n, m = system.n_primal, system.n_constraints
    if m == 0:
        value = generalized_eigenvalue(K, G)
    elif n <= DENSE_LIMIT:
        Z = kernel_basis(system.B)
        value = generalized_eigenvalue(Z.T @ (K @ Z), Z.T @ (G @ Z))
    else:
        if system.constraints.rank < m:
            kernel_basis(system.B)
        start = time.perf_counter()
        pencil = sp.block_diag([G, sp.csr_matrix((m, m))], format="csc")
        value = float(spla.eigsh(
            system.kkt_matrix().tocsc(), k=1, M=pencil, sigma=0.0, which="LM",
            tol=EIGSH_TOL, return_eigenvectors=False,
        )[0])
        live.record_eigen_solve(elapsed_ms=(time.perf_counter() - start) * 1000)
    return max(float(value), 0.0)


# ===================================================================
# Inf-sup constant
# ===================================================================

def schur_complement(system: SaddleSystem) -> np.ndarray:
    """S = B G_V^-1 B^T (dense, m x m)."""
    m = system.n_constraints
    if m == 0:
        return np.zeros((0, 0))
    try:
        solve_gram = spla.factorized(sp.csc_matrix(system.G_V))
    except RuntimeError as exc:
        raise WellPosednessError("V-norm Gram matrix is singular", zero_pivots=1) from exc
    Bt = system.B.T.toarray()
    X = np.column_stack([solve_gram(Bt[:, j]) for j in range(m)])
    S = system.B @ X
    return 0.5 * (S + S.T)


def inf_sup_constant(system: SaddleSystem, *, schur: Optional[np.ndarray] = None) -> float:
    """beta = sqrt(lambda_min(B G_V^-1 B^T, G_Q)); zero without constraint rows."""
    if system.n_constraints == 0 or system.B.nnz == 0:
        return 0.0
    S = schur_complement(system) if schur is None else schur
    start = time.perf_counter()
    smallest = la.eigh(S, system.G_Q, eigvals_only=True)[0]
    live.record_eigen_solve(elapsed_ms=(time.perf_counter() - start) * 1000)
    return float(np.sqrt(max(smallest, 0.0)))


# ===================================================================
# Rigid modes
# ===================================================================

def rigid_mode_census(K, tolerance: float = RIGID_TOL) -> int:
    """Number of eigenvalues of the symmetric matrix K below ``tolerance * max |eig|``."""
    n = K.shape[0]
    if n == 0:
        return 0
    if n > DENSE_LIMIT:
        return factorize(K, pivot_tol=tolerance).zero_pivots
    values = np.abs(symmetric_eigenvalues(K))
    return int(np.sum(values < tolerance * values.max()))


def kkt_zero_modes(system: SaddleSystem, tolerance: float = RIGID_TOL) -> int:
    """Rigid-mode census of the equilibrated KKT matrix."""
    scaled, _ = equilibrate(system.kkt_matrix(), system.n_primal)
    return rigid_mode_census(scaled, tolerance)


# ===================================================================
# Witness field
# ===================================================================

def compute_M(mesh: Mesh, x_G) -> np.ndarray:
    """M = int (|r|^2 I - r (x) r) dV with r = x - x_G."""
    x_G = np.asarray(x_G, dtype=float)
    M = np.zeros((3, 3))
    for e in range(mesh.n_elements):
        coords = mesh.element_coordinates(e)
        _, det_j = element_gradients(coords)
        r = HEX_N @ coords - x_G
        dv = det_j * HEX_WEIGHTS
        M += np.einsum("q,qi,qi->", dv, r, r) * np.eye(3) - np.einsum("q,qi,qj->ij", dv, r, r)
    return 0.5 * (M + M.T)


def _first_moment(mesh: Mesh, x_G: np.ndarray) -> np.ndarray:
    total = np.zeros(3)
    for e in range(mesh.n_elements):
        coords = mesh.element_coordinates(e)
        _, det_j = element_gradients(coords)
        total += (det_j * HEX_WEIGHTS) @ (HEX_N @ coords - x_G)
    return total


def witness_norm_squared(mesh: Mesh, x_G, characteristic_length: float, lam, mu) -> float:
    """
    Closed-form ||mu + lam x (x - x_G)||_U^2
    = |mu|^2 |B| + 2 mu . (lam x int r dV) + lam . M lam + 2 L^2 |B| |lam|^2.
    """
    x_G = np.asarray(x_G, dtype=float)
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    volume = mesh.volume()
    return float(
        mu @ mu * volume
        + 2.0 * mu @ np.cross(lam, _first_moment(mesh, x_G))
        + lam @ compute_M(mesh, x_G) @ lam
        + 2.0 * characteristic_length**2 * volume * (lam @ lam)
    )


def witness_field(system: SaddleSystem, lam, mu) -> np.ndarray:
    """Primal vector with u = mu + lam x (x - x_G) on the solid and zero beam DOFs."""
    if system.mesh is None or system.surface is None:
        raise InvalidArgumentError("the witness field needs the solid mesh and the interface")
    r = system.mesh.nodes - system.surface.centroid
    u = np.asarray(mu, dtype=float) + np.cross(np.asarray(lam, dtype=float), r)
    x = np.zeros(system.n_primal)
    x[system.layout.solid] = u.ravel()
    return x


@dataclass
class WitnessBound:
    numerator: float            # b(lam, mu; witness)
    expected_numerator: float   # lam . J lam + |S| |mu|^2 + mu . (lam x first moment of S)
    v_norm: float
    q_norm: float
    ratio: float                # numerator / (v_norm q_norm)
    certified_sup: float        # sqrt(q^T S q) / q_norm

    @property
    def slack(self) -> float:
        return self.certified_sup - self.ratio


def witness_infsup_bound(
    system: SaddleSystem, lam, mu, *, schur: Optional[np.ndarray] = None
) -> WitnessBound:
    """
    Evaluate b(q, v)/(||v||_V ||q||_Q) for the witness field of q = (lam, mu).

    The ratio never exceeds the exact supremum over V for the same q,
    ``certified_sup``, which in turn is never below beta.
    """
    if system.n_constraints != 6:
        raise InvalidArgumentError("the witness bound needs both constraint groups")
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    q = np.concatenate([lam, mu])
    v = witness_field(system, lam, mu)
    numerator = float(q @ (system.B @ v))
    v_norm = float(np.sqrt(v @ (system.G_V @ v)))
    q_norm = float(np.sqrt(q @ system.G_Q @ q))
    S = schur_complement(system) if schur is None else schur
    surface = system.surface
    expected = float(
        lam @ surface.J @ lam + surface.area * (mu @ mu)
        + mu @ np.cross(lam, surface.first_moment())
    )
    denom = v_norm * q_norm
    return WitnessBound(
        numerator=numerator,
        expected_numerator=expected,
        v_norm=v_norm,
        q_norm=q_norm,
        ratio=numerator / denom if denom > 0.0 else 0.0,
        certified_sup=float(np.sqrt(max(q @ S @ q, 0.0))) / q_norm if q_norm > 0.0 else 0.0,
    )


# ===================================================================
# Orchestration
# ===================================================================

def analyze_stability(system: SaddleSystem, level: int = 1) -> StabilityReport:
    """alpha, beta and both rigid-mode counts for one assembled system."""
    start = time.perf_counter()
    report = StabilityReport(
        level=level,
        n_dofs=system.size,
        alpha_kernel=kernel_ellipticity(system),
        beta_infsup=inf_sup_constant(system),
        rigid_modes_unconstrained=rigid_mode_census(system.K),
        rigid_modes_constrained=kkt_zero_modes(system),
    )
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info(
        "level %d: alpha=%.6g beta=%.6g rigid %d -> %d",
        level, report.alpha_kernel, report.beta_infsup,
        report.rigid_modes_unconstrained, report.rigid_modes_constrained,
    )
    return report
