"""
Extreme generalized eigenvalues of symmetric pencils.
"""

from __future__ import annotations

import logging
import time

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)

DENSE_LIMIT = 3000
EIGSH_TOL = 1e-8


def _dense(A) -> np.ndarray:
    return A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)


def generalized_eigenvalue(A, M, *, largest: bool = False) -> float:
    """
    Smallest (or largest) eigenvalue of ``A v = lambda M v`` with M SPD.

    Dense LAPACK up to ``DENSE_LIMIT``; otherwise ARPACK, in shift-invert
    mode around a small negative shift for the smallest eigenvalue.
    """
    start = time.perf_counter()
    n = A.shape[0]
    if n == 0:
        return 0.0
    if n <= DENSE_LIMIT:
        index = n - 1 if largest else 0
        value = la.eigh(_dense(A), _dense(M), subset_by_index=[index, index], eigvals_only=True)[0]
    else:
        A = sp.csc_matrix(A)
        M = sp.csc_matrix(M)
        if largest:
            value = spla.eigsh(A, k=1, M=M, which="LA", tol=EIGSH_TOL,
                               return_eigenvectors=False)[0]
        else:
            ratio = np.abs(A.diagonal()).max() / np.abs(M.diagonal()).max()
            value = spla.eigsh(A, k=1, M=M, sigma=-1e-8 * ratio, which="LM", tol=EIGSH_TOL,
                               return_eigenvectors=False)[0]
    live.record_eigen_solve(elapsed_ms=(time.perf_counter() - start) * 1000)
    return float(value)


def symmetric_eigenvalues(A) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending."""
    start = time.perf_counter()
    values = la.eigvalsh(_dense(A))
    live.record_eigen_solve(elapsed_ms=(time.perf_counter() - start) * 1000)
    return values
