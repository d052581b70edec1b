"""
MatrixMarket export of assembled systems.

``export_system(system, "out/level1.mtx")`` writes

    out/level1.mtx          KKT matrix, coordinate real symmetric
    out/level1.rhs.mtx      right-hand side as an (N + 6) x 1 coordinate matrix
    out/level1.gram_v.mtx   V-norm Gram (optional)
    out/level1.gram_q.mtx   Q-norm Gram (optional)

Values are written with 17 fractional digits so the read-back is exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from beamlink.errors import ExportError, InvalidArgumentError
from beamlink.saddle.system import SaddleSystem

logger = logging.getLogger(__name__)

FORMATS = ("mtx", "matrix-market")
PRECISION = 17


@dataclass
class ExportedSystem:
    """Paths of the files written (or read) for one system."""
    kkt: Path
    rhs: Path
    gram_v: Optional[Path] = None
    gram_q: Optional[Path] = None

    @property
    def paths(self) -> list[Path]:
        return [p for p in (self.kkt, self.rhs, self.gram_v, self.gram_q) if p is not None]


@dataclass
class LoadedSystem:
    kkt: sp.csr_matrix
    rhs: np.ndarray
    grams: dict[str, sp.csr_matrix] = field(default_factory=dict)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}.{suffix}.mtx")


def _write(path: Path, matrix, symmetry: str, comment: str) -> None:
    try:
        scipy.io.mmwrite(
            str(path), sp.coo_matrix(matrix), comment=comment,
            field="real", precision=PRECISION, symmetry=symmetry,
        )
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc


def export_system(
    system: SaddleSystem,
    path: Union[str, Path],
    format: str = "mtx",
    *,
    include_gram: bool = False,
) -> ExportedSystem:
    """Write the KKT matrix and right-hand side (and optionally the Gram matrices)."""
    if format not in FORMATS:
        raise InvalidArgumentError(f"unsupported export format {format!r}; use one of {FORMATS}")
    path = Path(path)
    if path.suffix != ".mtx":
        path = path.with_suffix(".mtx")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create {path.parent}: {exc}") from exc

    layout = system.layout.to_dict()
    out = ExportedSystem(kkt=path, rhs=_sibling(path, "rhs"))
    _write(out.kkt, system.kkt_matrix(), "symmetric",
           f"beamlink KKT matrix: primal {system.n_primal}, multipliers {system.n_constraints}, "
           f"layout {layout}")
    _write(out.rhs, system.rhs().reshape(-1, 1), "general", "beamlink right-hand side")
    if include_gram:
        out.gram_v = _sibling(path, "gram_v")
        out.gram_q = _sibling(path, "gram_q")
        _write(out.gram_v, system.G_V, "symmetric", "beamlink V-norm Gram matrix")
        _write(out.gram_q, system.G_Q, "symmetric", "beamlink Q-norm Gram matrix")
    logger.info("exported %d-unknown system to %s", system.size, path)
    return out


def read_system(path: Union[str, Path]) -> LoadedSystem:
    """Read back what :func:`export_system` wrote."""
    path = Path(path)
    try:
        kkt = sp.csr_matrix(scipy.io.mmread(str(path)))
        rhs = np.asarray(sp.csr_matrix(scipy.io.mmread(str(_sibling(path, "rhs")))).todense())
        grams = {}
        for name in ("gram_v", "gram_q"):
            p = _sibling(path, name)
            if p.exists():
                grams[name] = sp.csr_matrix(scipy.io.mmread(str(p)))
    except (OSError, ValueError) as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    return LoadedSystem(kkt=kkt, rhs=rhs.ravel(), grams=grams)
