"""
Scenario runner.

Builds the coupled model described by a ``ScenarioConfig`` at every
refinement level, solves and analyzes it as requested, writes the
artifacts and runs the invariant checks. Level ``k`` uses the configured
solid divisions and beam element count multiplied by ``2**(k-1)``.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from beamlink.analysis.stability import StabilityReport, analyze_stability, append_stability_csv
from beamlink.checks.executor import CheckReport, check_refinement, check_scenario, empty_report
from beamlink.checks.rules import CheckContext, Finding, Severity
from beamlink.config import ScenarioConfig
from beamlink.errors import (
    BeamlinkError,
    ConfigurationError,
    ExportError,
    GeometryError,
    RankDeficiencyError,
    WellPosednessError,
)
from beamlink.geometry.beam_model import BeamModel, build_beam
from beamlink.geometry.interface import InterfaceSurface, extract_interface
from beamlink.geometry.mesh import Mesh, build_block_mesh
from beamlink.saddle.export import export_system
from beamlink.saddle.solver import SolveReport, solve
from beamlink.saddle.system import SaddleSystem, SystemLoads, assemble_system

logger = logging.getLogger(__name__)


# ===================================================================
# Model construction
# ===================================================================

@dataclass
class Scenario:
    """Geometry and physics of one refinement level."""
    level: int
    mesh: Mesh
    surface: InterfaceSurface
    beam: BeamModel
    config: ScenarioConfig

    def assemble(self) -> SaddleSystem:
        cfg = self.config
        return assemble_system(
            self.mesh,
            self.beam,
            self.surface,
            cfg.solid.material.to_material(),
            SystemLoads(cfg.loads.to_solid_loads(), cfg.loads.to_beam_loads()),
            cfg.characteristic_length,
            workers=cfg.analysis.parallel_workers,
        )


def build_scenario(config: ScenarioConfig, level: int = 1) -> Scenario:
    """
    Mesh, interface and beam for refinement ``level`` (1-based).

    Raises
    ------
    ConfigurationError
        Unknown or empty interface face set, degenerate interface, unknown traction
        face set.
    """
    factor = 2 ** (level - 1)
    solid = config.solid
    mesh = build_block_mesh(
        solid.dimensions, tuple(d * factor for d in solid.divisions), solid.origin
    )
    for traction in config.loads.tractions:
        mesh.face_set(traction.face_set, key="loads.tractions")
    try:
        surface = extract_interface(mesh, config.interface.face_set)
    except GeometryError as exc:
        raise ConfigurationError(str(exc), key="interface.face_set") from exc
    if not surface.area > 0.0:
        raise ConfigurationError("interface has zero area", key="interface.face_set")

    bc = config.beam
    direction = np.asarray(bc.axis_direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    origin = bc.axis_origin
    if origin is None:
        origin = surface.centroid - bc.length * direction
    beam = build_beam(
        bc.length,
        bc.elements * factor,
        bc.section.to_section(),
        axis_origin=origin,
        axis_direction=direction,
        section_axis=bc.section_axis,
    )
    return Scenario(level=level, mesh=mesh, surface=surface, beam=beam, config=config)


# ===================================================================
# Run result
# ===================================================================

@dataclass
class LevelResult:
    level: int
    size: int = 0
    solve: Optional[SolveReport] = None
    stability: Optional[StabilityReport] = None
    artifacts: list[Path] = field(default_factory=list)
    checks: CheckReport = field(default_factory=empty_report)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "size": self.size,
            "solve": self.solve.to_dict() if self.solve else None,
            "stability": self.stability.to_dict() if self.stability else None,
            "artifacts": [str(p) for p in self.artifacts],
            "checks": self.checks.to_dict(),
        }


@dataclass
class RunResult:
    levels: list[LevelResult]
    checks: CheckReport
    artifacts: list[Path]
    elapsed_ms: float = 0.0

    @property
    def exit_code(self) -> int:
        return 0 if self.checks.is_valid else 1

    @property
    def failures(self) -> list[dict]:
        return [f.to_dict() for f in self.checks.errors]

    def to_dict(self) -> dict:
        return {
            "exit_code": self.exit_code,
            "levels": [lv.to_dict() for lv in self.levels],
            "checks": self.checks.to_dict(),
            "artifacts": [str(p) for p in self.artifacts],
            "elapsed_ms": round(self.elapsed_ms, 2),
        }


def _failure(
    rule_id: str, level: int, exc: BeamlinkError, hint: Optional[str] = None
) -> CheckReport:
    finding = Finding(rule_id=rule_id, message=str(exc), severity=Severity.ERROR,
                      level=level, fix_hint=hint)
    return CheckReport(is_valid=False, findings=[finding], errors=[finding],
                       warnings=[], passed=[])


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


# ===================================================================
# Orchestration
# ===================================================================

def run_level(config: ScenarioConfig, level: int, out_dir: Path) -> LevelResult:
    """Build, assemble, solve, analyze, export and check one refinement level."""
    result = LevelResult(level=level)
    scenario = build_scenario(config, level)
    try:
        system = scenario.assemble()
    except RankDeficiencyError as exc:
        result.checks = _failure("constraint_rank", level, exc,
                                 "the interface cannot carry six independent constraints")
        return result
    result.size = system.size
    analysis = config.analysis

    if analysis.export:
        exported = export_system(system, out_dir / f"system_level{level}.mtx",
                                 include_gram=analysis.include_gram)
        result.artifacts.extend(exported.paths)

    if analysis.solve:
        try:
            result.solve = solve(system)
        except WellPosednessError as exc:
            result.checks = _failure("kkt_nonsingular", level, exc)
            return result
        result.artifacts.append(
            _write_text(out_dir / f"solve_report_level{level}.txt", result.solve.to_record())
        )

    if analysis.stability:
        result.stability = analyze_stability(system, level)

    result.checks = check_scenario(CheckContext(
        level=level, system=system, solve=result.solve, stability=result.stability,
    ))
    return result


def run(config: ScenarioConfig) -> RunResult:
    """
    Execute every refinement level of *config*.

    The stability CSV is rewritten on each run so repeated runs of one
    scenario produce identical files. ``failures.json`` always lists the
    ERROR findings (empty on success).

    Raises
    ------
    ConfigurationError
        The scenario cannot be built (before any assembly).
    ExportError
        An artifact could not be written.
    """
    start = time.perf_counter()
    out_dir = Path(config.output.directory)
    # fail on a bad interface or misplaced beam before any level is assembled
    build_scenario(config, 1)

    levels: list[LevelResult] = []
    for level in range(1, config.analysis.refinement_levels + 1):
        logger.info("refinement level %d of %d", level, config.analysis.refinement_levels)
        levels.append(run_level(config, level, out_dir))

    checks = empty_report()
    for lv in levels:
        checks = checks.merged(lv.checks)
    history = [lv.stability for lv in levels if lv.stability is not None]
    if len(history) >= 2:
        checks = checks.merged(check_refinement(history))

    artifacts = [p for lv in levels for p in lv.artifacts]
    if history:
        csv_path = out_dir / config.output.stability_csv
        try:
            csv_path.unlink(missing_ok=True)
        except OSError as exc:
            raise ExportError(f"cannot replace {csv_path}: {exc}") from exc
        artifacts.append(append_stability_csv(csv_path, history))

    failures = [f.to_dict() for f in checks.errors]
    artifacts.append(_write_text(out_dir / config.output.failures,
                                 json.dumps(failures, indent=2) + "\n"))

    result = RunResult(levels=levels, checks=checks, artifacts=artifacts,
                       elapsed_ms=(time.perf_counter() - start) * 1000)
    logger.info("run finished with exit code %d (%d errors, %d warnings)",
                result.exit_code, len(checks.errors), len(checks.warnings))
    return result
