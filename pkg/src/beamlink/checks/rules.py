"""
Invariant Rules

Declarative checks over an assembled system, its solution and its
stability report.  Each rule yields zero or more *Findings*: diagnostics
tagged with a refinement level and a severity.  A rule that yields nothing
has passed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from beamlink.analysis.stability import StabilityReport, schur_complement, witness_infsup_bound
from beamlink.saddle.solver import SolveReport, clamp_reactions, interface_resultants
from beamlink.saddle.system import SaddleSystem

# ===================================================================
# Severity & Finding
# ===================================================================


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass
class Finding:
    """A single diagnostic emitted by a rule."""
    rule_id: str
    message: str
    severity: Severity
    level: int = 0
    value: Optional[float] = None
    limit: Optional[float] = None
    fix_hint: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "message": self.message,
            "severity": self.severity.value,
            "level": self.level,
            "value": self.value,
            "limit": self.limit,
            "fix_hint": self.fix_hint,
        }


@dataclass
class CheckContext:
    """Everything the rules may inspect for one refinement level (or the whole study)."""
    level: int = 1
    system: Optional[SaddleSystem] = None
    solve: Optional[SolveReport] = None
    stability: Optional[StabilityReport] = None
    history: list[StabilityReport] = field(default_factory=list)

    def available(self) -> set[str]:
        out = set()
        if self.system is not None:
            out.add("system")
        if self.solve is not None:
            out.add("solve")
        if self.stability is not None:
            out.add("stability")
        if len(self.history) >= 2:
            out.add("refinement")
        return out


# ===================================================================
# Rule & RuleSet
# ===================================================================

@dataclass
class Rule:
    """
    An invariant check.

    * ``id``        – unique slug, e.g. ``"energy_balance"``
    * ``name``      – human-readable label
    * ``severity``  – default severity for findings
    * ``match``     – callable(CheckContext) → list[Finding]
    * ``requires``  – context parts the rule needs (``"system"``, ``"solve"``, …)
    * ``tags``      – classification tags (``"equilibrium"``, ``"stability"``, …)
    """
    id: str
    name: str
    severity: Severity
    match: Callable[[CheckContext], list[Finding]]
    requires: list[str] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    enabled: bool = True


@dataclass
class RuleSet:
    """An ordered collection of rules."""
    rules: list[Rule] = field(default_factory=list)

    def add(self, rule: Rule) -> None:
        self.rules.append(rule)

    def get(self, rule_id: str) -> Optional[Rule]:
        return next((r for r in self.rules if r.id == rule_id), None)

    def enabled_rules(self, available: Optional[set[str]] = None) -> list[Rule]:
        """Return enabled rules whose requirements are all in *available*."""
        out = []
        for r in self.rules:
            if not r.enabled:
                continue
            if available is not None and not set(r.requires) <= available:
                continue
            out.append(r)
        return out


# ===================================================================
# Helpers
# ===================================================================

def _limit(rule_id: str, ctx: CheckContext, value: float, limit: float, what: str,
           hint: Optional[str] = None, severity: Severity = Severity.ERROR) -> list[Finding]:
    if np.isfinite(value) and value <= limit:
        return []
    return [Finding(
        rule_id=rule_id, message=f"{what} = {value:.3e} exceeds {limit:.1e}",
        severity=severity, level=ctx.level, value=float(value), limit=limit, fix_hint=hint,
    )]


def _coupled(ctx: CheckContext) -> bool:
    s = ctx.system
    return s is not None and s.n_constraints == 6 and s.surface is not None and s.mesh is not None


def _drift(values: list[float]) -> float:
    top = max(abs(v) for v in values)
    return (max(values) - min(values)) / top if top > 0.0 else 0.0


# ===================================================================
# Built-in rules
# ===================================================================

def _rule_constraint_residual(ctx: CheckContext) -> list[Finding]:
    """B x = 0 at the solution."""
    r = ctx.solve
    norm = float(np.linalg.norm(r.constraint_residual))
    return _limit("constraint_residual", ctx, norm / (1.0 + np.linalg.norm(r.x)), 1e-9,
                  "relative constraint residual")


def _rule_energy_balance(ctx: CheckContext) -> list[Finding]:
    """a(x, x) = f(x) at the solution."""
    r = ctx.solve
    return _limit("energy_balance", ctx, r.energy_gap / (1.0 + abs(r.external_work)), 1e-8,
                  "relative energy gap")


def _rule_kkt_nonsingular(ctx: CheckContext) -> list[Finding]:
    """The factorization met no vanishing pivot."""
    stats = ctx.solve.stats
    if stats.zero_pivots == 0:
        return []
    return [Finding(
        rule_id="kkt_nonsingular",
        message=f"KKT factorization reported {stats.zero_pivots} zero pivots",
        severity=Severity.ERROR, level=ctx.level, value=float(stats.zero_pivots), limit=0.0,
        fix_hint="Check that both constraint groups are active and the interface is "
                 "not degenerate.",
    )]


def _rule_clamp_equilibrium(ctx: CheckContext) -> list[Finding]:
    """Clamp reactions balance every applied force and moment."""
    if not _coupled(ctx) or ctx.system.loads is None:
        return []
    return _limit("clamp_equilibrium", ctx, clamp_reactions(ctx.system, ctx.solve).imbalance,
                  1e-8, "relative clamp imbalance")


def _rule_interface_resultants(ctx: CheckContext) -> list[Finding]:
    """Solid internal forces on Sigma match -|S| mu and -J lambda."""
    if not _coupled(ctx) or ctx.solve.multipliers is None:
        return []
    if not np.any(ctx.solve.multiplier_vector):
        return []
    return _limit("interface_resultants", ctx,
                  interface_resultants(ctx.system, ctx.solve).discrepancy, 1e-8,
                  "relative interface resultant mismatch")


def _rule_rigid_pairs(ctx: CheckContext) -> list[Finding]:
    """B annihilates rigid solid motions paired with matching tip values."""
    if not _coupled(ctx):
        return []
    system = ctx.system
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(5):
        c, omega = rng.standard_normal(3), rng.standard_normal(3)
        x = np.zeros(system.n_primal)
        r = system.mesh.nodes - system.surface.centroid
        x[system.layout.solid] = (c + np.cross(omega, r)).ravel()
        x[system.layout.tip_w] = c
        x[system.layout.tip_theta] = omega
        scale = np.linalg.norm(c) + np.linalg.norm(omega) * system.surface.diameter
        worst = max(worst, float(np.abs(system.B @ x).max()) / scale)
    return _limit("rigid_pairs", ctx, worst, 1e-10, "rigid-pair constraint residual")


def _rule_interface_duality(ctx: CheckContext) -> list[Finding]:
    """T^a . T_b = delta^a_b at every interface Gauss point."""
    if ctx.system.surface is None:
        return []
    return _limit("interface_duality", ctx, ctx.system.surface.duality_error(), 1e-10,
                  "dual basis error")


def _rule_interface_planarity(ctx: CheckContext) -> list[Finding]:
    surface = ctx.system.surface
    if surface is None or surface.is_planar:
        return []
    return [Finding(
        rule_id="interface_planarity",
        message=f"interface {surface.name!r} is curved; the skew-average identity is not checked",
        severity=Severity.WARNING, level=ctx.level,
    )]


def _rule_rigid_modes_eliminated(ctx: CheckContext) -> list[Finding]:
    """The coupled KKT matrix has no near-zero eigenvalue."""
    n = ctx.stability.rigid_modes_constrained
    if n == 0:
        return []
    return [Finding(
        rule_id="rigid_modes_eliminated",
        message=f"{n} near-zero modes survive the coupling",
        severity=Severity.ERROR, level=ctx.level, value=float(n), limit=0.0,
    )]


def _rule_free_solid_modes(ctx: CheckContext) -> list[Finding]:
    """Without the constraints the stiffness has exactly the six rigid modes of the solid."""
    n = ctx.stability.rigid_modes_unconstrained
    expected = 6 if ctx.system is None or ctx.system.mesh is not None else 0
    if n == expected:
        return []
    return [Finding(
        rule_id="free_solid_modes",
        message=f"unconstrained stiffness has {n} near-zero modes, expected {expected}",
        severity=Severity.ERROR, level=ctx.level, value=float(n), limit=float(expected),
    )]


def _rule_alpha_positive(ctx: CheckContext) -> list[Finding]:
    alpha = ctx.stability.alpha_kernel
    if np.isfinite(alpha) and alpha > 0.0:
        return []
    return [Finding(
        rule_id="alpha_positive", message=f"kernel ellipticity constant is {alpha:.3e}",
        severity=Severity.ERROR, level=ctx.level, value=float(alpha), limit=0.0,
    )]


def _rule_beta_positive(ctx: CheckContext) -> list[Finding]:
    beta = ctx.stability.beta_infsup
    if np.isfinite(beta) and beta > 0.0:
        return []
    return [Finding(
        rule_id="beta_positive", message=f"inf-sup constant is {beta:.3e}",
        severity=Severity.ERROR, level=ctx.level, value=float(beta), limit=0.0,
    )]


def _rule_witness_bound(ctx: CheckContext) -> list[Finding]:
    """Witness ratios stay below the exact sup for their multiplier, which stays above beta."""
    if not _coupled(ctx):
        return []
    S = schur_complement(ctx.system)
    rng = np.random.default_rng(1)
    worst = -np.inf
    for _ in range(5):
        bound = witness_infsup_bound(ctx.system, rng.standard_normal(3), rng.standard_normal(3),
                                     schur=S)
        worst = max(worst, -bound.slack, ctx.stability.beta_infsup - bound.certified_sup)
    return _limit("witness_bound", ctx, worst, 1e-10, "witness slack violation")


def _rule_beta_drift(ctx: CheckContext) -> list[Finding]:
    drift = _drift([r.beta_infsup for r in ctx.history])
    return _limit("beta_drift", ctx, drift, 0.10, "inf-sup drift over refinement",
                  hint="Refine further; beta should settle to a mesh-independent value.")


def _rule_alpha_drift(ctx: CheckContext) -> list[Finding]:
    drift = _drift([r.alpha_kernel for r in ctx.history])
    return _limit("alpha_drift", ctx, drift, 0.25, "kernel ellipticity drift over refinement")


# ===================================================================
# Registry
# ===================================================================

_BUILTIN_RULES: list[Rule] = [
    Rule(
        id="interface_duality", name="Dual Tangent Basis",
        severity=Severity.ERROR, match=_rule_interface_duality,
        requires=["system"], tags=["geometry"],
    ),
    Rule(
        id="interface_planarity", name="Planar Interface",
        severity=Severity.WARNING, match=_rule_interface_planarity,
        requires=["system"], tags=["geometry"],
    ),
    Rule(
        id="rigid_pairs", name="Rigid Pairs Satisfy Constraints",
        severity=Severity.ERROR, match=_rule_rigid_pairs,
        requires=["system"], tags=["coupling"],
    ),
    Rule(
        id="kkt_nonsingular", name="Nonsingular KKT Factorization",
        severity=Severity.ERROR, match=_rule_kkt_nonsingular,
        requires=["solve"], tags=["solve"],
    ),
    Rule(
        id="constraint_residual", name="Constraint Residual",
        severity=Severity.ERROR, match=_rule_constraint_residual,
        requires=["solve"], tags=["solve"],
    ),
    Rule(
        id="energy_balance", name="Energy Identity",
        severity=Severity.ERROR, match=_rule_energy_balance,
        requires=["solve"], tags=["solve", "equilibrium"],
    ),
    Rule(
        id="clamp_equilibrium", name="Global Equilibrium at the Clamp",
        severity=Severity.ERROR, match=_rule_clamp_equilibrium,
        requires=["system", "solve"], tags=["equilibrium"],
    ),
    Rule(
        id="interface_resultants", name="Multipliers Equal Interface Resultants",
        severity=Severity.ERROR, match=_rule_interface_resultants,
        requires=["system", "solve"], tags=["equilibrium", "coupling"],
    ),
    Rule(
        id="free_solid_modes", name="Six Free Rigid Modes",
        severity=Severity.ERROR, match=_rule_free_solid_modes,
        requires=["stability"], tags=["stability"],
    ),
    Rule(
        id="rigid_modes_eliminated", name="Rigid Modes Eliminated",
        severity=Severity.ERROR, match=_rule_rigid_modes_eliminated,
        requires=["stability"], tags=["stability"],
    ),
    Rule(
        id="alpha_positive", name="Kernel Ellipticity",
        severity=Severity.ERROR, match=_rule_alpha_positive,
        requires=["stability"], tags=["stability"],
    ),
    Rule(
        id="beta_positive", name="Inf-Sup Stability",
        severity=Severity.ERROR, match=_rule_beta_positive,
        requires=["stability"], tags=["stability"],
    ),
    Rule(
        id="witness_bound", name="Witness Below Certified Sup",
        severity=Severity.ERROR, match=_rule_witness_bound,
        requires=["system", "stability"], tags=["stability"],
    ),
    Rule(
        id="beta_drift", name="Inf-Sup Drift Under Refinement",
        severity=Severity.ERROR, match=_rule_beta_drift,
        requires=["refinement"], tags=["refinement"],
    ),
    Rule(
        id="alpha_drift", name="Ellipticity Drift Under Refinement",
        severity=Severity.ERROR, match=_rule_alpha_drift,
        requires=["refinement"], tags=["refinement"],
    ),
]


def load_builtin_rules() -> RuleSet:
    """Return a RuleSet loaded with all built-in rules."""
    rs = RuleSet()
    for r in _BUILTIN_RULES:
        rs.add(replace(r, requires=list(r.requires), tags=list(r.tags)))
    return rs
