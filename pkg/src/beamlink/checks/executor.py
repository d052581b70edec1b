"""
Check runner: applies the invariant rule set to a context.

Collects findings from every applicable rule, aggregates them by
severity and returns a CheckReport whose ``is_valid`` drives the exit
code of ``beamlink run``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional

from beamlink.analysis.stability import StabilityReport
from beamlink.checks.rules import (
    CheckContext,
    Finding,
    RuleSet,
    Severity,
    load_builtin_rules,
)
from beamlink.utils.live_metrics import live

logger = logging.getLogger(__name__)


# ===================================================================
# Check Report
# ===================================================================

@dataclass
class CheckReport:
    """Aggregated output of a check run."""
    is_valid: bool
    findings: list[Finding]          # all diagnostics
    errors: list[Finding]            # severity == ERROR
    warnings: list[Finding]          # severity == WARNING
    passed: list[str]                # ids of rules that yielded nothing
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "is_valid": self.is_valid,
            "findings": [f.to_dict() for f in self.findings],
            "errors": [f.to_dict() for f in self.errors],
            "warnings": [f.to_dict() for f in self.warnings],
            "passed": list(self.passed),
            "elapsed_ms": round(self.elapsed_ms, 2),
        }

    def merged(self, other: CheckReport) -> CheckReport:
        return CheckReport(
            is_valid=self.is_valid and other.is_valid,
            findings=self.findings + other.findings,
            errors=self.errors + other.errors,
            warnings=self.warnings + other.warnings,
            passed=self.passed + other.passed,
            elapsed_ms=self.elapsed_ms + other.elapsed_ms,
        )


def empty_report() -> CheckReport:
    return CheckReport(is_valid=True, findings=[], errors=[], warnings=[], passed=[])


# ===================================================================
# Public API
# ===================================================================

def check_scenario(context: CheckContext, *, rules: Optional[RuleSet] = None) -> CheckReport:
    """
    Run every enabled rule whose requirements *context* satisfies.

    A rule that raises is reported as an ERROR finding instead of aborting
    the remaining rules.
    """
    t0 = time.perf_counter()
    ruleset = rules or load_builtin_rules()
    findings: list[Finding] = []
    passed: list[str] = []

    for rule in ruleset.enabled_rules(context.available()):
        try:
            produced = rule.match(context)
        except Exception as exc:
            logger.exception("rule %s failed", rule.id)
            produced = [Finding(
                rule_id=rule.id,
                message=f"rule raised {type(exc).__name__}: {exc}",
                severity=Severity.ERROR,
                level=context.level,
            )]
        if produced:
            findings.extend(produced)
        else:
            passed.append(rule.id)

    errors = [f for f in findings if f.severity == Severity.ERROR]
    warnings = [f for f in findings if f.severity == Severity.WARNING]
    elapsed = (time.perf_counter() - t0) * 1000
    report = CheckReport(
        is_valid=not errors,
        findings=findings,
        errors=errors,
        warnings=warnings,
        passed=passed,
        elapsed_ms=elapsed,
    )
    live.record_checks(passed=len(passed), failed=len({f.rule_id for f in errors}))
    for f in findings:
        log = logger.error if f.severity == Severity.ERROR else logger.warning
        log("[level %d] %s: %s", f.level, f.rule_id, f.message)
    return report


def check_refinement(
    history: list[StabilityReport], *, rules: Optional[RuleSet] = None
) -> CheckReport:
    """Drift rules over the stability reports of successive refinement levels."""
    level = history[-1].level if history else 0
    return check_scenario(CheckContext(level=level, history=list(history)), rules=rules)
