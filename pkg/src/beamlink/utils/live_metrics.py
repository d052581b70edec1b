"""
beamlink live metrics: in-memory counters

Collected with every assembly, factorization, eigen-solve and check run:
  • In-memory counters (no I/O on the hot path)
  • A compact summary dict suitable for JSON embedding
  • Global toggle via the BEAMLINK_METRICS env var

Usage:
    from beamlink.utils.live_metrics import live
    live.record_assembly(kind="solid", dofs=375, elapsed_ms=4.1)
    print(live.summary())       # compact dict
    print(live.banner())        # one-line CLI string
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

# ---------------------------------------------------------------------------
# Global toggle
# ---------------------------------------------------------------------------

_OFF_VALUES = ("0", "off", "false", "no")
_ENABLED: bool = os.environ.get("BEAMLINK_METRICS", "on").lower() not in _OFF_VALUES


def is_enabled() -> bool:
    return _ENABLED


def set_enabled(enabled: bool) -> None:
    global _ENABLED
    _ENABLED = enabled


# ---------------------------------------------------------------------------
# Lightweight counters
# ---------------------------------------------------------------------------

@dataclass
class _Counters:
    """Plain counters; writes rely on the GIL."""

    # Assembly
    solid_assemblies: int = 0
    beam_assemblies: int = 0
    constraint_assemblies: int = 0
    largest_system: int = 0

    # Linear algebra
    factorizations: int = 0
    zero_pivots: int = 0
    eigen_solves: int = 0
    solves: int = 0

    # Checks
    checks_passed: int = 0
    checks_failed: int = 0

    # Timing (cumulative ms)
    assembly_ms: float = 0.0
    solve_ms: float = 0.0
    analysis_ms: float = 0.0

    _session_start: float = field(default_factory=time.monotonic)


# ---------------------------------------------------------------------------
# LiveMetrics singleton
# ---------------------------------------------------------------------------

class LiveMetrics:
    """
    Always-on metrics collector.

    record_* only increments counters; nothing is persisted.
    """

    _instance: LiveMetrics | None = None
    _c: _Counters

    def __new__(cls) -> LiveMetrics:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._c = _Counters()
        return cls._instance

    # ---- recording ----

    def record_assembly(self, *, kind: str, dofs: int = 0, elapsed_ms: float = 0.0) -> None:
        if not _ENABLED:
            return
        c = self._c
        if kind == "solid":
            c.solid_assemblies += 1
        elif kind == "beam":
            c.beam_assemblies += 1
        else:
            c.constraint_assemblies += 1
        c.largest_system = max(c.largest_system, dofs)
        c.assembly_ms += elapsed_ms

    def record_factorization(self, *, zero_pivots: int = 0, elapsed_ms: float = 0.0) -> None:
        if not _ENABLED:
            return
        self._c.factorizations += 1
        self._c.zero_pivots += zero_pivots
        self._c.solve_ms += elapsed_ms

    def record_solve(self, *, dofs: int = 0, elapsed_ms: float = 0.0) -> None:
        if not _ENABLED:
            return
        self._c.solves += 1
        self._c.largest_system = max(self._c.largest_system, dofs)
        self._c.solve_ms += elapsed_ms

    def record_eigen_solve(self, *, elapsed_ms: float = 0.0) -> None:
        if not _ENABLED:
            return
        self._c.eigen_solves += 1
        self._c.analysis_ms += elapsed_ms

    def record_checks(self, *, passed: int = 0, failed: int = 0) -> None:
        if not _ENABLED:
            return
        self._c.checks_passed += passed
        self._c.checks_failed += failed

    # ---- reading ----

    def summary(self) -> dict:
        """Compact dict of all counters."""
        if not _ENABLED:
            return {"metrics": "disabled"}
        c = self._c
        return {
            "assemblies": {
                "solid": c.solid_assemblies,
                "beam": c.beam_assemblies,
                "constraint": c.constraint_assemblies,
            },
            "largest_system": c.largest_system,
            "factorizations": c.factorizations,
            "zero_pivots": c.zero_pivots,
            "eigen_solves": c.eigen_solves,
            "solves": c.solves,
            "checks": {"passed": c.checks_passed, "failed": c.checks_failed},
            "timing": {
                "assembly_ms": round(c.assembly_ms, 2),
                "solve_ms": round(c.solve_ms, 2),
                "analysis_ms": round(c.analysis_ms, 2),
            },
            "uptime_s": round(time.monotonic() - c._session_start, 1),
        }

    def banner(self, *, color: bool = True) -> str:
        """One-line status string for CLI display."""
        if not _ENABLED:
            return ""
        c = self._c
        parts = [
            f"solves={c.solves}",
            f"dofs={c.largest_system}",
            f"eigs={c.eigen_solves}",
            f"checks={c.checks_passed}/{c.checks_passed + c.checks_failed}",
            f"time={c.assembly_ms + c.solve_ms + c.analysis_ms:.0f}ms",
        ]
        if c.zero_pivots:
            parts.append(f"zero_pivots={c.zero_pivots}")
        line = " | ".join(parts)
        if color:
            return f"\033[90m[metrics] {line}\033[0m"
        return f"[metrics] {line}"

    def reset(self) -> None:
        """Reset all counters (for testing)."""
        self._c = _Counters()


# ---------------------------------------------------------------------------
# Module-level singleton
# ---------------------------------------------------------------------------

live = LiveMetrics()
