"""Tests for the in-memory metrics counters"""

import pytest

from beamlink.utils import live_metrics
from beamlink.utils.live_metrics import LiveMetrics, live


@pytest.fixture
def disabled():
    live_metrics.set_enabled(False)
    yield
    live_metrics.set_enabled(True)


class TestLiveMetrics:
    """Counters, summary and banner"""

    def test_singleton(self):
        assert LiveMetrics() is live

    def test_assembly_kinds(self):
        live.record_assembly(kind="solid", dofs=81)
        live.record_assembly(kind="beam", dofs=24)
        live.record_assembly(kind="constraint")
        s = live.summary()
        assert s["assemblies"] == {"solid": 1, "beam": 1, "constraint": 1}
        assert s["largest_system"] == 81

    def test_factorization_and_solve(self):
        live.record_factorization(zero_pivots=2, elapsed_ms=1.5)
        live.record_solve(dofs=111, elapsed_ms=2.0)
        s = live.summary()
        assert s["factorizations"] == 1 and s["zero_pivots"] == 2
        assert s["timing"]["solve_ms"] == 3.5
        assert "zero_pivots=2" in live.banner(color=False)

    def test_banner(self):
        live.record_checks(passed=3, failed=1)
        line = live.banner(color=False)
        assert line.startswith("[metrics] ")
        assert "checks=3/4" in line
        assert live.banner().startswith("\033[90m")

    def test_reset(self):
        live.record_eigen_solve(elapsed_ms=4.0)
        live.reset()
        assert live.summary()["eigen_solves"] == 0

    def test_disabled(self, disabled):
        live.record_solve(dofs=10)
        assert live.summary() == {"metrics": "disabled"}
        assert live.banner() == ""
        assert not live_metrics.is_enabled()
