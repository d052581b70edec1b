"""Tests for the well-posedness diagnostics"""

import csv
import json

import numpy as np
import pytest
import scipy.sparse as sp

from beamlink.analysis.bounds import beam_coercivity_constant, bound_constants
from beamlink.analysis.stability import (
    StabilityReport,
    analyze_stability,
    append_stability_csv,
    compute_M,
    inf_sup_constant,
    kernel_basis,
    kernel_ellipticity,
    schur_complement,
    witness_field,
    witness_infsup_bound,
    witness_norm_squared,
)
from beamlink.beam.timoshenko import assemble_beam, beam_norm_gram
from beamlink.config import parse_config_text
from beamlink.coupling.constraints import ConstraintBlock
from beamlink.dofs import DofLayout
from beamlink.errors import RankDeficiencyError
from beamlink.geometry.beam_model import build_beam
from beamlink.geometry.interface import extract_interface
from beamlink.geometry.mesh import build_block_mesh
from beamlink.runner import build_scenario
from beamlink.saddle.system import SaddleSystem, SystemLoads, assemble_system
from beamlink.solid.material import SolidLoads


def _drift(values) -> float:
    return (max(values) - min(values)) / max(abs(v) for v in values)


@pytest.fixture(scope="module")
def history(reference):
    config = parse_config_text(json.dumps(reference()))
    return [analyze_stability(build_scenario(config, k).assemble(), k) for k in (1, 2, 3)]


class TestInertia:
    """Solid inertia tensor about the interface centroid"""

    def test_unit_cube_about_its_center(self):
        mesh = build_block_mesh((1.0, 1.0, 1.0), (2, 2, 2))
        np.testing.assert_allclose(compute_M(mesh, (0.5, 0.5, 0.5)), np.eye(3) / 6.0, atol=1e-14)

    def test_follows_translation(self, block):
        d = np.array([2.0, -1.0, 0.5])
        np.testing.assert_allclose(compute_M(block.translated(d), d),
                                   compute_M(block, np.zeros(3)), atol=1e-12)

    def test_positive_definite(self, block, sigma):
        assert np.linalg.eigvalsh(compute_M(block, sigma.centroid)).min() > 0.0


class TestKernelEllipticity:
    """alpha on ker B"""

    def test_beam_only_equals_beam_coercivity(self, beam):
        layout = DofLayout(n_solid_nodes=0, n_beam_elements=beam.n_elements, n_multipliers=0)
        n = layout.n_primal
        beam_only = SaddleSystem(
            K=assemble_beam(beam), constraints=ConstraintBlock(sp.csr_matrix((0, n)), layout, ()),
            f=np.zeros(n), G_V=beam_norm_gram(beam, 2.0), G_Q=np.zeros((0, 0)), layout=layout,
            characteristic_length=2.0,
        )
        alpha = kernel_ellipticity(beam_only)
        assert alpha > 0.0
        assert alpha == pytest.approx(beam_coercivity_constant(beam, 2.0), rel=1e-10)

    def test_positive(self, system):
        assert kernel_ellipticity(system) > 0.0

    def test_without_constraints_is_zero(self, system):
        free = system.with_constraints(rotation=False, displacement=False)
        assert kernel_ellipticity(free) == 0.0

    def test_rank_deficient_rows(self):
        B = sp.csr_matrix(np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
        with pytest.raises(RankDeficiencyError) as exc:
            kernel_basis(B)
        assert exc.value.rank == 1

    def test_kernel_basis_orthonormal(self, system):
        Z = kernel_basis(system.B)
        assert Z.shape == (system.n_primal, system.n_primal - 6)
        np.testing.assert_allclose(Z.T @ Z, np.eye(Z.shape[1]), atol=1e-10)
        assert np.abs(system.B @ Z).max() < 1e-10


class TestInfSup:
    """beta and the explicit witness field"""

    def test_independent_of_loads(self, system):
        loads = SystemLoads(SolidLoads(body_force=(0.0, 0.0, -1.0)))
        loaded = system.with_loads(loads)
        scaled = system.with_loads(loads.scaled(250.0))
        np.testing.assert_allclose(scaled.f, 250.0 * loaded.f)
        assert inf_sup_constant(scaled) == pytest.approx(inf_sup_constant(loaded), rel=1e-12)
        assert inf_sup_constant(loaded) == pytest.approx(inf_sup_constant(system), rel=1e-12)

    def test_positive(self, system):
        assert inf_sup_constant(system) > 0.0

    def test_zero_without_rows(self, system):
        assert inf_sup_constant(system.with_constraints(rotation=False, displacement=False)) == 0.0

    def test_schur_symmetric_positive(self, system):
        S = schur_complement(system)
        assert S.shape == (6, 6)
        np.testing.assert_allclose(S, S.T)
        assert np.linalg.eigvalsh(S).min() > 0.0

    def test_translation_witness(self, system):
        w = witness_infsup_bound(system, np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert w.numerator == pytest.approx(system.surface.area, rel=1e-12)
        assert w.numerator == pytest.approx(w.expected_numerator, rel=1e-12)

    def test_rotation_witness(self, system):
        w = witness_infsup_bound(system, np.array([0.0, 0.0, 1.0]), np.zeros(3))
        assert w.numerator == pytest.approx(2.0 * system.surface.area, rel=1e-10)

    def test_witness_never_exceeds_certified_sup(self, system, rng):
        S = schur_complement(system)
        beta = inf_sup_constant(system, schur=S)
        for _ in range(20):
            lam, mu = rng.normal(size=3), rng.normal(size=3)
            w = witness_infsup_bound(system, lam, mu, schur=S)
            assert w.numerator == pytest.approx(w.expected_numerator, rel=1e-9, abs=1e-12)
            assert w.slack >= -1e-10
            assert beta <= w.certified_sup + 1e-10

    def test_witness_norm_closed_form(self, system, rng):
        lam, mu = rng.normal(size=3), rng.normal(size=3)
        v = witness_field(system, lam, mu)
        direct = v @ (system.G_V @ v)
        closed = witness_norm_squared(system.mesh, system.surface.centroid,
                                      system.characteristic_length, lam, mu)
        assert closed == pytest.approx(direct, rel=1e-10)


class TestNecessity:
    """Dropping either constraint group loses well-posedness"""

    def test_rigid_mode_counts(self, system):
        report = analyze_stability(system)
        assert report.rigid_modes_unconstrained == 6
        assert report.rigid_modes_constrained == 0

    @pytest.mark.parametrize("keep", [{"rotation": False}, {"displacement": False}])
    def test_partial_constraints_leave_modes(self, system, keep):
        reduced = system.with_constraints(**keep)
        assert analyze_stability(reduced).rigid_modes_constrained >= 1


class TestInvariance:
    """Constants do not depend on where the assembly sits in space"""

    def test_rigid_translation(self, system, material, section):
        d = np.array([3.0, -1.0, 2.5])
        mesh = build_block_mesh((1.0, 1.0, 1.0), (2, 2, 2), origin=(2.5, -1.5, 2.5))
        beam = build_beam(2.0, 4, section, axis_origin=np.array([0.0, 0.0, -2.0]) + d)
        moved = assemble_system(mesh, beam, extract_interface(mesh, "-z"), material)
        assert kernel_ellipticity(moved) == pytest.approx(kernel_ellipticity(system), rel=1e-8)
        assert inf_sup_constant(moved) == pytest.approx(inf_sup_constant(system), rel=1e-8)


class TestRefinement:
    """Stability constants across uniform refinements of the reference scenario"""

    def test_levels_grow(self, history):
        sizes = [r.n_dofs for r in history]
        assert sizes == sorted(sizes) and len(set(sizes)) == 3

    def test_beta_stable(self, history):
        betas = [r.beta_infsup for r in history]
        assert min(betas) > 0.0
        assert _drift(betas) < 0.10

    def test_alpha_stable(self, history):
        alphas = [r.alpha_kernel for r in history]
        assert min(alphas) > 0.0
        assert _drift(alphas) < 0.25

    def test_no_rigid_modes_survive(self, history):
        assert all(r.rigid_modes_constrained == 0 for r in history)


class TestReporting:
    """CSV rows and bound constants"""

    def test_csv_header_once(self, tmp_path):
        path = tmp_path / "out" / "stability.csv"
        rows = [StabilityReport(k, 10 * k, 0.5, 0.25, 6, 0) for k in (1, 2)]
        append_stability_csv(path, rows[:1])
        append_stability_csv(path, rows[1:])
        with path.open() as fh:
            data = list(csv.DictReader(fh))
        assert [r["level"] for r in data] == ["1", "2"]
        assert float(data[1]["beta"]) == 0.25

    def test_bound_constants(self, system):
        b = bound_constants(system)
        assert b.solid_continuity > b.solid_garding > 0.0
        assert b.beam_continuity > b.beam_coercivity > 0.0
        assert b.global_garding > 0.0
        assert set(b.to_dict()) == {
            "solid_continuity", "solid_garding", "beam_coercivity",
            "beam_continuity", "global_garding",
        }
