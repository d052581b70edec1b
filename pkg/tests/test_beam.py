"""Tests for shear-deformable beam elements"""

import numpy as np
import pytest

from beamlink.analysis.bounds import beam_coercivity_constant, beam_continuity_constant
from beamlink.beam.section import BeamLoads, BeamSection, BeamState
from beamlink.beam.timoshenko import (
    assemble_beam,
    beam_element_stiffness,
    beam_load_vector,
    beam_norm_gram,
    beam_state,
    beam_strains,
    section_resultants,
)
from beamlink.errors import GeometryError, InvalidArgumentError
from beamlink.geometry.beam_model import build_beam, section_frame


def _cantilever(beam, loads):
    K = assemble_beam(beam).toarray()
    x = np.linalg.solve(K, beam_load_vector(beam, loads))
    return beam_state(beam, x)


class TestSection:
    """Section constants"""

    def test_rectangular(self):
        s = BeamSection.rectangular(0.2, 0.1, 1000.0, 0.25)
        assert s.A == pytest.approx(0.02)
        assert s.I1 == pytest.approx(0.2 * 0.1**3 / 12.0)
        assert s.I2 == pytest.approx(0.1 * 0.2**3 / 12.0)
        assert s.G == pytest.approx(400.0)
        assert s.A1 == pytest.approx(5.0 / 6.0 * 0.02)
        np.testing.assert_allclose(np.diag(s.C_gamma), [400 * s.A1, 400 * s.A2, 1000 * s.A])

    def test_non_positive_rejected(self):
        with pytest.raises(InvalidArgumentError):
            BeamSection(E=1.0, G=1.0, A=1.0, A1=1.0, A2=1.0, I1=0.0, I2=1.0, It=1.0)

    def test_state_clamped(self):
        w = np.zeros((3, 3))
        w[0, 1] = 1e-3
        with pytest.raises(InvalidArgumentError):
            BeamState(w=w, theta=np.zeros((3, 3)))


class TestStrains:
    """Linearized section strains"""

    def test_undeformed(self):
        g, o = beam_strains(np.zeros(3), np.zeros(3), np.zeros(3), np.eye(3)[2], np.eye(3))
        assert not np.any(g) and not np.any(o)

    def test_axial(self):
        g, o = beam_strains(np.array([0, 0, 0.3]), np.zeros(3), np.zeros(3),
                            np.eye(3)[2], np.eye(3))
        np.testing.assert_allclose(g, [0.0, 0.0, 0.3])

    def test_torsion(self):
        g, o = beam_strains(np.zeros(3), np.array([0, 0, 2.0]), np.array([0, 0, 0.7]),
                            np.eye(3)[2], np.eye(3))
        np.testing.assert_allclose(g, 0.0)
        np.testing.assert_allclose(o, [0.0, 0.0, 0.7])

    def test_rigid_rotation(self, rng):
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        Lam = section_frame(t)
        omega = rng.normal(size=3)
        g, o = beam_strains(np.cross(omega, t), omega, np.zeros(3), t, Lam)
        np.testing.assert_allclose(g, 0.0, atol=1e-14)


class TestElementStiffness:
    """Two-node element"""

    def test_rigid_motions(self, section, rng):
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        Lam = section_frame(t)
        h = 0.7
        k = beam_element_stiffness(h, section, Lam)
        r = np.array([np.zeros(3), h * t])
        for _ in range(5):
            c, omega, p = rng.normal(size=(3, 3))
            w = c + np.cross(omega, r - p)
            v = np.concatenate([w[0], omega, w[1], omega])
            assert np.abs(k @ v).max() <= 1e-10 * np.abs(k).max() * np.abs(v).max()

    def test_axial_energy(self, section):
        h, d = 0.5, 1e-3
        k = beam_element_stiffness(h, section)
        v = np.zeros(12)
        v[8] = d
        assert 0.5 * v @ k @ v == pytest.approx(0.5 * section.E * section.A * d**2 / h, rel=1e-12)

    def test_zero_length(self, section):
        with pytest.raises(GeometryError):
            beam_element_stiffness(0.0, section)


class TestAssembly:
    """Clamped beam stiffness"""

    def test_single_element(self, section):
        beam = build_beam(1.5, 1, section)
        k = beam_element_stiffness(1.5, section, beam.rotation)
        np.testing.assert_allclose(assemble_beam(beam).toarray(), k[6:, 6:], rtol=1e-14)

    def test_clamped_positive_definite(self, beam):
        assert np.linalg.eigvalsh(assemble_beam(beam).toarray()).min() > 0.0

    def test_free_free_rigid_modes(self, beam):
        values = np.linalg.eigvalsh(assemble_beam(beam, clamped=False).toarray())
        assert np.sum(np.abs(values) < 1e-8 * values.max()) == 6

    @pytest.mark.parametrize("n", [1, 3, 8])
    def test_tip_load_exact(self, section, n):
        P, L = 0.5, 2.0
        beam = build_beam(L, n, section)
        state = _cantilever(beam, BeamLoads(tip_force=(P, 0.0, 0.0)))
        expected = P * L**3 / (3 * section.E * section.I2) + P * L / (section.G * section.A1)
        assert state.tip_displacement[0] == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("n", [1, 4])
    def test_tip_moment_exact(self, section, n):
        Q, L = 0.2, 2.0
        beam = build_beam(L, n, section)
        state = _cantilever(beam, BeamLoads(tip_moment=(Q, 0.0, 0.0)))
        assert state.tip_rotation[0] == pytest.approx(Q * L / (section.E * section.I1), rel=1e-9)

    def test_slender_beam_does_not_lock(self):
        section = BeamSection.rectangular(0.01, 0.01, 2.0e5, 0.3)
        beam = build_beam(1.0, 16, section)
        state = _cantilever(beam, BeamLoads(tip_force=(0.0, 1e-6, 0.0)))
        expected = 1e-6 / (3 * section.E * section.I1) + 1e-6 / (section.G * section.A2)
        assert state.tip_displacement[1] == pytest.approx(expected, rel=1e-2)

    def test_shear_resultant_constant(self, section):
        P = 0.3
        beam = build_beam(2.0, 5, section)
        state = _cantilever(beam, BeamLoads(tip_force=(P, 0.0, 0.0)))
        forces, moments = section_resultants(beam, state)
        np.testing.assert_allclose(forces, np.tile([P, 0.0, 0.0], (5, 1)), atol=1e-9 * P)
        # bending moment at each element midpoint grows linearly toward the clamp
        arms = 2.0 - (np.arange(5) + 0.5) * 0.4
        np.testing.assert_allclose(np.abs(moments[:, 1]), P * arms, rtol=1e-9)


class TestLoads:
    """Beam load vectors"""

    def test_zero(self, beam):
        assert not np.any(beam_load_vector(beam, BeamLoads()))

    def test_distributed_total(self, section):
        beam = build_beam(1.0, 5, section)
        f = beam_load_vector(beam, BeamLoads(distributed_force=(0.0, 2.0, -1.0)), clamped=False)
        np.testing.assert_allclose(f.reshape(-1, 6)[:, :3].sum(axis=0), [0.0, 2.0, -1.0])

    def test_tip_force_only(self, beam):
        f = beam_load_vector(beam, BeamLoads(tip_force=(1.0, 2.0, 3.0)))
        assert np.count_nonzero(f) == 3
        np.testing.assert_array_equal(f[-6:-3], [1.0, 2.0, 3.0])


class TestGram:
    """W x R norm"""

    def test_linear_axial_field(self, section):
        beam = build_beam(1.0, 2, section)
        v = np.zeros(12)
        v[2], v[8] = 0.5, 1.0
        assert v @ beam_norm_gram(beam, 1.0) @ v == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_positive_definite(self, beam):
        assert np.linalg.eigvalsh(beam_norm_gram(beam, 2.0).toarray()).min() > 0.0

    def test_invalid_length(self, beam):
        with pytest.raises(InvalidArgumentError):
            beam_norm_gram(beam, -1.0)


class TestBounds:
    """Discrete coercivity and continuity under refinement"""

    def test_constants_stable(self, section):
        coercivity, continuity = [], []
        for n in (4, 8, 16):
            beam = build_beam(2.0, n, section)
            coercivity.append(beam_coercivity_constant(beam, 2.0))
            continuity.append(beam_continuity_constant(beam, 2.0))
        assert min(coercivity) > 0.0
        assert (max(coercivity) - min(coercivity)) / max(coercivity) < 0.25
        assert (max(continuity) - min(continuity)) / max(continuity) < 0.25
