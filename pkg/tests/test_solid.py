"""Tests for hex8 elasticity, loads and the U-norm Gram matrix"""

import numpy as np
import pytest

from beamlink.analysis.bounds import solid_continuity_constant, solid_garding_constant
from beamlink.errors import ConfigurationError, InvalidArgumentError
from beamlink.geometry.mesh import build_block_mesh
from beamlink.solid.elasticity import (
    assemble_solid,
    element_dofs,
    recover_strains,
    recover_stresses,
    small_strain,
    solid_element_stiffness,
    solid_load_vector,
    u_norm_gram,
    von_mises,
)
from beamlink.solid.material import SolidLoads, SolidMaterial

OUTWARD = {
    "-x": (-1.0, 0.0, 0.0), "+x": (1.0, 0.0, 0.0),
    "-y": (0.0, -1.0, 0.0), "+y": (0.0, 1.0, 0.0),
    "-z": (0.0, 0.0, -1.0), "+z": (0.0, 0.0, 1.0),
}


@pytest.fixture
def unit_cube():
    return build_block_mesh((1.0, 1.0, 1.0), (1, 1, 1))


class TestMaterial:
    """Isotropic material"""

    def test_engineering_conversion(self):
        m = SolidMaterial.from_engineering(1000.0, 0.3)
        assert m.mu == pytest.approx(1000.0 / 2.6)
        assert m.lame_lambda == pytest.approx(300.0 / (1.3 * 0.4))
        assert m.youngs_modulus == pytest.approx(1000.0)
        assert m.poisson_ratio == pytest.approx(0.3)

    def test_incompressible_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SolidMaterial.from_engineering(1000.0, 0.5)

    def test_invalid_lame(self):
        with pytest.raises(InvalidArgumentError):
            SolidMaterial(lame_lambda=1.0, mu=0.0)
        with pytest.raises(InvalidArgumentError):
            SolidMaterial(lame_lambda=-2.0, mu=1.0)

    def test_elasticity_matrix(self):
        D = SolidMaterial(lame_lambda=1.0, mu=1.0).elasticity_matrix()
        np.testing.assert_allclose(D[:3, :3], [[3, 1, 1], [1, 3, 1], [1, 1, 3]])
        np.testing.assert_allclose(np.diag(D)[3:], [1.0, 1.0, 1.0])


class TestSmallStrain:
    """Symmetric gradient"""

    def test_examples(self):
        np.testing.assert_array_equal(small_strain(np.zeros((3, 3))), np.zeros((3, 3)))
        W = np.array([[0.0, 1.0, -2.0], [-1.0, 0.0, 3.0], [2.0, -3.0, 0.0]])
        np.testing.assert_allclose(small_strain(W), 0.0, atol=1e-15)
        np.testing.assert_array_equal(small_strain(np.eye(3)), np.eye(3))


class TestElementStiffness:
    """Single hex8 element"""

    def test_symmetric(self, unit_cube, material):
        k = solid_element_stiffness(unit_cube.element_coordinates(0), material)
        np.testing.assert_allclose(k, k.T, atol=0.0)

    def test_rigid_modes(self, unit_cube, material, rng):
        coords = unit_cube.element_coordinates(0)
        k = solid_element_stiffness(coords, material)
        scale = np.abs(k).max()
        for _ in range(5):
            c, omega = rng.normal(size=3), rng.normal(size=3)
            v = (c + np.cross(omega, coords - coords.mean(axis=0))).ravel()
            assert np.abs(k @ v).max() <= 1e-10 * scale * np.abs(v).max()

    def test_exactly_six_zero_eigenvalues(self, unit_cube, material):
        values = np.linalg.eigvalsh(solid_element_stiffness(unit_cube.element_coordinates(0),
                                                            material))
        assert np.sum(values < 1e-8 * values.max()) == 6

    def test_uniaxial_stretch_energy(self, unit_cube):
        k = solid_element_stiffness(unit_cube.element_coordinates(0),
                                    SolidMaterial(lame_lambda=1.0, mu=1.0))
        coords = unit_cube.element_coordinates(0)
        v = np.zeros((8, 3))
        v[:, 2] = coords[:, 2]
        assert 0.5 * v.ravel() @ k @ v.ravel() == pytest.approx(1.5, rel=1e-12)


class TestAssembly:
    """Global solid stiffness"""

    def test_single_element(self, unit_cube, material):
        K = assemble_solid(unit_cube, material).toarray()
        k = solid_element_stiffness(unit_cube.element_coordinates(0), material)
        d = element_dofs(unit_cube)[0]
        np.testing.assert_allclose(K[np.ix_(d, d)], k, rtol=1e-14, atol=1e-12)

    def test_dense_oracle(self, material):
        mesh = build_block_mesh((2.0, 1.0, 1.0), (2, 1, 1))
        dense = np.zeros((mesh.n_dofs, mesh.n_dofs))
        for e, dofs in enumerate(element_dofs(mesh)):
            dense[np.ix_(dofs, dofs)] += solid_element_stiffness(mesh.element_coordinates(e),
                                                                 material)
        K = assemble_solid(mesh, material).toarray()
        np.testing.assert_allclose(K, dense, atol=1e-12 * np.abs(dense).max())

    def test_free_free_rigid_modes(self, block, material):
        values = np.linalg.eigvalsh(assemble_solid(block, material).toarray())
        assert np.sum(np.abs(values) < 1e-8 * values.max()) == 6

    def test_parallel_matches_serial(self, block, material):
        serial = assemble_solid(block, material)
        parallel = assemble_solid(block, material, workers=4)
        assert (serial != parallel).nnz == 0

    def test_metrics_recorded(self, block, material):
        from beamlink.utils.live_metrics import live
        assemble_solid(block, material)
        assert live.summary()["assemblies"]["solid"] == 1


class TestLoads:
    """Consistent load vectors"""

    def test_zero(self, block):
        assert not np.any(solid_load_vector(block, SolidLoads()))

    def test_body_force_total(self, block):
        f = solid_load_vector(block, SolidLoads(body_force=(1.0, -2.0, 0.5)))
        np.testing.assert_allclose(f.reshape(-1, 3).sum(axis=0), [1.0, -2.0, 0.5], rtol=1e-12)

    def test_traction_total(self, block):
        f = solid_load_vector(block, SolidLoads(tractions=(("+z", (0.0, 3.0, 0.0)),)))
        np.testing.assert_allclose(f.reshape(-1, 3).sum(axis=0), [0.0, 3.0, 0.0], atol=1e-12)

    def test_traction_on_interface_rejected(self, block, sigma):
        with pytest.raises(ConfigurationError) as exc:
            solid_load_vector(block, SolidLoads(tractions=(("-z", (1.0, 0.0, 0.0)),)), sigma)
        assert exc.value.key == "loads.tractions"


class TestGram:
    """U-norm Gram matrix"""

    def test_constant_field(self, block):
        v = np.ones(block.n_dofs)
        assert v @ u_norm_gram(block, 7.0) @ v == pytest.approx(3.0, rel=1e-12)

    def test_linear_field(self, block):
        v = np.zeros((block.n_nodes, 3))
        v[:, 2] = block.nodes[:, 2]
        v = v.ravel()
        assert v @ u_norm_gram(block, 1.0) @ v == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_positive_definite(self, block):
        assert np.linalg.eigvalsh(u_norm_gram(block, 1.0).toarray()).min() > 0.0

    def test_invalid_length(self, block):
        with pytest.raises(InvalidArgumentError):
            u_norm_gram(block, 0.0)


class TestPatch:
    """Constant stress states are reproduced exactly"""

    def test_constant_stress_patch(self, material, rng):
        mesh = build_block_mesh((2.0, 1.0, 0.5), (3, 2, 2), origin=(0.3, -0.2, 1.0))
        eps = small_strain(rng.normal(size=(3, 3))) * 1e-3
        sigma = 2.0 * material.mu * eps + material.lame_lambda * np.trace(eps) * np.eye(3)
        u = mesh.nodes @ eps.T
        loads = SolidLoads(tractions=tuple(
            (name, sigma @ np.array(n)) for name, n in OUTWARD.items()
        ))
        f = solid_load_vector(mesh, loads)
        internal = assemble_solid(mesh, material) @ u.ravel()
        np.testing.assert_allclose(internal, f, atol=1e-9 * np.abs(f).max())

        strains = recover_strains(mesh, u)
        np.testing.assert_allclose(strains, np.broadcast_to(eps, strains.shape), atol=1e-12)
        stresses = recover_stresses(mesh, u, material)
        np.testing.assert_allclose(stresses[0, 0], sigma, atol=1e-9 * np.abs(sigma).max())

    def test_von_mises_uniaxial(self):
        assert von_mises(np.diag([5.0, 0.0, 0.0])) == pytest.approx(5.0)
        assert von_mises(2.0 * np.eye(3)) == pytest.approx(0.0, abs=1e-12)


class TestBounds:
    """Discrete continuity and Garding constants"""

    def test_continuity_stable_under_refinement(self, material):
        values = [
            solid_continuity_constant(build_block_mesh((1, 1, 1), (n, n, n)), material, 1.0)
            for n in (2, 4)
        ]
        assert all(v > 0.0 for v in values)
        assert (max(values) - min(values)) / max(values) < 0.25

    def test_garding_bounded_by_rigid_rotation(self, material):
        # a rigid rotation about the centroid has quotient (1/6) / (1/6 + 2) = 1/13
        for n in (1, 2):
            value = solid_garding_constant(build_block_mesh((1, 1, 1), (n, n, n)), material, 1.0)
            assert 0.05 < value <= 1.0 / 13.0 + 1e-9
