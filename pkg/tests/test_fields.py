import numpy as np
import pytest

from diskcurv.errors import ConfigurationError, InvalidFieldError
from diskcurv.fields import (
    CurvaturePair,
    CurvatureSpec,
    SymmetryGroup,
    is_symmetric,
    load_tabulated_circle,
    load_tabulated_disk,
    sample_curvatures,
    save_tabulated,
    symmetrize,
    validate_fixed_point_free,
)
from diskcurv.mesh import dirichlet_energy


class TestSymmetryGroup:
    def test_orders(self, mesh_small, z2_small, d3_small):
        mesh_d3, d3 = d3_small
        assert z2_small.order == 2
        assert d3.order == 6
        assert SymmetryGroup.cyclic(mesh_small, 4).order == 4

    def test_trivial_group_rejected(self, mesh_small):
        with pytest.raises(ConfigurationError):
            SymmetryGroup.cyclic(mesh_small, 1)
        with pytest.raises(ConfigurationError):
            SymmetryGroup.dihedral(mesh_small, 1)

    def test_incompatible_angular_resolution(self, mesh_small):
        with pytest.raises(ConfigurationError):
            SymmetryGroup.cyclic(mesh_small, 5)  # 32 not divisible by 5

    def test_permutations_are_isometries(self, d3_small):
        mesh, d3 = d3_small
        # spot check: images of all nodes lie on the node set with equal radii
        for perm in d3.perms:
            r0 = np.hypot(*mesh.nodes.T)
            r1 = np.hypot(*mesh.nodes[perm].T)
            assert np.max(np.abs(r0 - r1)) <= 1e-14

    def test_corrupted_permutation_detected(self, mesh_small, z2_small):
        perms = z2_small.perms.copy()
        perms[1, [1, 5]] = perms[1, [5, 1]]  # swap two nodes arbitrarily
        with pytest.raises(ConfigurationError):
            SymmetryGroup("cyclic", 2, mesh_small, perms, z2_small.boundary_perms)

    def test_fixed_point_free(self, mesh_small, z2_small, d3_small):
        assert validate_fixed_point_free(z2_small, mesh_small)
        mesh_d3, d3 = d3_small
        assert validate_fixed_point_free(d3, mesh_d3)

    def test_trivial_action_not_fixed_point_free(self, mesh_small):
        ident = np.arange(mesh_small.n_nodes)[None, :]
        bident = np.arange(mesh_small.n_angular)[None, :]
        trivial = SymmetryGroup("cyclic", 1, mesh_small, ident, bident)
        assert not validate_fixed_point_free(trivial, mesh_small)


class TestSymmetrize:
    def test_cosine_cancels_under_half_turn(self, mesh_small, z2_small):
        th = mesh_small.boundary_angles()
        out = symmetrize(np.cos(th), z2_small)
        assert np.max(np.abs(out)) <= 1e-14

    def test_constants_are_fixed(self, mesh_small, z2_small):
        c = np.full(mesh_small.n_nodes, 2.5)
        assert np.array_equal(symmetrize(c, z2_small), c)

    def test_idempotent(self, mesh_small, d3_small):
        mesh, d3 = d3_small
        rng = np.random.default_rng(5)
        u = rng.normal(size=mesh.n_nodes)
        once = symmetrize(u, d3)
        twice = symmetrize(once, d3)
        assert np.max(np.abs(twice - once)) <= 1e-13

    def test_linear(self, mesh_small, z2_small):
        rng = np.random.default_rng(6)
        u = rng.normal(size=mesh_small.n_nodes)
        v = rng.normal(size=mesh_small.n_nodes)
        lhs = symmetrize(2.0 * u - 0.5 * v, z2_small)
        rhs = 2.0 * symmetrize(u, z2_small) - 0.5 * symmetrize(v, z2_small)
        assert np.max(np.abs(lhs - rhs)) <= 1e-13

    def test_projection_never_increases_energy(self, d3_small):
        mesh, d3 = d3_small
        rng = np.random.default_rng(7)
        for _ in range(10):
            u = rng.normal(size=mesh.n_nodes)
            e0 = dirichlet_energy(mesh, u)
            e1 = dirichlet_energy(mesh, symmetrize(u, d3))
            assert e1 <= e0 * (1.0 + 1e-10)

    def test_action_commutes_with_trace(self, mesh_small, z2_small):
        rng = np.random.default_rng(8)
        u = rng.normal(size=mesh_small.n_nodes)
        for gi in range(z2_small.order):
            composed = u[z2_small.perms[gi]][mesh_small.boundary_nodes]
            traced = u[mesh_small.boundary_nodes][z2_small.boundary_perms[gi]]
            assert np.array_equal(composed, traced)


class TestIsSymmetric:
    def test_constant_any_group_tol_zero(self, mesh_small, z2_small):
        assert is_symmetric(np.ones(mesh_small.n_nodes), z2_small, 0.0)

    def test_single_mode_against_groups(self, d3_small):
        mesh, d3 = d3_small
        z2 = SymmetryGroup.cyclic(mesh, 2)
        z3 = SymmetryGroup.cyclic(mesh, 3)
        r = mesh.node_radii()
        th = mesh.node_angles()
        cos3 = r**3 * np.cos(3 * th)
        assert is_symmetric(cos3, z3, 1e-12)
        assert not is_symmetric(cos3, z2, 1e-12)
        assert not is_symmetric(r * np.cos(th), z2, 1e-12)

    def test_symmetrized_random_field_passes(self, mesh_small, z2_small):
        rng = np.random.default_rng(9)
        u = symmetrize(rng.normal(size=mesh_small.n_nodes), z2_small)
        assert is_symmetric(u, z2_small, 1e-12)


class TestCurvatureSpecs:
    def test_constant(self, mesh_small):
        pair = CurvaturePair(K=CurvatureSpec(kind="constant", amplitude=1.0),
                             h=CurvatureSpec(kind="constant", amplitude=1.0))
        K, h = sample_curvatures(pair, mesh_small)
        assert np.all(K == 1.0) and np.all(h == 1.0)

    def test_angular_mode_matches_formula(self, mesh_med):
        spec = CurvatureSpec(kind="angular-mode", base=1.0, amplitude=0.5, mode=2)
        h = spec.sample_circle(mesh_med)
        th = mesh_med.boundary_angles()
        assert np.max(np.abs(h - (1.0 + 0.5 * np.cos(2.0 * th)))) == 0.0

    def test_angular_mode_symmetry_is_divisibility(self, d3_small):
        mesh, d3 = d3_small
        z3 = SymmetryGroup.cyclic(mesh, 3)
        h2 = CurvatureSpec(kind="angular-mode", base=1.0, amplitude=0.5,
                           mode=2).sample_circle(mesh)
        h3 = CurvatureSpec(kind="angular-mode", base=1.0, amplitude=0.5,
                           mode=3).sample_circle(mesh)
        assert not is_symmetric(h2, z3, 1e-12)
        assert is_symmetric(h3, z3, 1e-12)

    def test_radial_bump_on_circle_rejected(self, mesh_small):
        spec = CurvatureSpec(kind="radial-bump", amplitude=1.0)
        with pytest.raises(ConfigurationError):
            spec.sample_circle(mesh_small)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            CurvatureSpec(kind="nope")

    def test_tabulated_roundtrip_bit_exact(self, mesh_small, tmp_path):
        rng = np.random.default_rng(10)
        disk_vals = rng.normal(size=mesh_small.n_nodes)
        circ_vals = rng.normal(size=mesh_small.n_angular)
        dpath, cpath = tmp_path / "K.csv", tmp_path / "h.csv"
        save_tabulated(dpath, disk_vals, "node_id")
        save_tabulated(cpath, circ_vals, "boundary_index")
        K = load_tabulated_disk(dpath, mesh_small).sample_disk(mesh_small)
        h = load_tabulated_circle(cpath, mesh_small).sample_circle(mesh_small)
        assert np.array_equal(K, disk_vals)
        assert np.array_equal(h, circ_vals)

    def test_tabulated_wrong_header(self, mesh_small, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("id,val\n0,1.0\n")
        with pytest.raises(ConfigurationError):
            load_tabulated_disk(p, mesh_small)

    def test_symmetric_spec_samples_symmetric(self, mesh_med, z2_med):
        pair = CurvaturePair(
            K=CurvatureSpec(kind="radial-bump", base=1.0, amplitude=0.8,
                            center_radius=0.4, width=0.2),
            h=CurvatureSpec(kind="angular-mode", base=1.0, amplitude=0.5, mode=2),
        )
        K, h = sample_curvatures(pair, mesh_med)
        assert is_symmetric(K, z2_med, 1e-12)
        assert is_symmetric(h, z2_med, 1e-12)


def test_wrong_length_rejected(mesh_small, z2_small):
    with pytest.raises(InvalidFieldError):
        symmetrize(np.ones(7), z2_small)
