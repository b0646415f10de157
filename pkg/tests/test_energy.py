import math

import numpy as np
import pytest
import scipy.optimize

import diskcurv.energy as en
from conftest import smooth_random_field
from diskcurv.errors import EndpointRhoError, OutsideAdmissibleSetError
from diskcurv.fields import symmetrize
from diskcurv.mesh import dirichlet_energy

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def ones(mesh_med):
    return np.ones(mesh_med.n_nodes), np.ones(mesh_med.n_angular)


class TestCorrectionTerm:
    def test_endpoint_limits(self):
        assert en.f_correction(0.0) == pytest.approx(8 * math.pi * math.log(TWO_PI),
                                                     rel=1e-15)
        assert en.f_correction(TWO_PI) == pytest.approx(
            4 * math.pi + 4 * math.pi * math.log(TWO_PI), rel=1e-15)

    def test_interior_value(self):
        # direct substitution at rho = pi: 6*pi*log(pi) + 2*pi
        assert en.f_correction(math.pi) == pytest.approx(
            6 * math.pi * math.log(math.pi) + 2 * math.pi, rel=1e-14)

    def test_continuous_at_endpoints(self):
        assert en.f_correction(1e-13) == pytest.approx(en.f_correction(0.0), abs=1e-10)
        assert en.f_correction(TWO_PI - 1e-13) == pytest.approx(
            en.f_correction(TWO_PI), abs=1e-10)

    def test_domain_validated(self):
        with pytest.raises(ValueError):
            en.f_correction(-0.1)
        with pytest.raises(ValueError):
            en.f_correction(TWO_PI + 0.1)


class TestLogIntegrals:
    def test_flat_values(self, mesh_med, ones):
        K, h = ones
        z = np.zeros(mesh_med.n_nodes)
        assert en.log_area_integral(mesh_med, K, z) == pytest.approx(
            math.log(mesh_med.area), rel=1e-14)
        assert en.log_boundary_integral(mesh_med, h, z) == pytest.approx(
            math.log(TWO_PI), rel=1e-14)

    def test_shift_identity(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(0)
        u = smooth_random_field(mesh_med, rng)
        for c in (-3.0, 1.7, 40.0):
            assert en.log_area_integral(mesh_med, K, u + c) == pytest.approx(
                c + en.log_area_integral(mesh_med, K, u), rel=1e-12)
            assert en.log_boundary_integral(mesh_med, h, u + c) == pytest.approx(
                0.5 * c + en.log_boundary_integral(mesh_med, h, u), rel=1e-12)

    def test_cap_profile_mass(self, mesh_med, ones):
        # int e^u for u = 2 log(2/(1+r^2)) equals 2*pi (1D oracle: the radial
        # integral of 8*pi*r/(1+r^2)^2 from 0 to 1)
        K, _ = ones
        r2 = (mesh_med.nodes**2).sum(axis=1)
        u = 2.0 * np.log(2.0 / (1.0 + r2))
        assert en.log_area_integral(mesh_med, K, u) == pytest.approx(
            math.log(TWO_PI), abs=3e-3)

    def test_concentration_no_overflow(self, mesh_med, ones):
        K, h = ones
        u = np.full(mesh_med.n_nodes, 700.0)
        u[0] = 750.0
        val = en.log_area_integral(mesh_med, K, u)
        assert np.isfinite(val) and val > 700.0

    def test_nonpositive_integral_raises(self, mesh_med, ones):
        _, h = ones
        z = np.zeros(mesh_med.n_nodes)
        with pytest.raises(OutsideAdmissibleSetError) as err:
            en.log_area_integral(mesh_med, -np.ones(mesh_med.n_nodes), z)
        assert err.value.which == "area"
        with pytest.raises(OutsideAdmissibleSetError) as err:
            en.log_boundary_integral(mesh_med, -np.ones(mesh_med.n_angular), z)
        assert err.value.which == "boundary"


class TestEnergy:
    def test_breakdown_total_is_sum(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(1)
        u = smooth_random_field(mesh_med, rng)
        bd = en.energy(mesh_med, K, h, u, 2.0)
        total = bd.dirichlet + bd.area_log + bd.boundary_linear \
            + bd.boundary_log + bd.f_rho
        assert bd.total == total
        assert bd.dirichlet >= 0.0

    def test_flat_field_composition(self, mesh_med, ones):
        K, h = ones
        z = np.zeros(mesh_med.n_nodes)
        bd = en.energy(mesh_med, K, h, z, math.pi)
        expected = (-2.0 * math.pi * math.log(mesh_med.area)
                    - 4.0 * math.pi * math.log(TWO_PI)
                    + en.f_correction(math.pi))
        assert bd.total == pytest.approx(expected, rel=1e-13)
        # continuum value with the disk area in place of the mesh area
        continuum = (-2.0 * math.pi * math.log(math.pi)
                     - 4.0 * math.pi * math.log(TWO_PI)
                     + en.f_correction(math.pi))
        assert bd.total == pytest.approx(continuum, abs=2e-2)

    def test_reduces_to_limits_at_endpoints(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(2)
        u = smooth_random_field(mesh_med, rng)
        assert en.energy(mesh_med, K, h, u, 0.0).total == en.energy_limit0(
            mesh_med, h, u)
        assert en.energy(mesh_med, K, h, u, TWO_PI).total == en.energy_limit2pi(
            mesh_med, K, u)

    def test_shift_invariance(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(3)
        for _ in range(100):
            u = smooth_random_field(mesh_med, rng)
            c = rng.uniform(-5.0, 5.0)
            rho = rng.uniform(1e-3, TWO_PI - 1e-3)
            base = en.energy(mesh_med, K, h, u, rho).total
            shifted = en.energy(mesh_med, K, h, u + c, rho).total
            assert abs(shifted - base) <= 1e-9 * (1.0 + abs(base))

    def test_limit0_zero_at_flat(self, mesh_med, ones):
        _, h = ones
        z = np.zeros(mesh_med.n_nodes)
        assert en.energy_limit0(mesh_med, h, z) == pytest.approx(0.0, abs=1e-12)
        assert en.energy_limit0(mesh_med, h, z + 4.2) == pytest.approx(0.0, abs=1e-10)

    def test_limit2pi_constant_value(self, mesh_med, ones):
        K, _ = ones
        z = np.zeros(mesh_med.n_nodes)
        val = en.energy_limit2pi(mesh_med, K, z)
        exact_discrete = (-4.0 * math.pi * math.log(mesh_med.area)
                          + 4.0 * math.pi + 4.0 * math.pi * math.log(TWO_PI))
        assert val == pytest.approx(exact_discrete, rel=1e-13)
        assert val == pytest.approx(4.0 * math.pi * (1.0 + math.log(2.0)), abs=3e-2)
        assert en.energy_limit2pi(mesh_med, K, z + 5.0) == pytest.approx(val, abs=1e-9)

    def test_limit2pi_at_cap_profile(self, mesh_med, ones):
        # continuum value 8*pi*log(2), assembled from the radial oracles
        K, _ = ones
        r2 = (mesh_med.nodes**2).sum(axis=1)
        u = 2.0 * np.log(2.0 / (1.0 + r2))
        assert en.energy_limit2pi(mesh_med, K, u) == pytest.approx(
            8.0 * math.pi * math.log(2.0), abs=5e-2)


class TestGradients:
    def test_grad_u_pairs_to_zero_with_constants(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(4)
        u = smooth_random_field(mesh_med, rng)
        g = en.grad_u(mesh_med, K, h, u, 2.0)
        assert abs(float(np.sum(g))) <= 1e-12

    def test_grad_u_matches_central_differences(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(5)
        step = 1e-5
        for _ in range(20):
            u = smooth_random_field(mesh_med, rng)
            rho = rng.uniform(0.3, TWO_PI - 0.3)
            d = smooth_random_field(mesh_med, rng)
            g = en.grad_u(mesh_med, K, h, u, rho)
            directional = float(np.dot(g, d))
            fplus = en.energy(mesh_med, K, h, u + step * d, rho).total
            fminus = en.energy(mesh_med, K, h, u - step * d, rho).total
            fd = (fplus - fminus) / (2.0 * step)
            assert fd == pytest.approx(directional, rel=1e-6)

    def test_grad_rho_matches_central_differences(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(6)
        step = 1e-6
        for _ in range(20):
            u = smooth_random_field(mesh_med, rng)
            rho = rng.uniform(0.3, TWO_PI - 0.3)
            g = en.grad_rho(mesh_med, K, h, u, rho)
            fd = (en.energy(mesh_med, K, h, u, rho + step).total
                  - en.energy(mesh_med, K, h, u, rho - step).total) / (2.0 * step)
            assert fd == pytest.approx(g, rel=1e-8)

    def test_grad_rho_root_is_mass_balance(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(7)
        u = smooth_random_field(mesh_med, rng)
        rho = en.rho_stationary(mesh_med, K, h, u)
        assert abs(en.grad_rho(mesh_med, K, h, u, rho)) <= 1e-12
        lhs = (TWO_PI - rho) ** 2 / rho
        rhs = math.exp(2.0 * en.log_boundary_integral(mesh_med, h, u)
                       - en.log_area_integral(mesh_med, K, u))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_grad_rho_endpoints_raise(self, mesh_med, ones):
        K, h = ones
        z = np.zeros(mesh_med.n_nodes)
        with pytest.raises(EndpointRhoError):
            en.grad_rho(mesh_med, K, h, z, 0.0)
        with pytest.raises(EndpointRhoError):
            en.grad_rho(mesh_med, K, h, z, TWO_PI)

    def test_flat_constant_curvature_root(self, mesh_med, ones):
        # at u = 0 the balance reads (2pi-rho)^2/rho = 4*pi^2/|disk|, whose
        # interior root is (4 - 2*sqrt(3))*pi for the exact disk area
        K, h = ones
        z = np.zeros(mesh_med.n_nodes)
        rho = en.rho_stationary(mesh_med, K, h, z)
        assert rho == pytest.approx((4.0 - 2.0 * math.sqrt(3.0)) * math.pi, abs=5e-3)
        # bisection oracle on the rho-derivative
        bracket = scipy.optimize.brentq(
            lambda r: en.grad_rho(mesh_med, K, h, z, r), 1e-6, TWO_PI - 1e-6)
        assert rho == pytest.approx(bracket, rel=1e-10)

    def test_optimal_rho_matches_bisection(self, mesh_med, ones):
        K, h = ones
        rng = np.random.default_rng(8)
        for _ in range(10):
            u = smooth_random_field(mesh_med, rng)
            lk = en.log_area_integral(mesh_med, K, u)
            lh = en.log_boundary_integral(mesh_med, h, u)
            rho, sigma = en.optimal_rho(lk, lh)
            assert rho + sigma == pytest.approx(TWO_PI, rel=1e-14)
            oracle = scipy.optimize.brentq(
                lambda r: en.grad_rho(mesh_med, K, h, u, r), 1e-8, TWO_PI - 1e-8,
                xtol=1e-14)
            assert rho == pytest.approx(oracle, rel=1e-9)

    def test_optimal_rho_extreme_ratios(self):
        rho, sigma = en.optimal_rho(-200.0, 0.0)
        assert 0.0 < rho < 1e-50 and sigma == pytest.approx(TWO_PI)
        rho, sigma = en.optimal_rho(200.0, 0.0)
        assert 0.0 < sigma < 1e-20 and rho == pytest.approx(TWO_PI)


class TestLowerBoundProbe:
    def test_energy_bounded_below_over_samples(self, mesh_med, ones, z2_med):
        K, h = ones
        rng = np.random.default_rng(9)
        rhos = np.linspace(0.05, TWO_PI - 0.05, 7)
        running = []
        current = math.inf
        for i in range(40):
            u = symmetrize(smooth_random_field(mesh_med, rng), z2_med)
            norm = math.sqrt(dirichlet_energy(mesh_med, u)
                             + float(np.dot(mesh_med.interior_weights, u**2)))
            u *= rng.uniform(0.5, 10.0) / max(norm, 1e-12)
            for rho in rhos:
                current = min(current, en.energy(mesh_med, K, h, u, float(rho)).total)
            running.append(current)
        assert np.isfinite(running[-1])
        assert running[-1] > -15.0
        # the empirical minimum stabilizes under sampling growth
        assert running[-1] >= running[19] - 1.0
