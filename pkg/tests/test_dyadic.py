import numpy as np
import pytest

from parafields.dyadic import (
    ALTERNATE_PROFILE,
    DEFAULT_PROFILE,
    block_project,
    build_partition,
    second_order_blocks,
    truncation_energy,
)
from parafields.lattice import Field, SpatialField, make_grid, sample, spatial_inverse


@pytest.fixture
def grid():
    # hosts 4 parabolic shells and 4 spatial shells
    return make_grid(1, 128, 128, 4.0, 8.0, 1.0)


@pytest.fixture
def parabolic(grid):
    return build_partition(grid, "parabolic")


@pytest.fixture
def spatial(grid):
    return build_partition(grid, "spatial")


class TestBumpProfile:
    @pytest.mark.parametrize("profile", [DEFAULT_PROFILE, ALTERNATE_PROFILE])
    def test_chi_at_one(self, profile):
        assert profile.chi(np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("profile", [DEFAULT_PROFILE, ALTERNATE_PROFILE])
    def test_support(self, profile):
        r = np.array([0.0, 0.25, 0.5, 2.0, 3.0, 10.0])
        assert np.max(profile.chi(r)) == 0.0
        inside = np.linspace(0.55, 1.9, 40)
        assert np.all(profile.chi(inside) >= 0.0)
        assert np.all(profile.chi(inside) <= 1.0)

    @pytest.mark.parametrize("profile", [DEFAULT_PROFILE, ALTERNATE_PROFILE])
    def test_telescoping_identity(self, profile):
        r = np.linspace(0.5, 1.0, 101)
        s = profile.chi(r) + profile.chi(2 * r)
        assert np.max(np.abs(s - 1.0)) < 1e-12

    @pytest.mark.parametrize("profile", [DEFAULT_PROFILE, ALTERNATE_PROFILE])
    def test_full_dyadic_sum(self, profile):
        r = np.geomspace(0.01, 100.0, 57)
        total = sum(profile.chi(2.0**-i * r) for i in range(-10, 12))
        assert np.max(np.abs(total - 1.0)) < 1e-12


class TestBuildPartition:
    def test_partition_of_unity_parabolic(self, parabolic):
        total = parabolic.psi_hat + sum(parabolic.phi_hats)
        assert np.max(np.abs(total - 1.0)) < 1e-10

    def test_partition_of_unity_spatial(self, spatial):
        total = spatial.psi_hat + sum(spatial.phi_hats)
        assert np.max(np.abs(total - 1.0)) < 1e-10

    def test_low_frequencies_in_psi(self, parabolic):
        low = parabolic.rho <= 0.5
        assert np.all(parabolic.psi_hat[low] == 1.0)
        for phi in parabolic.phi_hats:
            assert np.max(np.abs(phi[low])) == 0.0

    def test_exact_power_lattice_point(self, spatial):
        # |xi| = 4 = 2^2 exists on this lattice: shell 2 equals 1 there
        idx = np.argmin(np.abs(spatial.rho - 4.0))
        assert spatial.rho.flat[idx] == pytest.approx(4.0)
        assert spatial.phi_hats[1].flat[idx] == pytest.approx(1.0, abs=1e-12)
        for j in (0, 2, 3):
            assert spatial.phi_hats[j].flat[idx] == pytest.approx(0.0, abs=1e-12)

    def test_supports(self, parabolic):
        for i, phi in enumerate(parabolic.phi_hats, start=1):
            outside = (parabolic.rho <= 2.0 ** (i - 1)) | (parabolic.rho >= 2.0 ** (i + 1))
            assert np.max(np.abs(phi[outside])) == 0.0
            assert np.min(phi) >= 0.0 and np.max(phi) <= 1.0

    def test_random_points_sum(self, parabolic):
        rng = np.random.default_rng(0)
        flat_idx = rng.integers(0, parabolic.psi_hat.size, size=10_000)
        total = parabolic.psi_hat.flat[flat_idx] + sum(p.flat[flat_idx] for p in parabolic.phi_hats)
        assert np.max(np.abs(total - 1.0)) < 1e-10

    def test_too_coarse_grid_rejected(self):
        # |xi| <= 4 hosts only 2 spatial shells
        spec = make_grid(1, 128, 128, 16.0, 16.0, 1.0)
        with pytest.raises(ValueError, match="too coarse"):
            build_partition(spec, "spatial")

    def test_anisotropy_law(self, parabolic):
        # phi_i(xi, tau) == phi_{i+1}(2 xi, 4 tau) wherever both are on the lattice
        spec = parabolic.spec
        profile = parabolic.profile
        rng = np.random.default_rng(1)
        for _ in range(200):
            k = rng.integers(-spec.Nx // 4, spec.Nx // 4)
            m = rng.integers(-spec.Nt // 8, spec.Nt // 8)
            xi, tau = k / spec.Lx, m / spec.Lt
            rho = abs(xi) + np.sqrt(abs(2 * np.pi * tau))
            rho2 = abs(2 * xi) + np.sqrt(abs(2 * np.pi * 4 * tau))
            for i in range(1, parabolic.I_max):
                a = profile.chi(np.array([2.0**-i * rho]))[0]
                b = profile.chi(np.array([2.0 ** -(i + 1) * rho2]))[0]
                assert a == pytest.approx(b, abs=1e-12)


class TestBlockProject:
    def test_constant_in_block_zero(self, grid, parabolic):
        f = sample(grid, lambda x, t: np.ones_like(x))
        b0 = block_project(parabolic, 0, f)
        assert np.max(np.abs(b0.values - 1.0)) < 1e-12
        for i in range(1, parabolic.I_max + 1):
            bi = block_project(parabolic, i, f)
            assert np.max(np.abs(bi.values)) < 1e-12

    def test_pure_mode_on_exact_shell(self, grid, parabolic):
        # spatial mode with rho = |xi| = 4 = 2^2 lands in block 2 alone
        k = int(round(4.0 * grid.Lx))
        f = sample(grid, lambda x, t: np.exp(2j * np.pi * k * x / grid.Lx))
        b2 = block_project(parabolic, 2, f)
        assert np.linalg.norm(b2.values - f.values) / np.linalg.norm(f.values) < 1e-12
        for i in (0, 1, 3, 4):
            assert np.max(np.abs(block_project(parabolic, i, f).values)) < 1e-12

    def test_blocks_resum_to_identity(self, grid, parabolic):
        rng = np.random.default_rng(5)
        f = Field(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
        total = sum(
            block_project(parabolic, i, f).values for i in range(parabolic.I_max + 1)
        )
        assert np.linalg.norm(total - f.values) / np.linalg.norm(f.values) < 1e-10

    def test_out_of_range_index(self, grid, parabolic):
        f = sample(grid, lambda x, t: np.ones_like(x))
        with pytest.raises(ValueError, match="out of range"):
            block_project(parabolic, parabolic.I_max + 1, f)

    def test_spatial_projection(self, grid, spatial):
        rng = np.random.default_rng(6)
        g = SpatialField(grid, rng.normal(size=grid.spatial_shape) + 0j)
        total = sum(block_project(spatial, i, g).values for i in range(spatial.I_max + 1))
        assert np.linalg.norm(total - g.values) / np.linalg.norm(g.values) < 1e-10


class TestSecondOrderBlocks:
    def test_flat_on_core_blocks(self, spatial):
        blocks = second_order_blocks(spatial)
        for i in range(2, spatial.I_max + 1):
            core = spatial.phi_hats[i - 1]
            enlarged = blocks.enlarged[i]
            on = core > 0
            assert np.max(np.abs(enlarged[on] - 1.0)) < 1e-12

    def test_product_identity(self, spatial):
        blocks = second_order_blocks(spatial)
        for i in range(2, spatial.I_max + 1):
            core = spatial.phi_hats[i - 1]
            assert np.max(np.abs(blocks.enlarged[i] * core - core)) < 1e-12

    def test_low_block_flat_at_dc(self, spatial):
        blocks = second_order_blocks(spatial)
        low_region = spatial.rho <= 0.5
        assert np.max(np.abs(blocks.low[low_region] - 1.0)) < 1e-12

    def test_low_block_covers_psi_and_first_shell(self, spatial):
        blocks = second_order_blocks(spatial)
        region = (spatial.psi_hat + spatial.phi_hats[0]) > 0
        assert np.max(np.abs(blocks.low[region] - 1.0)) < 1e-12

    def test_exact_dyadic_point_is_flat(self, spatial):
        blocks = second_order_blocks(spatial)
        for j in (2, 3):
            idx = np.argmin(np.abs(spatial.rho - 2.0**j))
            assert spatial.rho.flat[idx] == pytest.approx(2.0**j)
            assert blocks.enlarged[j].flat[idx] == pytest.approx(1.0, abs=1e-12)

    def test_parabolic_rejected(self, parabolic):
        with pytest.raises(ValueError, match="spatial"):
            second_order_blocks(parabolic)


class TestTruncationEnergy:
    def test_low_frequency_field_clean(self, grid, parabolic):
        f = sample(grid, lambda x, t: np.exp(2j * np.pi * x / grid.Lx))
        assert truncation_energy(parabolic, f) < 1e-16

    def test_guard_mode_flagged(self, grid, parabolic):
        coeffs = np.zeros(grid.shape, dtype=complex)
        hot = np.argwhere(parabolic.guard_mask)[0]
        coeffs[tuple(hot)] = 1.0
        from parafields.lattice import Spectrum, inverse

        f = inverse(Spectrum(grid, coeffs))
        assert truncation_energy(parabolic, f) == pytest.approx(1.0)

    def test_zero_field(self, grid, parabolic):
        f = Field(grid, np.zeros(grid.shape, dtype=complex))
        assert truncation_energy(parabolic, f) == 0.0


class TestProfileIndependence:
    def test_alternate_profile_partition(self, grid):
        part = build_partition(grid, "parabolic", profile=ALTERNATE_PROFILE)
        total = part.psi_hat + sum(part.phi_hats)
        assert np.max(np.abs(total - 1.0)) < 1e-10
