import numpy as np
import pytest

from imexkg import (
    HStabilityGrid,
    hstability_matrix,
    imkg_explicit_polynomial,
    implicit_stability_function,
    lookup,
    min_gamma,
    region_T_contained,
    registry,
    scan_grid,
    spectral_radius,
    stable_column_width,
    write_grid_csv,
)
from imexkg.hevi import DEFAULT_EXTRA_Z, kernel_name, read_grid_csv

RNG = np.random.default_rng(4242)


class TestAmplificationMatrix:
    def test_origin_is_identity(self):
        for name in ("IMKG232a", "IMKG343a"):
            R = hstability_matrix(lookup(name).tableau, 0.0, 0.0)
            assert np.allclose(R, np.eye(3), atol=1e-15)
            assert spectral_radius(R) == pytest.approx(1.0, abs=1e-12)

    def test_negative_arguments_rejected(self):
        with pytest.raises(ValueError):
            hstability_matrix(lookup("IMKG232a").tableau, -0.1, 0.0)

    @pytest.mark.parametrize("entry", registry(), ids=lambda e: e.name)
    def test_axis_identities(self, entry):
        if entry.tableau is None:
            pytest.skip("record did not normalize to a tableau")
        t = entry.tableau
        P = imkg_explicit_polynomial(entry.coefficients)
        R = implicit_stability_function(t.implicit_part)
        for x in np.linspace(0.0, 3.0, 7):
            rho = spectral_radius(hstability_matrix(t, float(x), 0.0))
            assert rho == pytest.approx(
                max(1.0, float(P.abs_on_imaginary_axis(x))), abs=1e-10
            )
        for z in np.linspace(0.0, 40.0, 7):
            rho = spectral_radius(hstability_matrix(t, 0.0, float(z)))
            assert rho == pytest.approx(
                max(1.0, float(R.abs_on_imaginary_axis(z))), abs=1e-10
            )


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(np.eye(3)) == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        m = np.diag([2j, 0.5, -1.0])
        assert spectral_radius(m) == pytest.approx(2.0, abs=1e-12)

    def test_against_eigvals_oracle(self):
        for _ in range(200):
            m = RNG.standard_normal((3, 3)) + 1j * RNG.standard_normal((3, 3))
            want = float(np.abs(np.linalg.eigvals(m)).max())
            assert spectral_radius(m) == pytest.approx(want, abs=1e-10 * max(1, want))

    def test_defective_matrix(self):
        m = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
        assert spectral_radius(m) == pytest.approx(1.0, abs=1e-6)


class TestScan:
    def test_single_point_grid(self):
        g = scan_grid(lookup("IMKG232a").tableau, 1.0, 1.0, 1, 1)
        assert g.rho.shape == (1, 1)
        assert g.rho[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_kernels_agree(self):
        t = lookup("IMKG343a").tableau
        g_py = scan_grid(t, 3.0, 50.0, 41, 41, (100.0,), kernel="python")
        if kernel_name() != "compiled":
            pytest.skip("compiled kernel not built")
        g_cy = scan_grid(t, 3.0, 50.0, 41, 41, (100.0,), kernel="compiled")
        assert np.abs(g_py.rho - g_cy.rho).max() < 1e-12

    def test_scan_matches_pointwise_api(self):
        t = lookup("IMKG253a").tableau
        g = scan_grid(t, 2.0, 10.0, 5, 5)
        for i, x in enumerate(g.x_grid):
            for j, z in enumerate(g.z_grid):
                rho = spectral_radius(hstability_matrix(t, float(x), float(z)))
                assert g.rho[i, j] == pytest.approx(rho, abs=1e-12)

    def test_extra_samples_appended_sorted(self):
        g = scan_grid(lookup("IMKG232a").tableau, 1.0, 10.0, 3, 3, (1e6, 100.0))
        assert list(g.z_grid) == [0.0, 5.0, 10.0, 100.0, 1e6]

    def test_invalid_extents_rejected(self):
        t = lookup("IMKG232a").tableau
        with pytest.raises(ValueError):
            scan_grid(t, -1.0, 1.0, 3, 3)
        with pytest.raises(ValueError):
            scan_grid(t, 1.0, 1.0, 0, 3)

    def test_unknown_kernel_rejected(self):
        with pytest.raises(ValueError):
            scan_grid(lookup("IMKG232a").tableau, 1.0, 1.0, 2, 2, kernel="fortran")


@pytest.fixture(scope="module")
def grids():
    out = {}
    for name in ("IMKG232a", "IMKG232b"):
        out[name] = scan_grid(lookup(name).tableau, 2.5, 50.0, 201, 201, DEFAULT_EXTRA_Z)
    return out


class TestRegions:
    def test_232b_contains_T2(self, grids):
        assert region_T_contained(grids["IMKG232b"], 2.0)

    def test_232a_violates_T2(self, grids):
        assert not region_T_contained(grids["IMKG232a"], 2.0)

    def test_trivial_containment_at_zero(self, grids):
        assert region_T_contained(grids["IMKG232a"], 0.0)

    def test_grid_must_cover_n0(self, grids):
        with pytest.raises(ValueError):
            region_T_contained(grids["IMKG232a"], 3.0)

    def test_min_gamma_zero_when_contained(self, grids):
        assert min_gamma(grids["IMKG232b"], 2.0) == 0.0

    def test_min_gamma_single_witness(self):
        xs = np.array([0.0, 1.0])
        zs = np.array([0.0, 0.3, 0.6])
        rho = np.ones((2, 3))
        rho[1, 1] = 1.01
        g = HStabilityGrid(xs, zs, rho)
        assert min_gamma(g, 1.0) == pytest.approx(0.3)

    def test_min_gamma_none_when_top_unstable(self):
        xs = np.array([0.0, 1.0])
        zs = np.array([0.0, 0.5, 1.0])
        rho = np.ones((2, 3))
        rho[1, 2] = 1.5
        g = HStabilityGrid(xs, zs, rho)
        assert min_gamma(g, 1.0) is None

    def test_min_gamma_axis_unstable_raises(self):
        xs = np.array([0.0, 1.0])
        zs = np.array([0.0, 0.5])
        rho = np.ones((2, 2))
        rho[1, 0] = 1.5
        g = HStabilityGrid(xs, zs, rho)
        with pytest.raises(ValueError, match="explicit axis"):
            min_gamma(g, 1.0)

    def test_width_ratio_about_half(self, grids):
        wa = stable_column_width(grids["IMKG232a"])
        wb = stable_column_width(grids["IMKG232b"])
        assert 0.35 <= wa / wb <= 0.65

    def test_refinement_keeps_violations(self):
        t = lookup("IMKG232a").tableau
        coarse = scan_grid(t, 2.5, 50.0, 51, 51, DEFAULT_EXTRA_Z)
        fine = scan_grid(t, 2.5, 50.0, 101, 101, DEFAULT_EXTRA_Z)
        assert not region_T_contained(coarse, 2.0)
        assert not region_T_contained(fine, 2.0)


class TestCsv:
    def test_round_trip(self, tmp_path):
        g = scan_grid(lookup("IMKG232a").tableau, 1.5, 5.0, 7, 5, (100.0,))
        path = tmp_path / "grid.csv"
        write_grid_csv(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,z,rho"
        assert len(lines) == 1 + 7 * 6
        back = read_grid_csv(path)
        assert np.array_equal(back.rho, g.rho)
        assert np.array_equal(back.x_grid, g.x_grid)

    def test_partial_grid_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("x,z,rho\n0,0,1\n0,1,1\n1,0,1\n")
        with pytest.raises(ValueError, match="tensor grid"):
            read_grid_csv(path)
