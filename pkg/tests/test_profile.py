"""Profile ingestion, leveling, filtering, down-sampling and spline tests."""

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from skidfem import profile as pp
from skidfem.errors import (CutoffTooLarge, NonMonotonicKnots, ParseError,
                            TooFewPoints)


def write(tmp_path, text, name="p.xy"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoad:
    def test_four_row_echo(self, tmp_path):
        p = pp.load_profile(write(tmp_path, "0 0\n1 1\n2 0\n3 1\n"))
        assert p.npoints == 4
        np.testing.assert_array_equal(p.x, [0, 1, 2, 3])
        np.testing.assert_array_equal(p.z, [0, 1, 0, 1])

    def test_out_of_order_sorted(self, tmp_path):
        p = pp.load_profile(write(tmp_path, "3 1\n0 0\n2 0\n1 1\n"))
        np.testing.assert_array_equal(p.x, [0, 1, 2, 3])
        np.testing.assert_array_equal(p.z, [0, 1, 0, 1])

    def test_three_points_rejected(self, tmp_path):
        with pytest.raises(TooFewPoints):
            pp.load_profile(write(tmp_path, "0 0\n1 1\n2 0\n"))

    def test_malformed_row_reports_line(self, tmp_path):
        with pytest.raises(ParseError) as err:
            pp.load_profile(write(tmp_path, "0 0\n1 1\nbogus\n3 1\n"))
        assert err.value.line == 3

    def test_csv_and_comments(self, tmp_path):
        text = "# header\n0,0\n1, 1\n2,0\n\n3,1\n"
        p = pp.load_profile(write(tmp_path, text))
        assert p.npoints == 4

    def test_duplicates_merged_by_averaging(self, tmp_path):
        text = "0 0\n1 2\n1 4\n2 0\n3 1\n"
        p = pp.load_profile(write(tmp_path, text))
        assert p.npoints == 4
        assert p.z[1] == pytest.approx(3.0)

    def test_roundtrip(self, tmp_path):
        p = pp.rebase(pp.load_profile(write(tmp_path, "0 1\n1 2\n2 1\n3 4\n")))
        out = tmp_path / "out.xy"
        pp.save_profile(p, out)
        q = pp.load_profile(out)
        np.testing.assert_array_equal(q.x, p.x)
        np.testing.assert_array_equal(q.z, p.z)


class TestLevel:
    def test_exact_line_removed(self):
        x = np.linspace(0, 3, 40)
        out = pp.level(pp.RawProfile(x, 2.0 + 0.5 * x))
        assert np.max(np.abs(out.z)) < 1e-10

    def test_constant_removed(self):
        x = np.linspace(0, 3, 10)
        out = pp.level(pp.RawProfile(x, np.full(10, 5.0)))
        assert np.max(np.abs(out.z)) < 1e-10

    def test_sine_plus_slope_matches_lsq_oracle(self):
        x = np.linspace(0, 20 * np.pi, 1000)
        z = np.sin(x) + 0.3 * x
        out = pp.level(pp.RawProfile(x, z))
        # independent oracle: polyfit residual
        coef = np.polyfit(x, z, 1)
        np.testing.assert_allclose(out.z, z - np.polyval(coef, x),
                                   atol=1e-10)
        slope = np.polyfit(x, out.z, 1)[0]
        assert abs(slope) < 1e-10

    def test_idempotent(self):
        rng = np.random.RandomState(3)
        x = np.sort(rng.uniform(0, 10, 200))
        x[0], x[-1] = 0.0, 10.0
        p1 = pp.level(pp.RawProfile(x, rng.normal(size=200)))
        p2 = pp.level(p1)
        assert np.max(np.abs(p2.z - p1.z)) < 1e-10


class TestGaussianFilter:
    def test_constant_unchanged(self):
        x = np.linspace(0, 50, 2000)
        out = pp.gaussian_s_filter(pp.RawProfile(x, np.full(x.size, 3.3)), 1.0)
        np.testing.assert_allclose(out.z, 3.3, rtol=1e-12)

    @staticmethod
    def _amplitude(x, z, lam):
        a = np.column_stack([np.sin(2 * np.pi * x / lam),
                             np.cos(2 * np.pi * x / lam)])
        c, *_ = np.linalg.lstsq(a, z, rcond=None)
        return float(np.hypot(*c))

    def test_cutoff_wavelength_half_transmission(self):
        lam = 1.0
        x = np.arange(0, 30, lam / 50)
        z = np.sin(2 * np.pi * x / lam)
        out = pp.gaussian_s_filter(pp.RawProfile(x, z), lam)
        sel = (x > 5) & (x < 25)
        amp = self._amplitude(x[sel], out.z[sel], lam)
        assert amp == pytest.approx(0.5, abs=0.01)

    def test_long_wavelength_preserved_vs_dense_oracle(self):
        cutoff = 0.5
        lam = 20 * cutoff
        x = np.arange(0, 5 * lam, cutoff / 20)
        z = np.sin(2 * np.pi * x / lam)
        out = pp.gaussian_s_filter(pp.RawProfile(x, z), cutoff)
        sel = (x > lam) & (x < 4 * lam)
        amp = self._amplitude(x[sel], out.z[sel], lam)
        assert amp == pytest.approx(1.0, rel=5e-3)
        # dense direct-convolution oracle at interior points (full window)
        width = pp.GAUSS_ALPHA * cutoff
        dx = x[1] - x[0]
        for i in range(x.size // 3, x.size // 3 + 7):
            w = np.exp(-np.pi * ((x - x[i]) / width) ** 2) * dx
            assert out.z[i] == pytest.approx(float(w @ z / w.sum()), abs=1e-9)

    def test_dc_gain_interior_dominated(self):
        # features well away from the ends: renormalized end weights never see
        # them, so the weighted mean is conserved to machine precision
        rng = np.random.RandomState(7)
        x = np.linspace(0, 40, 3000)
        z = rng.normal(size=x.size)
        z[(x < 5) | (x > 35)] = 0.0
        out = pp.gaussian_s_filter(pp.RawProfile(x, z), 0.8)
        mean_in = np.trapezoid(z, x) / x[-1]
        mean_out = np.trapezoid(out.z, x) / x[-1]
        assert mean_out == pytest.approx(mean_in, rel=1e-9)

    def test_cutoff_too_large(self):
        x = np.linspace(0, 5, 100)
        with pytest.raises(CutoffTooLarge):
            pp.gaussian_s_filter(pp.RawProfile(x, np.zeros(100)), 1.0)


class TestRebaseDownsample:
    def test_rebase_shift(self):
        p = pp.rebase(pp.RawProfile([5, 6, 7, 8], [3, 1, 2, 4]))
        np.testing.assert_allclose(p.x, [0, 1, 2, 3])
        np.testing.assert_allclose(p.z, [2, 0, 1, 3])

    def test_rebase_idempotent(self):
        p = pp.rebase(pp.RawProfile([5, 6, 7, 8], [3, 1, 2, 4]))
        q = pp.rebase(p)
        np.testing.assert_array_equal(q.x, p.x)
        np.testing.assert_array_equal(q.z, p.z)

    def test_rebase_negative(self):
        p = pp.rebase(pp.RawProfile([0, 1, 2, 3], [-2, -5, -3, -4]))
        np.testing.assert_allclose(p.z, [3, 0, 2, 1])

    def test_rho_one_identity(self):
        p = pp.rebase(pp.RawProfile(np.arange(11.0), np.arange(11.0) % 3))
        q = pp.downsample(p, 1)
        np.testing.assert_array_equal(q.x, p.x)

    def test_eleven_points_rho_two(self):
        p = pp.rebase(pp.RawProfile(np.arange(11.0), np.arange(11.0) % 3))
        q = pp.downsample(p, 2)
        assert q.npoints == 6
        np.testing.assert_allclose(q.x, [0, 2, 4, 6, 8, 10])

    def test_large_profile_rho_five(self):
        n = 12000
        p = pp.rebase(pp.RawProfile(np.arange(float(n)),
                                    np.sin(np.arange(n) * 0.01)))
        assert pp.downsample(p, 5).npoints == 2401

    def test_nesting(self):
        n = 257
        rng = np.random.RandomState(1)
        p = pp.rebase(pp.RawProfile(np.arange(float(n)), rng.normal(size=n)))
        twice = pp.downsample(pp.downsample(p, 2), 2)
        direct = pp.downsample(p, 4)
        # equal up to the forced inclusion of the final point
        common = min(twice.npoints, direct.npoints) - 2
        np.testing.assert_allclose(twice.x[:common], direct.x[:common])

    def test_too_few_after_downsample(self):
        p = pp.rebase(pp.RawProfile(np.arange(5.0), np.arange(5.0)))
        with pytest.raises(TooFewPoints):
            pp.downsample(p, 4)


class TestSpline:
    def test_linear_reproduced(self):
        x = np.linspace(0, 2, 9)
        s = pp.build_spline(pp.Profile(x, 3 * x + 1))
        xq = np.linspace(0, 2, 301)
        np.testing.assert_allclose(pp.eval_spline(s, xq), 3 * xq + 1,
                                   atol=1e-12)
        np.testing.assert_allclose(pp.eval_spline_slope(s, xq), 3.0,
                                   atol=1e-12)

    def test_cubic_against_scipy_oracle(self):
        x = np.linspace(0, 1, 5)
        z = x ** 3
        s = pp.build_spline(pp.Profile(x, z))
        oracle = CubicSpline(x, z, bc_type="natural")
        mid = 0.5 * (x[:-1] + x[1:])
        np.testing.assert_allclose(pp.eval_spline(s, mid), oracle(mid),
                                   atol=1e-10)

    def test_knots_reproduced_exactly(self):
        rng = np.random.RandomState(11)
        x = np.sort(rng.uniform(0, 10, 40))
        z = rng.normal(size=40)
        s = pp.build_spline(pp.Profile(x, z))
        err = np.abs(pp.eval_spline(s, x) - z)
        assert err.max() < 1e-12 * max(1.0, np.abs(z).max())

    def test_nonmonotonic_rejected(self):
        with pytest.raises(NonMonotonicKnots):
            pp.build_spline(pp.Profile(np.array([0.0, 1.0, 1.0, 2.0]),
                                       np.zeros(4)))

    def test_slope_against_finite_difference_oracle(self):
        x = np.linspace(0, 2 * np.pi, 60)
        s = pp.build_spline(pp.Profile(x, np.sin(x)))
        mid = 0.5 * (x[:-1] + x[1:])
        h = (x[1] - x[0]) / 100.0
        fd = (pp.eval_spline(s, mid + h) - pp.eval_spline(s, mid - h)) / (2 * h)
        slope = pp.eval_spline_slope(s, mid)
        np.testing.assert_allclose(slope, fd, rtol=1e-6, atol=1e-9)

    def test_c1_across_knots(self):
        rng = np.random.RandomState(5)
        x = np.sort(rng.uniform(0, 4, 25))
        s = pp.build_spline(pp.Profile(x, rng.normal(size=25)))
        h = 1e-9
        for k in range(1, 24):
            left = pp.eval_spline_slope(s, x[k] - h)
            right = pp.eval_spline_slope(s, x[k] + h)
            assert left == pytest.approx(right, rel=1e-6, abs=1e-8)

    def test_clamp_counts_and_warns(self, caplog):
        x = np.linspace(0, 1, 6)
        s = pp.build_spline(pp.Profile(x, x ** 2))
        with caplog.at_level("WARNING", logger="skidfem"):
            pp.eval_spline(s, -0.5)
            pp.eval_spline(s, 1.5)
        assert s.clamp_count == 2
        assert sum("clamping" in r.message for r in caplog.records) == 1

    def test_random_profiles_consistency(self):
        rng = np.random.RandomState(42)
        for _ in range(20):
            n = rng.randint(4, 60)
            x = np.sort(rng.uniform(0, 5, n))
            while np.any(np.diff(x) <= 1e-12):
                x = np.sort(rng.uniform(0, 5, n))
            z = rng.normal(size=n)
            s = pp.build_spline(pp.Profile(x, z))
            err = np.abs(pp.eval_spline(s, x) - z).max()
            assert err < 1e-12 * max(1.0, np.abs(z).max())
