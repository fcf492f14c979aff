"""Roughness descriptor tests: analytic waves, oracles, invariants."""

import numpy as np
import pytest

from skidfem import profile as pp
from skidfem import roughness as rg
from skidfem.errors import NoElementsFound, TooFewPointsPerSection


def sine(amplitude=1.0, lam=10.0, length=100.0, n=4001, phase=np.pi / 2):
    # cosine phase by default: even about the profile centre, so the global
    # least-squares line is exactly zero (a plain sine over integer periods
    # has a genuine nonzero regression slope from its end imbalance)
    x = np.linspace(0.0, length, n)
    return pp.Profile(x, amplitude * np.sin(2 * np.pi * x / lam + phase))


def triangle(amplitude=1.0, lam=10.0, length=100.0, n=8001):
    x = np.linspace(0.0, length, n)
    frac = (x / lam) % 1.0
    z = amplitude * (4 * np.abs(frac - 0.5) - 1.0)
    return pp.Profile(x, z)


class TestAmplitude:
    def test_sine(self):
        pa, pq, pt = rg.amplitude_params(sine())
        assert pa == pytest.approx(2 / np.pi, rel=5e-3)
        assert pq == pytest.approx(1 / np.sqrt(2), rel=5e-3)
        assert pt == pytest.approx(2.0, rel=5e-3)

    def test_constant(self):
        p = pp.Profile(np.linspace(0, 10, 50), np.full(50, 2.0))
        assert rg.amplitude_params(p) == (0.0, 0.0, 0.0)

    def test_triangle_vs_quadrature_oracle(self):
        p = triangle()
        pa, pq, pt = rg.amplitude_params(p)
        assert pa == pytest.approx(0.5, rel=5e-3)
        assert pq == pytest.approx(1 / np.sqrt(3), rel=5e-3)
        assert pt == pytest.approx(2.0, rel=5e-3)
        # dense numeric quadrature oracle on the same wave
        x = np.linspace(0, 100, 200001)
        frac = (x / 10.0) % 1.0
        z = 4 * np.abs(frac - 0.5) - 1.0
        zbar = np.trapezoid(z, x) / 100.0
        assert pa == pytest.approx(np.trapezoid(np.abs(z - zbar), x) / 100.0,
                                   rel=1e-3)


class TestSections:
    def test_sine_five_sections(self):
        # 100 mm, lam 10: each 20 mm section holds 2 full periods
        ppt, pvt, pz = rg.section_params(sine(), n_sections=5)
        assert ppt == pytest.approx(1.0, rel=0.01)
        assert pvt == pytest.approx(1.0, rel=0.01)
        assert pz == pytest.approx(2.0, rel=0.01)

    def test_spike_against_bruteforce_oracle(self):
        x = np.linspace(0, 100, 2001)
        z = np.zeros_like(x)
        z[1000] = 3.0  # spike at mid-profile
        p = pp.Profile(x, z)
        n_sec = 5
        ppt, pvt, pz = rg.section_params(p, n_sections=n_sec)
        # brute-force per-section scan
        slope, intercept = np.polyfit(x, z, 1)
        r = z - (slope * x + intercept)
        edges = np.linspace(0, 100, n_sec + 1)
        peaks, pits = [], []
        for s in range(n_sec):
            sel = (x >= edges[s]) & (x <= edges[s + 1] if s == n_sec - 1
                                     else x < edges[s + 1])
            peaks.append(r[sel].max())
            pits.append(-r[sel].min())
        assert ppt == pytest.approx(max(peaks), abs=1e-12)
        assert pvt == pytest.approx(max(pits), abs=1e-12)
        assert pz == pytest.approx(np.mean(np.array(peaks) + np.array(pits)),
                                   abs=1e-12)

    def test_single_section_equals_total(self):
        p = sine(n=2001)
        pa, pq, pt = rg.amplitude_params(p)
        ppt, pvt, pz = rg.section_params(p, n_sections=1)
        assert ppt + pvt == pytest.approx(pt, rel=1e-9)
        assert pz == pytest.approx(pt, rel=1e-9)

    def test_too_few_points(self):
        p = pp.Profile(np.linspace(0, 1, 30), np.zeros(30))
        with pytest.raises(TooFewPointsPerSection):
            rg.section_params(p, n_sections=5)


class TestElements:
    def test_sine_elements(self):
        # phase and extra run-out give one upward crossing per period plus one
        lam, n_per = 10.0, 8
        x = np.linspace(0.0, n_per * lam + 0.6 * lam, 9000)
        p = pp.Profile(x, np.sin(2 * np.pi * x / lam - 0.1))
        psm, psmx, pc, pcx, elements = rg.element_params(p)
        assert len(elements) == n_per
        assert psm == pytest.approx(lam, rel=0.01)
        assert psmx == pytest.approx(lam, rel=0.01)
        assert pc == pytest.approx(2.0, rel=0.01)
        assert pcx == pytest.approx(2.0, rel=0.01)

    def test_two_tone_discrimination_vs_oracle(self):
        lam1, n_per = 10.0, 7
        length = n_per * lam1 + 0.6 * lam1
        x = np.linspace(0.0, length, 12000)

        def wave(xv):
            return (np.sin(2 * np.pi * xv / lam1 - 0.1)
                    + 0.05 * np.sin(40 * np.pi * xv / lam1))

        p = pp.Profile(x, wave(x))
        psm, psmx, pc, pcx, elements = rg.element_params(p, height_disc=0.1)
        assert len(elements) == n_per
        # 10x-resolution brute-force oracle: same crossing/merge policy
        x10 = np.linspace(0.0, length, 120000)
        p10 = pp.Profile(x10, wave(x10))
        psm10, _, pc10, _, el10 = rg.element_params(p10, height_disc=0.1)
        assert len(el10) == len(elements)
        assert psm == pytest.approx(psm10, rel=1e-3)
        assert pc == pytest.approx(pc10, rel=1e-3)

    def test_monotone_ramp_no_elements(self):
        x = np.linspace(0, 10, 500)
        p_lev = pp.level(pp.RawProfile(x, 0.7 * x + 2.0))
        with pytest.raises(NoElementsFound):
            rg.element_params(pp.Profile(p_lev.x, p_lev.z))


class TestMpd:
    def test_flat(self):
        p = pp.Profile(np.linspace(0, 100, 500), np.zeros(500))
        assert rg.mpd(p) == 0.0

    def test_sine(self):
        assert rg.mpd(sine()) == pytest.approx(1.0, rel=0.01)

    def test_asymmetric_construction(self):
        # half 1 peak 2 mm, half 2 peak 1 mm, global mean 0.4 mm
        x = np.linspace(0, 100, 10001)
        z = np.full(x.size, 0.4)
        z[np.argmin(np.abs(x - 25.0))] = 2.0
        z[np.argmin(np.abs(x - 75.0))] = 1.0
        p = pp.Profile(x, z)
        assert rg.mpd(p) == pytest.approx(1.1, abs=1e-3)


class TestReport:
    def test_sine_composition(self):
        rep = rg.roughness_report(sine(), n_sections=5)
        assert rep.pa == pytest.approx(0.637, abs=0.01)
        assert rep.pq == pytest.approx(0.707, abs=0.01)
        assert rep.pt == pytest.approx(2.0, rel=0.01)
        assert rep.pz == pytest.approx(2.0, rel=0.01)
        assert rep.psm == pytest.approx(10.0, rel=0.02)
        assert rep.pc == pytest.approx(2.0, rel=0.01)
        assert rep.mpd == pytest.approx(1.0, rel=0.01)

    def test_constant_profile_report(self):
        p = pp.Profile(np.linspace(0, 100, 200), np.zeros(200))
        rep = rg.roughness_report(p)
        assert rep.pa == rep.pq == rep.pt == 0.0
        assert rep.element_count == 0
        assert rep.psm == 0.0

    def test_json_and_table(self):
        rep = rg.roughness_report(sine())
        d = rep.to_dict()
        assert set(d) >= {"MPD", "Pa", "Pq", "Pt", "Ppt", "Pvt", "Pz",
                          "Psm", "Psmx", "Pc", "Pcx", "element_count"}
        table = rep.format_table()
        assert "Pa" in table and "MPD" in table


class TestInvariants:
    @staticmethod
    def random_profile(rng, n=400):
        x = np.sort(rng.uniform(0, 50, n))
        x[0], x[-1] = 0.0, 50.0
        z = rng.normal(size=n).cumsum() * 0.05
        lev = pp.level(pp.RawProfile(x, z))
        return pp.Profile(lev.x, lev.z)

    def test_pq_geq_pa_randomized(self):
        rng = np.random.RandomState(0)
        for _ in range(100):
            p = self.random_profile(rng)
            pa, pq, _ = rg.amplitude_params(p)
            assert pq >= pa

    def test_scaling(self):
        rng = np.random.RandomState(1)
        for k in (1e-3, 0.5, 7.0, 1e3):
            p = self.random_profile(rng)
            ps = pp.Profile(p.x, k * p.z)
            r1 = rg.roughness_report(p)
            r2 = rg.roughness_report(ps)
            for name in ("pa", "pq", "pt", "ppt", "pvt", "pz", "pc", "pcx",
                         "mpd"):
                assert getattr(r2, name) == pytest.approx(
                    k * getattr(r1, name), rel=1e-9), name
            assert r2.psm == pytest.approx(r1.psm, rel=1e-9)
            assert r2.psmx == pytest.approx(r1.psmx, rel=1e-9)

    def test_translation(self):
        rng = np.random.RandomState(2)
        p = self.random_profile(rng)
        pt = pp.Profile(p.x, p.z + 123.4)
        r1 = rg.roughness_report(p)
        r2 = rg.roughness_report(pt)
        for name in ("pa", "pq", "pt", "ppt", "pvt", "pz", "psm", "psmx",
                     "pc", "pcx", "mpd"):
            assert getattr(r2, name) == pytest.approx(
                getattr(r1, name), rel=1e-8, abs=1e-12), name
