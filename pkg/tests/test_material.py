"""Prony rheology tests: relaxation, moduli, loading duration, fitting."""

import numpy as np
import pytest

from skidfem import material as mt
from skidfem.errors import NoRoot, ParseError, RankDeficient

TABLE = mt.SBR_THREE_ARM
SINGLE = mt.SINGLE_ARM_BENCH


class TestRelaxation:
    def test_instantaneous_sum(self):
        assert mt.relaxation_modulus(TABLE, 0.0) == pytest.approx(2900.77)
        assert TABLE.e_inst == pytest.approx(2900.77)

    def test_long_term_limit(self):
        assert mt.relaxation_modulus(TABLE, 1.0) == pytest.approx(9.77, abs=1e-6)

    def test_single_arm_at_tau(self):
        e = mt.relaxation_modulus(SINGLE, SINGLE.arms[0][1])
        assert e == pytest.approx(4.17 + 1.72 / np.e, abs=1e-4)

    def test_strictly_decreasing_randomized(self):
        rng = np.random.RandomState(9)
        for _ in range(20):
            arms = tuple((rng.uniform(0.5, 100.0), 10 ** rng.uniform(-8, 0))
                         for _ in range(rng.randint(1, 4)))
            m = mt.PronySeries(rng.uniform(0.5, 20.0), arms)
            t = np.geomspace(0.01 * m.taus.min(), 10.0 * m.taus.max(), 200)
            e = mt.relaxation_modulus(m, t)
            assert np.all(np.diff(e) < 0)


class TestComplexModulus:
    def test_dc_limit(self):
        s = mt.complex_modulus(TABLE, 0.0)
        assert s.storage == pytest.approx(TABLE.e0)
        assert s.loss == 0.0

    def test_high_frequency_limit(self):
        omega = 1e6 / min(TABLE.taus)
        s = mt.complex_modulus(TABLE, omega)
        assert s.storage == pytest.approx(TABLE.e_inst, rel=1e-6)
        assert s.loss < 1e-4 * TABLE.e_inst

    def test_single_debye_peak(self):
        e0, (e1, tau) = SINGLE.e0, SINGLE.arms[0]
        s = mt.complex_modulus(SINGLE, 1.0 / tau)
        assert s.storage == pytest.approx(e0 + e1 / 2)
        assert s.loss == pytest.approx(e1 / 2)

    def test_storage_monotone(self):
        w = np.geomspace(1e-2 / TABLE.taus.max(), 1e2 / TABLE.taus.min(), 400)
        stor = mt.storage_modulus(TABLE, w)
        assert np.all(np.diff(stor) >= 0)

    def test_loss_peak_at_inverse_tau(self):
        e1, tau = SINGLE.arms[0]
        w = np.geomspace(1e-3 / tau, 1e3 / tau, 601)
        loss = mt.loss_modulus(SINGLE, w)
        k = int(np.argmax(loss))
        assert abs(np.log10(w[k] * tau)) <= np.log10(w[1] / w[0]) + 1e-12


class TestOptimalT1:
    def test_single_arm_closed_form_at_unit(self):
        e1, tau = SINGLE.arms[0]
        t1 = mt.optimal_t1(SINGLE, 1.0 / tau)
        assert t1 == pytest.approx(tau * np.log(2.0), rel=1e-9)

    def test_single_arm_closed_form_at_ten(self):
        e1, tau = SINGLE.arms[0]
        t1 = mt.optimal_t1(SINGLE, 10.0 / tau)
        assert t1 == pytest.approx(tau * np.log(1.01), rel=1e-6)
        assert t1 == pytest.approx(1.1284e-4, abs=1e-9)

    def test_three_arm_residual(self):
        lam = 2 * np.pi / 320
        for v in (1.0, 100.0, 1e4):
            omega = 2 * np.pi * v / lam
            t1 = mt.optimal_t1(TABLE, omega)
            es, taus = TABLE.stiffnesses, TABLE.taus
            lhs = float(np.sum(es * np.exp(-t1 / taus)))
            wt2 = (omega * taus) ** 2
            rhs = float(np.sum(es * wt2 / (1 + wt2)))
            assert abs(lhs - rhs) < 1e-9 * TABLE.e_inst

    def test_decreasing_in_omega(self):
        e1, tau = SINGLE.arms[0]
        omegas = np.geomspace(0.01 / tau, 100 / tau, 20)
        t1s = [mt.optimal_t1(SINGLE, w) for w in omegas]
        assert np.all(np.diff(t1s) < 0)

    def test_no_arms_rejected(self):
        with pytest.raises(NoRoot):
            mt.optimal_t1(mt.PronySeries(5.0, ()), 1.0)


class TestCriticalVelocity:
    def test_unit(self):
        assert mt.critical_velocity(1.0, 2 * np.pi) == pytest.approx(1.0)

    def test_benchmark_value(self):
        v = mt.critical_velocity(0.01134034, 2 * np.pi / 320)
        assert v == pytest.approx(0.27566, rel=1e-3)

    def test_linear_in_lambda(self):
        assert mt.critical_velocity(0.3, 8.0) == pytest.approx(
            2 * mt.critical_velocity(0.3, 4.0))


def samples_of(m, omegas):
    return np.column_stack([omegas, mt.storage_modulus(m, omegas),
                            mt.loss_modulus(m, omegas)])


class TestFitProny:
    def test_exact_recovery(self):
        w = np.geomspace(1e-11, 1e-3, 40) ** -1  # spans the arm frequencies
        rows = samples_of(TABLE, np.geomspace(1e3, 1e11, 40))
        fitted = mt.fit_prony(rows, TABLE.taus)
        assert fitted.e0 == pytest.approx(TABLE.e0, rel=1e-6)
        for (ef, tf), (et, tt) in zip(fitted.arms, TABLE.arms):
            assert tf == tt
            assert ef == pytest.approx(et, rel=1e-6)

    def test_one_arm_worse_than_three(self):
        w = np.geomspace(1e3, 1e11, 50)
        rows = samples_of(TABLE, w)
        fit3 = mt.fit_prony(rows, TABLE.taus)
        fit1 = mt.fit_prony(rows, [TABLE.taus[0]])
        assert mt.fit_residual(fit1, rows) > mt.fit_residual(fit3, rows)

    def test_e0_only_constant_storage(self):
        w = np.geomspace(1.0, 100.0, 7)
        rows = np.column_stack([w, np.full(7, 12.5), np.zeros(7)])
        fitted = mt.fit_prony(rows, [])
        assert fitted.e0 == pytest.approx(12.5, rel=1e-9)
        assert fitted.n_arms == 0

    def test_collinear_grid_rejected(self):
        w = np.geomspace(1e3, 1e5, 30)
        rows = samples_of(TABLE, w)
        # two relaxation times both far below the sampled band: identical columns
        with pytest.raises(RankDeficient):
            mt.fit_prony(rows, [1e-15, 2e-15])

    def test_too_few_samples(self):
        rows = samples_of(TABLE, np.geomspace(1e3, 1e9, 5))
        with pytest.raises(ValueError):
            mt.fit_prony(rows, TABLE.taus)


class TestMaterialFile:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "m.mat"
        mt.save_material(TABLE, path)
        back = mt.load_material(path)
        assert back.e0 == TABLE.e0
        assert back.arms == TABLE.arms
        assert back.nu == TABLE.nu

    def test_parse_error_lines(self, tmp_path):
        path = tmp_path / "bad.mat"
        path.write_text("E0 = 5\narm = oops\n")
        with pytest.raises(ParseError) as err:
            mt.load_material(path)
        assert err.value.line == 2

    def test_missing_e0(self, tmp_path):
        path = tmp_path / "bad.mat"
        path.write_text("nu = 0.3\n")
        with pytest.raises(ParseError):
            mt.load_material(path)


class TestValidation:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            mt.PronySeries(-1.0, ())
        with pytest.raises(ValueError):
            mt.PronySeries(1.0, ((0.0, 1.0),))
        with pytest.raises(ValueError):
            mt.PronySeries(1.0, (), nu=0.5)

    def test_elastic_twin(self):
        twin = TABLE.without_arms()
        assert twin.n_arms == 0
        assert twin.e0 == TABLE.e0
