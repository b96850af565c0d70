"""Tests for asymptotics module"""

import math

import numpy as np
import pytest

from torsion_asymptotics.asymptotics import (
    AsymModel,
    BTExpansion,
    Sample,
    bt_compose,
    bt_det_fit,
    bt_det_samples,
    bt_eval,
    curvature_check,
    dd_bar_log,
    dh_decompose,
    fit,
    fit_log_power,
    model_eval,
    model_eval_log,
    model_samples,
    positive_bt_expansion,
    radial_grid,
    read_samples,
    rho_from_coefficients,
    write_samples,
)
from torsion_asymptotics.errors import FitError, InputError

GRID = np.geomspace(2.0, 400.0, 60)


@pytest.fixture
def model():
    return AsymModel(kappa=-1 / 12, rho=2, gamma=0.5)


class TestModel:
    def test_eval_at_inverse_e(self, model):
        expected = 1 / 6 - 2 * math.log(2) + 0.5

        assert model_eval(model, math.exp(-1)) == pytest.approx(expected, rel=1e-14)
        assert model_eval_log(model, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_c_term(self):
        m = AsymModel(0, 0, 0, c=3.0)

        assert model_eval_log(m, 6.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("r", [0.0, 1.0, 0.9, -0.1])
    def test_domain(self, model, r):
        with pytest.raises(InputError):
            model_eval(model, r)

    def test_non_finite_coefficient(self):
        with pytest.raises(InputError):
            AsymModel(math.nan, 0, 0)

    def test_samples_keep_tiny_radii(self, model):
        (sample,) = model_samples(model, [1000.0])

        assert sample.r == 0.0
        assert sample.value == pytest.approx(model_eval_log(model, 1000.0))

    @pytest.mark.parametrize("args", [(0.0, 1.0), (-1.0, 1.0), (1.0, math.inf)])
    def test_invalid_sample(self, args):
        with pytest.raises(InputError):
            Sample(*args)

    def test_sample_from_r(self):
        assert Sample.from_r(math.exp(-3), 1.0).log_inv_r == pytest.approx(3.0)
        with pytest.raises(InputError):
            Sample.from_r(1.5, 0.0)


class TestFit:
    def test_exact_recovery(self, model):
        result = fit(model_samples(model, GRID))

        assert result.model.kappa == pytest.approx(-1 / 12, abs=1e-9)
        assert result.model.rho == pytest.approx(2, abs=1e-8)
        assert result.model.gamma == pytest.approx(0.5, abs=1e-7)
        assert result.rho_rounded == 2
        assert result.rho_is_integral
        assert result.residual_rms < 1e-10

    def test_exact_recovery_with_c(self):
        truth = AsymModel(kappa=0.25, rho=1, gamma=-2.0, c=0.75)
        result = fit(model_samples(truth, GRID), with_c=True)

        assert result.model.kappa == pytest.approx(0.25, abs=1e-8)
        assert result.model.rho == pytest.approx(1, abs=1e-6)
        assert result.model.c == pytest.approx(0.75, abs=1e-5)

    def test_noisy_samples(self, model):
        rng = np.random.default_rng(12)
        L = np.geomspace(5.0, 500.0, 200)
        samples = [Sample(s.log_inv_r, s.value + rng.normal(0, 1e-3)) for s in model_samples(model, L)]
        result = fit(samples)

        assert result.model.kappa == pytest.approx(-1 / 12, abs=5e-3)
        assert result.rho_rounded == 2

    def test_recovers_model_to_residual_tolerance(self):
        truth = AsymModel(kappa=-1 / 6, rho=1, gamma=2)
        result = fit(model_samples(truth, GRID))

        assert result.residual_rms < 1e-9
        assert result.model.kappa == pytest.approx(-1 / 6, abs=1e-9)
        assert result.rho_rounded == 1

    @pytest.mark.parametrize("seed", range(20))
    def test_noise_over_seeds(self, seed):
        truth = AsymModel(kappa=-1 / 6, rho=1, gamma=2)
        rng = np.random.default_rng(seed)
        L = np.geomspace(2.0, 2000.0, 400)
        samples = [Sample(s.log_inv_r, s.value + rng.normal(0, 1e-3)) for s in model_samples(truth, L)]
        result = fit(samples)

        assert result.model.kappa == pytest.approx(-1 / 6, abs=1e-3)
        assert result.rho_rounded == 1

    def test_shift_by_log_r_squared_moves_kappa(self, model):
        shift = 0.3
        samples = [Sample(s.log_inv_r, s.value + shift * (-2 * s.log_inv_r)) for s in model_samples(model, GRID)]

        assert fit(samples).model.kappa == pytest.approx(-1 / 12 + shift, abs=1e-8)

    @pytest.mark.parametrize("scale", [-2.0, 0.5, 3.0])
    def test_scaling_values_scales_coefficients(self, model, scale):
        samples = [Sample(s.log_inv_r, scale * s.value) for s in model_samples(model, GRID)]
        result = fit(samples)

        assert result.model.kappa == pytest.approx(scale * model.kappa, abs=1e-8)
        assert result.model.rho == pytest.approx(scale * model.rho, abs=1e-7)
        assert result.model.gamma == pytest.approx(scale * model.gamma, abs=1e-6)

    @pytest.mark.parametrize("shift", [-1.5, 0.25, 10.0])
    def test_constant_shift_moves_only_gamma(self, model, shift):
        samples = [Sample(s.log_inv_r, s.value + shift) for s in model_samples(model, GRID)]
        result = fit(samples)

        assert result.model.kappa == pytest.approx(model.kappa, abs=1e-8)
        assert result.model.rho == pytest.approx(model.rho, abs=1e-7)
        assert result.model.gamma == pytest.approx(model.gamma + shift, abs=1e-6)

    def test_non_integral_rho_is_flagged(self, caplog):
        samples = model_samples(AsymModel(0.1, 1.5, 0.0), GRID)
        result = fit(samples)

        assert not result.rho_is_integral
        assert "not within" in caplog.text

    def test_too_few_samples(self, model):
        with pytest.raises(FitError):
            fit(model_samples(model, [2.0, 300.0]))

    def test_too_narrow_span(self, model):
        with pytest.raises(FitError, match="two decades"):
            fit(model_samples(model, np.linspace(2.0, 5.0, 20)))


class TestLogPower:
    def test_recovers_power(self):
        samples = [Sample(L, 3.0 * L**2) for L in GRID]
        result = fit_log_power(samples)

        assert result.exponent == pytest.approx(2, abs=1e-10)
        assert result.exponent_rounded == 2
        assert result.coefficient == pytest.approx(3.0, rel=1e-9)

    def test_needs_positive_values(self):
        with pytest.raises(FitError):
            fit_log_power([Sample(L, -1.0) for L in GRID])


class TestSampleFiles:
    def test_write_and_read(self, tmp_path, model):
        samples = model_samples(model, [2.0, 5.0, 30.0])
        path = tmp_path / "samples.csv"
        write_samples(path, samples)

        assert path.read_text().splitlines()[0] == "r,value"
        restored = read_samples(path)
        assert [s.log_inv_r for s in restored] == pytest.approx([2.0, 5.0, 30.0], rel=1e-14)
        assert [s.value for s in restored] == [s.value for s in samples]

    def test_underflowing_radii_switch_header(self, tmp_path, model):
        path = tmp_path / "samples.csv"
        write_samples(path, model_samples(model, [10.0, 900.0]))

        assert path.read_text().splitlines()[0] == "log_inv_r,value"
        assert read_samples(path)[1].log_inv_r == 900.0

    @pytest.mark.parametrize("content", ["", "x,y\n0.1,2\n", "r,value\n0.1,abc\n", "r,value\n2.0,1\n"])
    def test_invalid_files(self, tmp_path, content):
        path = tmp_path / "bad.csv"
        path.write_text(content)

        with pytest.raises(InputError):
            read_samples(path)


@pytest.fixture
def diagonal_expansion():
    return BTExpansion((1, 0), (np.eye(2), np.diag([1.0, 2.0])))


class TestBarletTakayama:
    def test_eval(self, diagonal_expansion):
        # log |t|^-2 = 2 at |t| = 1/e
        value = bt_eval(diagonal_expansion, math.exp(-1) * 1j)

        assert np.allclose(value, np.diag([3.0, 5.0]))

    def test_compose_scales_by_powers_of_t(self, diagonal_expansion):
        t = 0.5
        h = bt_compose(diagonal_expansion, t)
        tilde = bt_eval(diagonal_expansion, t)

        assert h[0, 0] == pytest.approx(4 * tilde[0, 0])
        assert h[1, 1] == pytest.approx(tilde[1, 1])

    def test_decompose_inverts_compose(self):
        b = positive_bt_expansion((2, 1, 0), 2, np.random.default_rng(3))
        grid = radial_grid(1e-3, 0.5, 8, angles=(0.0, 2.0))
        report = dh_decompose([(t, bt_compose(b, t)) for t in grid], b.exponents)

        for t, tilde in zip(grid, report.tilde):
            assert np.allclose(tilde, bt_eval(b, t))
        assert report.min_eigenvalue >= 1 - 1e-9
        assert report.argmin in grid

    def test_det_fit_recovers_degree(self, diagonal_expansion):
        # det = (1 + lam)(1 + 2 lam)
        samples = bt_det_samples(diagonal_expansion, radial_grid(1e-6, 0.5, 30))
        result = bt_det_fit(samples, 3)

        assert result.coefficients == pytest.approx((1.0, 3.0, 2.0, 0.0), abs=1e-7)
        assert rho_from_coefficients(result.coefficients) == 2

    def test_positive_expansion_determinant_grows(self):
        b = positive_bt_expansion((1, 1), 1, np.random.default_rng(0))
        samples = bt_det_samples(b, radial_grid(1e-8, 0.5, 20))

        assert all(value >= 1 - 1e-9 for _, value in samples)
        assert rho_from_coefficients(bt_det_fit(samples, 3).coefficients) == 2

    def test_rho_from_coefficients(self):
        assert rho_from_coefficients([0.0, 0.0]) == 0
        assert rho_from_coefficients([1.0, 1e-9]) == 0
        assert rho_from_coefficients([1.0, 2.0, 1e-3]) == 2

    def test_validation(self):
        with pytest.raises(InputError, match="Hermitian"):
            BTExpansion((0, 0), (np.array([[1.0, 2.0], [0.0, 1.0]]),))
        with pytest.raises(InputError, match="shape"):
            BTExpansion((0, 0), (np.eye(3),))
        with pytest.raises(InputError):
            BTExpansion((-1,), (np.eye(1),))
        with pytest.raises(InputError):
            BTExpansion((0,), ())

    def test_decompose_rejects_non_hermitian(self):
        with pytest.raises(InputError):
            dh_decompose([(0.5, np.array([[1.0, 1.0], [0.0, 1.0]]))], (0, 0))

    def test_det_fit_needs_enough_samples(self):
        with pytest.raises(FitError):
            bt_det_fit([(0.5, 1.0)], 2)


def one(x, y):
    return np.ones_like(x)


class TestCurvature:
    @pytest.mark.parametrize("power", [0, 2, 4])
    def test_pure_log_power(self, power):
        grid = radial_grid(1e-4, 0.5, 15, angles=(0.0, 1.0, 2.5))
        report = curvature_check([(power, one)], grid)

        assert report.leading_power == power
        assert report.points == 45
        assert report.max_relative_error < 1e-5
        assert report.poincare == pytest.approx(power / 4, rel=1e-5, abs=1e-9)

    def test_log_squared_to_one_part_per_million(self):
        report = curvature_check([(2, one)], radial_grid(1e-4, 1e-1, 25, angles=(0.0, 0.7)))

        assert report.max_relative_error < 1e-6

    def test_odd_power_with_negative_coefficient(self):
        # g = -log|t|^2 = 2 log|t|^-1 > 0
        report = curvature_check([(1, lambda x, y: -np.ones_like(x))], radial_grid(1e-3, 0.5, 10))

        assert report.leading_power == 1
        assert report.max_relative_error < 1e-5

    def test_perturbed_metric_stays_in_envelope(self):
        terms = [(2, one), (0, lambda x, y: 1 + x)]
        report = curvature_check(terms, radial_grid(1e-6, 0.1, 20, angles=(0.0, 3.0)))

        assert report.leading_power == 2
        assert report.envelope < 1
        assert report.poincare < 1
        assert report.within_envelope

    def test_tight_bound_flags_the_remainder(self, caplog):
        terms = [(2, one), (0, lambda x, y: 1 + x)]
        report = curvature_check(terms, radial_grid(1e-6, 0.1, 20), envelope_bound=1e-6)

        assert report.envelope > 1e-6
        assert not report.within_envelope
        assert "exceeds" in caplog.text

    def test_envelope_bound_must_be_positive(self):
        with pytest.raises(InputError, match="envelope"):
            curvature_check([(0, one)], radial_grid(1e-3, 0.1, 3), envelope_bound=0)

    def test_leading_power_skips_vanishing_coefficients(self):
        terms = [(2, one), (4, lambda x, y: x * x + y * y)]

        assert curvature_check(terms, radial_grid(1e-3, 0.1, 5)).leading_power == 2

    def test_dd_bar_of_log_of_log(self):
        t = 0.01 + 0.02j
        L = -math.log(abs(t))

        assert dd_bar_log([(2, one)], t) == pytest.approx(-2 / (4 * abs(t) ** 2 * L**2), rel=1e-6)

    def test_non_positive_metric(self):
        with pytest.raises(InputError, match="positive"):
            curvature_check([(1, one)], radial_grid(1e-3, 0.5, 3))

    def test_empty_grid(self):
        with pytest.raises(InputError):
            curvature_check([(0, one)], [])

    @pytest.mark.parametrize("r_min, r_max", [(0.0, 0.5), (0.5, 0.1), (0.1, 1.0)])
    def test_radial_grid_validation(self, r_min, r_max):
        with pytest.raises(InputError):
            radial_grid(r_min, r_max, 5)
