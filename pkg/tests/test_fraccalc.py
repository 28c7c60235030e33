import math

import numpy as np
import pytest
import scipy.special

from fracctl.fraccalc import (MAX_SERIES_TERMS, ConvergenceError,
                              DifferintegralSpec, binomial_coeffs, gamma,
                              gl_differint, mittag_leffler, ml_derivative)


def gamma_binomial(order, j):
    # oracle: b_j = (-1)^j * Gamma(order+1) / (Gamma(j+1) * Gamma(order-j+1))
    return ((-1) ** j * math.gamma(order + 1)
            / (math.gamma(j + 1) * math.gamma(order - j + 1)))


class TestBinomialCoeffs:
    def test_first_difference_weights(self):
        np.testing.assert_array_equal(binomial_coeffs(1.0, 3).values,
                                      [1.0, -1.0, 0.0, 0.0])

    def test_zero_order_is_identity(self):
        np.testing.assert_array_equal(binomial_coeffs(0.0, 2).values,
                                      [1.0, 0.0, 0.0])

    def test_half_order_values(self):
        values = binomial_coeffs(0.5, 3).values
        np.testing.assert_allclose(values, [1.0, -0.5, -0.125, -0.0625],
                                   rtol=1e-14)

    def test_second_difference_weights(self):
        np.testing.assert_array_equal(binomial_coeffs(2.0, 4).values,
                                      [1.0, -2.0, 1.0, 0.0, 0.0])

    @pytest.mark.parametrize("order", [-1.2, -0.5, 0.3, 0.5, 0.9, 1.5, 2.7])
    def test_matches_gamma_formula(self, order):
        values = binomial_coeffs(order, 30).values
        expected = [gamma_binomial(order, j) for j in range(31)]
        np.testing.assert_allclose(values, expected, rtol=1e-10)

    @pytest.mark.parametrize("order", [-0.7, 0.5, 1.0, 2.2])
    def test_recurrence_invariant(self, order):
        values = binomial_coeffs(order, 40).values
        assert values[0] == 1.0
        j = np.arange(1, 41, dtype=float)
        np.testing.assert_allclose(values[1:], (1.0 - (1.0 + order) / j) * values[:-1],
                                   rtol=1e-15, atol=0.0)

    def test_extended_continues_without_recomputation(self):
        direct = binomial_coeffs(0.5, 50)
        grown = binomial_coeffs(0.5, 10).extended(50)
        np.testing.assert_allclose(grown.values, direct.values, rtol=1e-15)
        assert len(grown) == 51

    def test_extended_noop_when_large_enough(self):
        table = binomial_coeffs(0.9, 20)
        assert table.extended(10) is table

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            binomial_coeffs(0.5, -1)

    def test_values_are_read_only(self):
        table = binomial_coeffs(0.5, 5)
        with pytest.raises(ValueError):
            table.values[0] = 2.0


class TestDifferintegralSpec:
    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            DifferintegralSpec(0.5, 0.0)
        with pytest.raises(ValueError):
            DifferintegralSpec(0.5, -0.1)

    def test_rejects_bad_memory(self):
        with pytest.raises(ValueError):
            DifferintegralSpec(0.5, 0.01, memory_length=0.0)

    def test_unbounded_memory_default(self):
        assert math.isinf(DifferintegralSpec(0.5, 0.01).memory_length)


class TestGlDifferint:
    def test_zero_order_returns_signal(self, rng):
        x = rng.standard_normal(100)
        out = gl_differint(x, DifferintegralSpec(0.0, 0.01))
        np.testing.assert_array_equal(out, x)

    def test_first_derivative_of_ramp(self):
        h = 1e-3
        t = np.arange(0, 1 + h / 2, h)
        out = gl_differint(t, DifferintegralSpec(1.0, h))
        np.testing.assert_allclose(out[1:], 1.0, atol=1e-9)

    def test_second_difference_of_random_signal(self, rng):
        h = 0.1
        x = rng.standard_normal(50)
        out = gl_differint(x, DifferintegralSpec(2.0, h))
        expected = np.zeros(50)
        expected[0] = x[0] / h ** 2
        expected[1] = (x[1] - 2 * x[0]) / h ** 2
        expected[2:] = (x[2:] - 2 * x[1:-1] + x[:-2]) / h ** 2
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("order", [0.3, 0.5, 0.9])
    def test_power_law(self, k, order):
        # D^order t^k = Gamma(k+1)/Gamma(k+1-order) * t^(k-order)
        h = 1e-3
        t = np.arange(0, 1 + h / 2, h)
        out = gl_differint(t ** k, DifferintegralSpec(order, h))
        expected = (math.gamma(k + 1) / math.gamma(k + 1 - order)
                    * t[-1] ** (k - order))
        assert abs(out[-1] - expected) <= 0.01 * abs(expected)

    def test_unit_integral_of_one(self):
        h = 0.01
        x = np.ones(101)
        out = gl_differint(x, DifferintegralSpec(-1.0, h))
        t = np.arange(101) * h
        np.testing.assert_allclose(out, t + h, rtol=1e-12)

    def test_half_order_composition_approximates_derivative(self):
        h = 1e-3
        t = np.arange(0, 1 + h / 2, h)
        spec = DifferintegralSpec(0.5, h)
        twice = gl_differint(gl_differint(t ** 2, spec), spec)
        np.testing.assert_allclose(twice[-1], 2.0 * t[-1], rtol=0.02)

    def test_short_memory_inactive_when_window_covers_signal(self):
        h = 0.01
        x = np.sin(np.arange(101) * h)
        full = gl_differint(x, DifferintegralSpec(0.5, h))
        windowed = gl_differint(x, DifferintegralSpec(0.5, h, memory_length=2.0))
        np.testing.assert_array_equal(windowed, full)

    def test_short_memory_matches_truncated_sum(self):
        h = 0.01
        memory = 0.1
        x = np.cos(np.arange(80) * h)
        spec = DifferintegralSpec(0.7, h, memory_length=memory)
        out = gl_differint(x, spec)
        window = int(memory / h + 1e-9)
        b = binomial_coeffs(0.7, window).values
        expected = np.empty(80)
        for k in range(80):
            n = min(k, window)
            expected[k] = h ** -0.7 * np.dot(b[:n + 1], x[k::-1][:n + 1])
        np.testing.assert_allclose(out, expected, rtol=1e-12)
        full = gl_differint(x, DifferintegralSpec(0.7, h))
        assert np.max(np.abs(out - full)) > 0

    def test_empty_signal(self):
        out = gl_differint([], DifferintegralSpec(0.5, 0.01))
        assert out.shape == (0,)

    def test_rejects_matrix_input(self):
        with pytest.raises(ValueError):
            gl_differint(np.ones((3, 3)), DifferintegralSpec(0.5, 0.01))


class TestGamma:
    def test_known_values(self):
        assert gamma(1.0) == 1.0
        assert gamma(5.0) == 24.0
        np.testing.assert_allclose(gamma(0.5), math.sqrt(math.pi), rtol=1e-14)

    def test_reflection_region(self):
        np.testing.assert_allclose(gamma(-0.5), -2.0 * math.sqrt(math.pi),
                                   rtol=1e-14)

    def test_matches_reference_over_working_range(self):
        for x in np.arange(-49.625, 50.0, 0.25):
            np.testing.assert_allclose(gamma(x), scipy.special.gamma(x),
                                       rtol=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
    def test_poles_raise(self, x):
        with pytest.raises(ValueError):
            gamma(x)


class TestMittagLeffler:
    def test_exponential_special_case(self):
        np.testing.assert_allclose(mittag_leffler(1.0, 1.0, 1.0), math.e,
                                   rtol=1e-12)
        np.testing.assert_allclose(mittag_leffler(1.0, 1.0, -2.0),
                                   math.exp(-2.0), rtol=1e-12)

    def test_cosh_special_case(self):
        np.testing.assert_allclose(mittag_leffler(2.0, 1.0, 1.0),
                                   math.cosh(1.0), rtol=1e-12)

    @pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
    def test_exp_difference_identity(self, z):
        # E_{1,2}(z) = (e^z - 1)/z
        np.testing.assert_allclose(mittag_leffler(1.0, 2.0, z),
                                   (math.exp(z) - 1.0) / z, rtol=1e-9)

    @pytest.mark.parametrize("beta", [0.7, 1.0, 2.5])
    def test_value_at_zero(self, beta):
        np.testing.assert_allclose(mittag_leffler(0.8, beta, 0.0),
                                   1.0 / math.gamma(beta), rtol=1e-14)

    def test_complex_argument(self):
        value = mittag_leffler(1.0, 1.0, 1.0j)
        assert isinstance(value, complex)
        np.testing.assert_allclose([value.real, value.imag],
                                   [math.cos(1.0), math.sin(1.0)], rtol=1e-12)

    def test_real_argument_gives_real_result(self):
        assert isinstance(mittag_leffler(0.9, 1.1, -0.5), float)

    def test_cancellation_raises(self):
        with pytest.raises(ConvergenceError) as info:
            mittag_leffler(1.0, 1.0, -40.0)
        assert 0 < info.value.terms <= MAX_SERIES_TERMS

    @pytest.mark.parametrize("alpha,beta,tol", [
        (0.0, 1.0, 1e-12), (-0.5, 1.0, 1e-12),
        (1.0, 0.0, 1e-12), (1.0, -1.0, 1e-12),
        (1.0, 1.0, 0.0),
    ])
    def test_argument_validation(self, alpha, beta, tol):
        with pytest.raises(ValueError):
            mittag_leffler(alpha, beta, 1.0, tol=tol)


class TestMlDerivative:
    @pytest.mark.parametrize("alpha,beta,z", [
        (1.0, 1.0, 0.8), (0.7, 1.3, -0.4), (1.3, 3.2, -2.0),
    ])
    def test_order_zero_reduces_to_base_function(self, alpha, beta, z):
        assert ml_derivative(alpha, beta, z, 0) == mittag_leffler(alpha, beta, z)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_derivatives_of_exponential(self, n):
        # every derivative of E_{1,1} is the exponential itself
        np.testing.assert_allclose(ml_derivative(1.0, 1.0, 1.0, n), math.e,
                                   rtol=1e-10)

    def test_first_term_at_zero(self):
        # at z=0 only the j=0 term survives: n! / Gamma(alpha*n + beta)
        np.testing.assert_allclose(ml_derivative(1.3, 2.2, 0.0, 3),
                                   6.0 / math.gamma(1.3 * 3 + 2.2), rtol=1e-14)

    def test_matches_central_difference(self):
        alpha, beta, z, h = 1.3, 2.2, 0.7, 1e-5
        oracle = (mittag_leffler(alpha, beta, z + h)
                  - mittag_leffler(alpha, beta, z - h)) / (2.0 * h)
        np.testing.assert_allclose(ml_derivative(alpha, beta, z, 1), oracle,
                                   rtol=1e-6)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            ml_derivative(1.0, 1.0, 1.0, -1)
