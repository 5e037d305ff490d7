import math
import warnings

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings, strategies as st

from complex_landau.numerics import (EULER_GAMMA, NumericalOverflowWarning, fit_loglog_slope,
                                     gauss_legendre, hermite_function, hermite_function_derivative,
                                     hermite_functions, logsumexp_weighted, principal_log,
                                     principal_power, smooth_step, upper_incomplete_gamma)


def test_hermite_values_at_zero():
    assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)
    assert hermite_function(2, 0.0) == pytest.approx(-2 * (8 * math.sqrt(math.pi)) ** -0.5, rel=1e-14)
    assert hermite_function(2, 0.0) == pytest.approx(-0.531126, abs=1e-6)


def test_hermite_against_scipy_polynomials():
    x = np.linspace(-6, 6, 41)
    for k in range(0, 25, 3):
        ck = (2.0**k * math.factorial(k) * math.sqrt(math.pi)) ** -0.5
        ref = ck * np.exp(-x * x / 2) * sc.eval_hermite(k, x)
        np.testing.assert_allclose(hermite_function(k, x), ref, rtol=1e-10, atol=1e-14)


def test_hermite_normalization_and_orthogonality():
    r = gauss_legendre(200, -20, 20)
    psi = hermite_functions(6, r.nodes)
    G = (psi * r.weights) @ psi.T
    np.testing.assert_allclose(G, np.eye(7), atol=1e-12)


def test_hermite_polynomial_recurrence():
    # H_{k+1} - 2x H_k + 2k H_{k-1} = 0 with H_k recovered from psi_k
    x = np.linspace(-5, 5, 51)
    psi = hermite_functions(31, x)
    k = np.arange(32)
    ck = 1.0 / np.sqrt(2.0**k * sc.factorial(k) * math.sqrt(math.pi))
    H = psi / ck[:, None] * np.exp(x * x / 2)
    for j in range(1, 30):
        resid = H[j + 1] - 2 * x * H[j] + 2 * j * H[j - 1]
        scale = np.max(np.abs(H[j + 1])) + np.max(np.abs(2 * x * H[j]))
        assert np.max(np.abs(resid)) < 1e-10 * scale


def test_hermite_complex_argument_matches_polynomial():
    z = np.array([0.3 + 0.7j, -1.2 + 0.4j, 2.0 - 1.5j])
    for k in (0, 1, 4, 9):
        ck = (2.0**k * math.factorial(k) * math.sqrt(math.pi)) ** -0.5
        Hk = np.polynomial.hermite.hermval(z, [0] * k + [1])
        np.testing.assert_allclose(hermite_function(k, z), ck * np.exp(-z * z / 2) * Hk, rtol=1e-12)


def test_hermite_derivatives_vs_finite_differences():
    x = np.linspace(-3, 3, 13)
    h = 1e-4
    for k in (0, 3, 7):
        fd1 = (hermite_function(k, x + h) - hermite_function(k, x - h)) / (2 * h)
        np.testing.assert_allclose(hermite_function_derivative(k, x), fd1, atol=1e-7)
        # psi_k'' = (x^2 - (2k+1)) psi_k
        np.testing.assert_allclose(hermite_function_derivative(k, x, 2),
                                   (x * x - (2 * k + 1)) * hermite_function(k, x), atol=1e-12)


def test_hermite_errors():
    with pytest.raises(ValueError):
        hermite_functions(-1, 0.0)
    with pytest.raises(ValueError):
        hermite_function_derivative(2, 0.0, order=3)


def test_hermite_overflow_sentinel():
    with pytest.warns(NumericalOverflowWarning):
        v = hermite_function(5, np.array([50j]))
    assert np.isinf(v[0])


def test_gauss_legendre_small_rules():
    r = gauss_legendre(1, 0, 2)
    np.testing.assert_allclose(r.nodes, [1.0])
    np.testing.assert_allclose(r.weights, [2.0])
    r = gauss_legendre(2)
    np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [1.0, 1.0], rtol=1e-15)
    assert gauss_legendre(2, 0, 1).integrate(lambda x: x**3) == pytest.approx(0.25, abs=1e-16)


@pytest.mark.parametrize("n", [3, 10, 64, 150])
def test_gauss_legendre_matches_numpy(n):
    x, w = np.polynomial.legendre.leggauss(n)
    r = gauss_legendre(n)
    np.testing.assert_allclose(r.nodes, x, atol=1e-14)
    np.testing.assert_allclose(r.weights, w, atol=1e-14)


def test_gauss_legendre_errors():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(4, 1.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 30), seed=st.integers(0, 2**31 - 1),
       a=st.floats(-3, 3), width=st.floats(0.1, 5))
def test_gauss_legendre_polynomial_exactness(n, seed, a, width):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=2 * n)            # degree 2n - 1
    b = a + width
    P = np.polynomial.Polynomial(coef)
    exact = P.integ()(b) - P.integ()(a)
    got = gauss_legendre(n, a, b).integrate(P)
    scale = np.polynomial.Polynomial(np.abs(coef)).integ()
    ref = max(abs(exact), 1e-300)
    # relative to the size of the integrand's terms (cancellation-aware)
    bound = max(abs(scale(abs(a) + width)), 1.0)
    assert abs(got - exact) <= 1e-12 * max(ref, bound)


def test_incomplete_gamma_examples():
    assert upper_incomplete_gamma(1, 2) == pytest.approx(math.exp(-2), rel=1e-14)
    assert upper_incomplete_gamma(2, 0) == 1.0
    assert upper_incomplete_gamma(0, 1e-4) == pytest.approx(-math.log(1e-4) - EULER_GAMMA, rel=1e-4)
    assert upper_incomplete_gamma(0, 1e-4) == pytest.approx(sc.exp1(1e-4), rel=1e-13)
    with pytest.raises(ZeroDivisionError):
        upper_incomplete_gamma(0, 0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-1, 1)


@pytest.mark.parametrize("a", [0.0, 0.1, 0.5, 1.0, 1.5, 2.5, 7.0, 20.0])
@pytest.mark.parametrize("x", [1e-6, 0.01, 0.3, 1.0, 2.5, 8.0, 30.0, 120.0])
def test_incomplete_gamma_against_scipy(a, x):
    ref = sc.exp1(x) if a == 0 else sc.gammaincc(a, x) * sc.gamma(a)
    assert upper_incomplete_gamma(a, x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_incomplete_gamma_recurrence(a, x):
    lhs = upper_incomplete_gamma(a + 1, x)
    rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_principal_branch():
    assert principal_power(1.0, 3.7 - 2j) == pytest.approx(1.0)
    assert principal_power(1j, 1j) == pytest.approx(math.exp(-math.pi / 2), rel=1e-15)
    assert abs(principal_power(2j, 1 + 1j)) == pytest.approx(2 * math.exp(-math.pi / 2), rel=1e-14)
    # negative real axis carries Arg = +pi regardless of a signed zero
    assert principal_log(complex(-1.0, -0.0)).imag == pytest.approx(math.pi)
    assert principal_power(0.0, 0.5) == 0
    with pytest.raises(ValueError):
        principal_power(0.0, -0.5 + 1j)


@settings(max_examples=100, deadline=None)
@given(zr=st.floats(-10, 10), zi=st.floats(-10, 10), cr=st.floats(-3, 3), ci=st.floats(-3, 3))
def test_principal_power_modulus_identity(zr, zi, cr, ci):
    z, c = complex(zr, zi), complex(cr, ci)
    if abs(z) < 1e-3:
        return
    arg = math.atan2(zi, zr) if zi != 0 else (math.pi if zr < 0 else 0.0)
    expected = math.exp(-arg * ci) * abs(z) ** cr
    assert abs(principal_power(z, c)) == pytest.approx(expected, rel=1e-12)


def test_fit_loglog_slope():
    ns = np.arange(2, 20)
    assert fit_loglog_slope(list(zip(ns, ns**2.0)))[0] == pytest.approx(2.0, abs=1e-12)
    assert fit_loglog_slope(list(zip(ns, 5.0 + 0 * ns)))[0] == pytest.approx(0.0, abs=1e-12)
    rng = np.random.default_rng(1)
    v = ns**-3.0 * (1 + 0.01 * rng.standard_normal(len(ns)))
    assert fit_loglog_slope(list(zip(ns, v)))[0] == pytest.approx(-3.0, abs=0.05)
    with pytest.raises(ValueError):
        fit_loglog_slope([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        fit_loglog_slope([(1, 1), (2, -2), (3, 3)])


def test_smooth_step_shape_and_derivatives():
    s = np.linspace(-0.5, 1.5, 401)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        S = smooth_step(s)
    assert np.all(S[s <= 0] == 0) and np.all(S[s >= 1] == 1)
    assert np.all(np.diff(S) >= 0)
    assert smooth_step(0.5) == pytest.approx(0.5)
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    fd1 = (smooth_step(x + h) - smooth_step(x - h)) / (2 * h)
    np.testing.assert_allclose(smooth_step(x, 1), fd1, rtol=1e-6, atol=1e-9)
    fd2 = (smooth_step(x + h, 1) - smooth_step(x - h, 1)) / (2 * h)
    np.testing.assert_allclose(smooth_step(x, 2), fd2, rtol=1e-5, atol=1e-7)
    with pytest.raises(ValueError):
        smooth_step(0.5, 3)


def test_logsumexp_weighted():
    logf = np.array([1000.0, 1000.0 + math.log(3), -np.inf])
    w = np.array([1.0, 1.0, 5.0])
    assert logsumexp_weighted(logf, w) == pytest.approx(1000.0 + math.log(4), rel=1e-15)
