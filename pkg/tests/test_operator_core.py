import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complex_landau.numerics import hermite_function
from complex_landau.operator_core import (ContinuousPart, FieldParameter, TestFunction,
                                          apply_first_order_imag, apply_fiber, apply_gauge_imag,
                                          apply_planar, classify_spectrum, fd_derivative,
                                          gaussian_test_function, landau_levels,
                                          residual_coefficient, symmetry_residual)
from complex_landau.quasimode_imaginary import mode_u_imag

E4 = cmath.exp(1j * math.pi / 4)


def test_field_parameter_kinds_and_reduction():
    assert FieldParameter(0).kind == "zero"
    assert FieldParameter(-2).kind == "real"
    assert FieldParameter(3j).kind == "imaginary"
    assert FieldParameter(1 + 1j).kind == "generic"
    rep, steps = FieldParameter(-2 * cmath.exp(0.3j)).reduction_chain()
    assert [s[0] for s in steps] == ["scaling", "reflection"]
    assert rep.b == pytest.approx(cmath.exp(0.3j))
    rep, steps = FieldParameter(cmath.exp(-0.4j)).reduction_chain()
    assert [s[0] for s in steps] == ["conjugation"]
    assert FieldParameter.polar(2, math.pi / 2).b == pytest.approx(2j)


def test_landau_levels_examples():
    assert landau_levels(1, 2)[0] == [1, 3, 5]
    lv, tag = landau_levels(E4, 1)
    assert tag == "+"
    np.testing.assert_allclose(lv, [math.sqrt(2) / 2 * (1 + 1j), 3 * math.sqrt(2) / 2 * (1 + 1j)])
    lv, tag = landau_levels(-1, 1)
    assert lv == [1, 3] and tag == "-"
    lv, tag = landau_levels(1j, 3)
    assert lv == [] and "Re b = 0" in tag


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.1, 5), th=st.floats(-3.1, 3.1))
def test_landau_levels_reduction_identities(r, th):
    b = r * cmath.exp(1j * th)
    if abs(b.real) < 1e-9:
        return
    lv = np.array(landau_levels(b, 4)[0])
    unit = np.array(landau_levels(b / abs(b), 4)[0])
    np.testing.assert_allclose(lv, abs(b) * unit, rtol=1e-12)
    np.testing.assert_allclose(np.array(landau_levels(-b, 4)[0]), lv, rtol=1e-12)
    np.testing.assert_allclose(np.array(landau_levels(b.conjugate(), 4)[0]), lv.conj(), rtol=1e-12)
    # classification is invariant along the reduction chain
    rep, _ = FieldParameter(b).reduction_chain()
    assert classify_spectrum(b).continuous == classify_spectrum(rep).continuous
    assert classify_spectrum(b).point_part == classify_spectrum(rep).point_part


def test_classify_spectrum_table():
    c = classify_spectrum(0)
    assert c.continuous == ContinuousPart.HALF_LINE and c.point_spectrum() == []
    c = classify_spectrum(1)
    assert c.continuous == ContinuousPart.EMPTY and c.point_spectrum(2) == [1, 3, 5]
    c = classify_spectrum(1j)
    assert c.continuous == ContinuousPart.PLANE and c.point_spectrum() == [] and c.whole_plane
    c = classify_spectrum(cmath.exp(-1j * math.pi / 4))
    assert c.continuous == ContinuousPart.PLANE_MINUS_POINTS
    np.testing.assert_allclose(c.point_spectrum(1), [cmath.exp(-1j * math.pi / 4),
                                                     3 * cmath.exp(-1j * math.pi / 4)])
    assert all(classify_spectrum(b).residual == "empty" for b in (0, 1, 1j, E4))


def test_apply_planar_constant_and_landau_mode():
    one = TestFunction(lambda x1, x2: np.ones_like(np.asarray(x1 * x2, dtype=complex)))
    assert apply_planar(1j, one, (2.0, 0.0)) == pytest.approx(-4.0, abs=1e-8)
    # Landau mode in the planar picture: psi(x1, x2) = exp(i k x2) psi_0(sqrt(b)(x1 - k/b))
    b, k = E4, 0.7
    sb = cmath.sqrt(b)
    mode = TestFunction(lambda x1, x2: np.exp(1j * k * x2) * hermite_function(0, sb * (x1 - k / b)))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.5, 1.5, size=(20, 2))
    lhs = apply_planar(b, mode, (pts[:, 0], pts[:, 1]))
    rhs = b * mode(pts[:, 0], pts[:, 1])
    assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_apply_planar_analytic_vs_fd_paths():
    psi = gaussian_test_function(center=(0.2, -0.3), width=0.9, wavevector=(0.5, 1.1))
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, size=(30, 2))
    b = 0.8 + 0.6j
    a = apply_planar(b, psi, (pts[:, 0], pts[:, 1]))
    f = apply_planar(b, psi.without_derivatives(), (pts[:, 0], pts[:, 1]))
    assert np.max(np.abs(a - f)) < 1e-7


def test_apply_fiber_examples():
    one = TestFunction(lambda x: np.ones_like(np.asarray(x, dtype=complex)))
    assert apply_fiber(1j, 2.0, one, 1.0) == pytest.approx((1j - 2) ** 2, abs=1e-9)
    b, xi2 = 0.6 + 0.8j, 1.3
    sb = cmath.sqrt(b)
    f = TestFunction(lambda x: hermite_function(0, sb * (x - xi2 / b)))
    x = np.linspace(-2, 3, 21)
    assert np.max(np.abs(apply_fiber(b, xi2, f, x) - b * f(x))) < 1e-6


def _mode_u_fiber(lam, b):
    sb2 = cmath.sqrt(2 * b)
    mu = lam / (2 * b) - 0.5

    def u(x, xi2):
        Z = sb2 * (x - xi2 / b)
        return np.exp(-Z * Z / 4 + mu * np.log(Z + 0j))
    return u, sb2


def test_residual_coefficient_examples_and_fd_oracle():
    for b in (1, 1j, E4):
        assert residual_coefficient(0, b) == pytest.approx(-1.5 * b)
        assert residual_coefficient(0, b, "paper-printed") == pytest.approx(-1.5 * b)
    assert residual_coefficient(2, 1) == pytest.approx(0.5)
    assert residual_coefficient(2, 1, "paper-printed") == pytest.approx(0.5)
    assert residual_coefficient(1, 1j) == pytest.approx(2 - 1j)
    assert residual_coefficient(1, 1j, "paper-printed") == pytest.approx(1.5 - 1.5j)
    with pytest.raises(ValueError):
        residual_coefficient(1, 0)
    with pytest.raises(ValueError):
        residual_coefficient(1, 1, "other")
    # FD oracle at b = i, lam = 1 selects the derived value
    lam, b, xi2 = 1.0, 1j, 3.0
    u, sb2 = _mode_u_fiber(lam, b)
    rng = np.random.default_rng(5)
    x = rng.uniform(0.5, 3.0, 100)
    Z = sb2 * (x - xi2 / b)
    f = TestFunction(lambda t: u(t, xi2))
    C_fd = (apply_fiber(b, xi2, f, x) - lam * f(x)) * Z**2 / f(x)
    assert np.max(np.abs(C_fd - residual_coefficient(lam, b))) < 1e-6
    assert np.min(np.abs(C_fd - residual_coefficient(lam, b, "paper-printed"))) > 0.1


def test_apply_first_order_imag_examples():
    one = TestFunction(lambda a, b: np.ones_like(np.asarray(a * b, dtype=complex)))
    assert apply_first_order_imag(one, (1.0, 1.0)) == pytest.approx(2 + 1j)
    lam = 0.7 + 0.4j
    g = TestFunction(lambda a, b: mode_u_imag(a, b, lam))
    rng = np.random.default_rng(2)
    p = rng.uniform(0.2, 2.0, size=(40, 2))
    out = apply_first_order_imag(g, (p[:, 0], p[:, 1]))
    assert np.max(np.abs(out - lam * g(p[:, 0], p[:, 1]))) < 1e-6


@settings(max_examples=25, deadline=None)
@given(alpha_r=st.floats(-2, 2), alpha_i=st.floats(-2, 2), seed=st.integers(0, 1000))
def test_first_order_linearity(alpha_r, alpha_i, seed):
    alpha = complex(alpha_r, alpha_i)
    g1 = gaussian_test_function((0.1, 0.2), 1.0, (0.3, 0.0))
    g2 = gaussian_test_function((-0.4, 0.5), 0.7, (0.0, -0.6))
    comb = TestFunction(lambda a, b: alpha * g1(a, b) + g2(a, b))
    p = np.random.default_rng(seed).uniform(-1, 1, size=(5, 2))
    pt = (p[:, 0], p[:, 1])
    lhs = apply_first_order_imag(comb, pt)
    rhs = alpha * apply_first_order_imag(g1.without_derivatives(), pt) + \
        apply_first_order_imag(g2.without_derivatives(), pt)
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1 + abs(alpha))


def test_gauge_transform_b_equals_i():
    g = gaussian_test_function((0.3, -0.1), 1.2, (0.2, 0.5))
    psi = TestFunction(lambda x1, x2: np.exp(0.5j * x1 * x1) * g(x1, x2))
    rng = np.random.default_rng(7)
    p = rng.uniform(-1.5, 1.5, size=(30, 2))
    pt = (p[:, 0], p[:, 1])
    lhs = apply_planar(1j, psi, pt)
    rhs = np.exp(0.5j * p[:, 0] ** 2) * apply_gauge_imag(g, pt)
    assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_fd_derivative_order():
    x = np.array([0.3, 1.7, -2.2])
    np.testing.assert_allclose(fd_derivative(np.sin, (x,)), np.cos(x), atol=1e-11)
    np.testing.assert_allclose(fd_derivative(np.sin, (x,), order=2), -np.sin(x), atol=1e-8)


def test_symmetry_examples():
    psi = gaussian_test_function((0.2, 0.1), 1.0, (0.3, -0.4))
    pts = np.random.default_rng(11).uniform(-2, 2, size=(50, 2))
    assert symmetry_residual("C-conjugation", 1, psi, pts) < 1e-8
    assert symmetry_residual("scaling", 2 * cmath.exp(1j * math.pi / 3), psi, pts) < 1e-6
    assert symmetry_residual("reflection", cmath.exp(1j * math.pi / 5), psi, pts) < 1e-6
    assert symmetry_residual("T-conjugation", 1j, psi, pts) < 1e-8
    with pytest.raises(ValueError):
        symmetry_residual("T-conjugation", E4, psi, pts)
    with pytest.raises(ValueError):
        symmetry_residual("rotation", E4, psi, pts)


@settings(max_examples=10, deadline=None)
@given(r=st.floats(0.3, 3), th=st.floats(-3.1, 3.1))
def test_symmetry_relations_random_b(r, th):
    b = r * cmath.exp(1j * th)
    psi = gaussian_test_function((0.1, -0.2), 1.1, (0.2, 0.3))
    pts = np.random.default_rng(0).uniform(-1.5, 1.5, size=(20, 2))
    for rel in ("scaling", "reflection", "C-conjugation"):
        assert symmetry_residual(rel, b, psi, pts) < 1e-6
