import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complex_landau.landau_modes import (GramConditioningWarning, LandauMode, degeneracy_gram,
                                         eigen_residual, eigen_residual_fd, h_kl_eval, projection_completeness_demo, span_eigen_residual)

E4 = cmath.exp(1j * math.pi / 4)


def test_real_limit():
    x, xi2 = np.meshgrid(np.linspace(-3, 3, 13), np.linspace(-2, 2, 9))
    got = h_kl_eval(0, 0, cmath.exp(1e-6j), x, xi2)
    ref = np.exp(-(x - xi2) ** 2 / 2 - xi2**2 / 2) / math.sqrt(math.pi)
    np.testing.assert_allclose(got, ref, atol=1e-4)


@settings(max_examples=40, deadline=None)
@given(th=st.floats(0.05, 1.5), x=st.floats(-4, 4), xi2=st.floats(-4, 4))
def test_modulus_and_quadratic_form(th, x, xi2):
    b = cmath.exp(1j * th)
    c = math.cos(th)
    q = c * x * x - 2 * x * xi2 + c * xi2 * xi2
    expected = math.exp(-q) * math.exp(-xi2 * xi2 / c) / math.pi
    assert abs(h_kl_eval(0, 0, b, x, xi2)) ** 2 == pytest.approx(expected, rel=1e-10, abs=1e-300)
    assert q + xi2 * xi2 / c == pytest.approx(c * ((x - xi2 / c) ** 2 + xi2 * xi2), rel=1e-9, abs=1e-9)


def test_eigen_residual_examples():
    assert eigen_residual(0, 0, E4) < 1e-8
    b = cmath.exp(1j * math.pi / 3)
    m = LandauMode(3, 2, b)
    assert m.eigenvalue == pytest.approx(7 * b)
    assert eigen_residual(3, 2, b) < 1e-7
    assert eigen_residual(3, 2, b, adjoint=True) < 1e-7
    assert eigen_residual_fd(2, 1, E4) < 1e-6


@pytest.mark.parametrize("th", [math.pi / 6, math.pi / 4, math.pi / 3])
def test_eigenvalue_independent_of_l(th):
    b = cmath.exp(1j * th)
    for k in (0, 2):
        vals = {LandauMode(k, l, b).eigenvalue for l in range(5)}
        assert len(vals) == 1
        assert max(eigen_residual(k, l, b) for l in range(5)) < 1e-10


def test_degeneracy_linearly_independent():
    G, mn = degeneracy_gram(E4, 1, 4)
    assert mn > 1e-3
    np.testing.assert_allclose(G, G.conj().T, atol=1e-12)


def test_span_residual_on_and_off_levels():
    assert span_eigen_residual(E4, E4, 3) < 1e-8
    assert span_eigen_residual(E4, 3 * E4, 3) < 1e-8
    assert span_eigen_residual(E4, 2 * E4, 3) > 0.1


def test_domain_errors():
    for b in (1, 1j, -E4, cmath.exp(-1j * math.pi / 4)):
        with pytest.raises(ValueError):
            eigen_residual(0, 0, b)
    with pytest.raises(ValueError):
        h_kl_eval(-1, 0, E4, 0.0, 0.0)


def test_projection_of_member():
    b = E4
    rows = projection_completeness_demo(lambda x, y: h_kl_eval(2, 3, b, x, y), b, K=3)
    assert rows[-1][0] == 3 and rows[-1][1] < 1e-10


def test_projection_bump_monotone():
    def bump(x, y):
        r2 = x * x + y * y
        out = np.zeros_like(r2)
        m = r2 < 4
        out[m] = np.exp(-1.0 / (1 - r2[m] / 4))
        return out
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows = projection_completeness_demo(bump, E4, K=8)
    res = [r for _, r in rows]
    assert len(res) == 8
    assert all(b <= a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.5 * res[0]


def test_projection_random_probe():
    rng = np.random.default_rng(3)
    c = rng.normal(size=(4, 2))
    amp = rng.normal(size=4) + 1j * rng.normal(size=4)

    def f(x, y):
        return sum(a * np.exp(-2 * ((x - p) ** 2 + (y - q) ** 2)) for a, (p, q) in zip(amp, c * 0.8))
    # at this angle the Gram matrix may pass the conditioning limit at K=8 and truncate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GramConditioningWarning)
        rows = projection_completeness_demo(f, cmath.exp(1j * math.pi / 3), K=8)
    assert len(rows) >= 6 and rows[-1][1] < rows[0][1]
