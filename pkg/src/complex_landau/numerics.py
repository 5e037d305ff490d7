"""Special functions, quadrature and fitting primitives.

Everything here is a pure function of its inputs and works on numpy arrays
where that makes sense.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureRule",
    "NumericalOverflowWarning",
    "hermite_function",
    "hermite_functions",
    "hermite_function_derivative",
    "gauss_legendre",
    "upper_incomplete_gamma",
    "principal_log",
    "principal_power",
    "fit_loglog_slope",
    "smooth_step",
    "logsumexp_weighted",
]

EULER_GAMMA = 0.57721566490153286061


class NumericalOverflowWarning(RuntimeWarning):
    """Raised (as a warning) when a special function overflows double precision."""


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, f):
        return np.sum(self.weights * f(self.nodes), axis=-1)

    def __len__(self):
        return len(self.nodes)


# --------------------------------------------------------------------------
# Hermite functions
# --------------------------------------------------------------------------

def hermite_functions(kmax: int, x) -> np.ndarray:
    """Normalized Hermite functions psi_0 .. psi_kmax at ``x``.

    Returns an array of shape ``(kmax + 1,) + np.shape(x)``. Complex ``x`` is
    accepted (the functions are entire). The normalized three-term recurrence

        psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}

    is run on the functions themselves so nothing is formed as H_k(x) first.
    """
    if kmax < 0:
        raise ValueError(f"Hermite index must be >= 0, got {kmax}")
    x = np.asarray(x)
    dtype = np.result_type(x.dtype, np.float64)
    out = np.empty((kmax + 1,) + x.shape, dtype=dtype)
    with np.errstate(over="ignore", invalid="ignore"):
        out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
        if kmax >= 1:
            out[1] = math.sqrt(2.0) * x * out[0]
        for k in range(1, kmax):
            out[k + 1] = (math.sqrt(2.0 / (k + 1)) * x * out[k]
                          - math.sqrt(k / (k + 1)) * out[k - 1])
    bad = ~np.isfinite(out)
    if bad.any():
        warnings.warn("Hermite function overflow; infinite sentinel returned",
                      NumericalOverflowWarning, stacklevel=2)
        out[bad] = np.inf
    return out


def hermite_function(k: int, x):
    """psi_k(x) = c_k exp(-x^2/2) H_k(x), c_k = (2^k k! sqrt(pi))^(-1/2)."""
    return hermite_functions(k, x)[k]


def hermite_function_derivative(k: int, x, order: int = 1):
    """Derivative of psi_k via the ladder relation.

    psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}; applied ``order``
    times (order 1 or 2).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    psi = hermite_functions(k + order, x)

    def ladder(coeffs):
        # coeffs: dict index -> coefficient, returns derivative as a dict
        out = {}
        for j, c in coeffs.items():
            if j > 0:
                out[j - 1] = out.get(j - 1, 0.0) + c * math.sqrt(j / 2.0)
            out[j + 1] = out.get(j + 1, 0.0) - c * math.sqrt((j + 1) / 2.0)
        return out

    coeffs = {k: 1.0}
    for _ in range(order):
        coeffs = ladder(coeffs)
    return sum(c * psi[j] for j, c in coeffs.items())


# --------------------------------------------------------------------------
# Gauss-Legendre
# --------------------------------------------------------------------------

def _legendre_nodes(n: int, tol: float = 1e-15, maxiter: int = 100):
    # Newton on P_n with Chebyshev-type initial guesses
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(maxiter):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        if n == 1:
            p0, p1 = np.ones_like(x), x
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < tol:
            break
    # recompute derivative at converged nodes
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    if n == 1:
        p0 = np.ones_like(x)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return x[::-1], w[::-1]


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [a, b], exact for degree 2n - 1."""
    if n < 1:
        raise ValueError(f"quadrature order must be >= 1, got {n}")
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if n not in _GL_CACHE:
        _GL_CACHE[n] = _legendre_nodes(n)
    x, w = _GL_CACHE[n]
    half = 0.5 * (b - a)
    return QuadratureRule(nodes=half * x + 0.5 * (a + b), weights=half * w,
                          interval=(float(a), float(b)))


# --------------------------------------------------------------------------
# Upper incomplete gamma
# --------------------------------------------------------------------------

def _gamma_cf(a, x, tol=1e-16, maxiter=500):
    # modified Lentz for Gamma(a, x) = e^-x x^a / (x + 1 - a - 1(1-a)/(x + 3 - a - ...))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, maxiter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return math.exp(-x + a * math.log(x)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _gamma_series_small_a(a, x, tol=1e-17, maxiter=500):
    # Gamma(a,x) = (Gamma(a+1) - x^a)/a - x^a sum_{n>=1} (-x)^n / (n! (a+n))
    # first term via expm1 so a -> 0 is stable (limit -gamma - ln x)
    lx = math.log(x)
    if a == 0.0:
        head = -EULER_GAMMA - lx
        xa = 1.0
    else:
        xa = math.exp(a * lx)
        head = xa * math.expm1(math.lgamma(1.0 + a) - a * lx) / a
    s = 0.0
    term = 1.0
    for n in range(1, maxiter):
        term *= -x / n
        contrib = term / (a + n)
        s += contrib
        if abs(contrib) < tol * abs(s):
            break
    return head - xa * s


def _gamma_series(a, x, tol=1e-17, maxiter=1000):
    # lower gamma(a,x) = e^-x x^a sum x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    s = term
    for n in range(1, maxiter):
        term *= x / (a + n)
        s += term
        if abs(term) < tol * abs(s):
            break
    lower = s * math.exp(-x + a * math.log(x))
    return math.gamma(a) - lower


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = int_x^inf t^(a-1) e^-t dt for a >= 0, x >= 0.

    Series below x = a + 1, continued fraction above. ``a = 0`` gives the
    exponential integral E1(x). ``a = x = 0`` diverges and raises.
    """
    a = float(a)
    x = float(x)
    if a < 0 or x < 0:
        raise ValueError(f"need a >= 0 and x >= 0, got a={a}, x={x}")
    if x == 0.0:
        if a == 0.0:
            raise ZeroDivisionError("Gamma(0, 0) diverges")
        return math.gamma(a)
    if x > a + 1.0:
        return _gamma_cf(a, x)
    if a <= 1.0:
        return _gamma_series_small_a(a, x)
    return _gamma_series(a, x)


# --------------------------------------------------------------------------
# Principal branch
# --------------------------------------------------------------------------

def principal_log(z):
    """Log z = ln|z| + i Arg z with Arg z in (-pi, pi].

    numpy's log puts Arg = -pi on a negative real axis carrying a signed
    zero imaginary part; that is folded back to +pi here.
    """
    z = np.asarray(z, dtype=complex)
    z = np.where(z.imag == 0, z.real + 0j, z)
    return np.log(z)


def principal_power(z, c):
    """z**c = exp(c Log z), principal branch.

    |z**c| = exp(-Arg z * Im c) |z|**Re c. ``z = 0`` is allowed only when
    Re c > 0 (value 0).
    """
    z, c = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(c, dtype=complex))
    zero = z == 0
    if np.any(zero & (c.real <= 0)):
        raise ValueError("0**c undefined for Re c <= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(c * principal_log(np.where(zero, 1.0, z)))
    out = np.where(zero, 0.0, out)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Fitting and misc.
# --------------------------------------------------------------------------

def fit_loglog_slope(points):
    """Least-squares line through (log n, log value).

    Returns ``(slope, intercept, residual_norm)``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 (n, value) pairs")
    n, v = pts[:, 0], pts[:, 1]
    if np.any(v <= 0) or np.any(n <= 0):
        raise ValueError("log-log fit needs positive n and values")
    X, Y = np.log(n), np.log(v)
    A = np.vstack([X, np.ones_like(X)]).T
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = float(np.linalg.norm(A @ coef - Y))
    return float(coef[0]), float(coef[1]), resid


def smooth_step(s, deriv: int = 0):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/s).

    S(s) = g(s) / (g(s) + g(1 - s)), g(s) = exp(-1/s). ``deriv`` selects the
    value (0), first (1) or second (2) derivative.
    """
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 1)
    si = np.where(inside, s, 0.5)
    E = 1.0 / si - 1.0 / (1.0 - si)
    # S = 1/(1+e^E); S(1-S) = e^{-|E|}/(1+e^{-|E|})^2
    em = np.exp(-np.abs(E))
    S = np.where(E > 0, em / (1.0 + em), 1.0 / (1.0 + em))
    SS = em / (1.0 + em) ** 2
    F = 1.0 / si**2 + 1.0 / (1.0 - si) ** 2
    if deriv == 0:
        val = S
        return np.where(inside, val, np.where(s >= 1, 1.0, 0.0))
    if deriv == 1:
        val = SS * F
    elif deriv == 2:
        dF = -2.0 / si**3 + 2.0 / (1.0 - si) ** 3
        val = (1.0 - 2.0 * S) * SS * F * F + SS * dF
    else:
        raise ValueError("deriv must be 0, 1 or 2")
    return np.where(inside, val, 0.0)


def logsumexp_weighted(logf, weights):
    """log(sum(w * exp(logf))) for positive weights, -inf entries allowed."""
    logf = np.asarray(logf, dtype=float)
    lw = np.log(np.asarray(weights, dtype=float))
    t = logf + lw
    m = np.max(t)
    if not np.isfinite(m):
        return m
    return float(m + np.log(np.sum(np.exp(t - m))))
