"""Weyl sequences for the fibered operator with b = e^{i theta}, 0 < theta < pi/2.

The family is

    Psi_n(x, xi2) = 1_[n-1, n+1](xi2) phi(x / xi2) u(x, xi2),
    u = exp(-Z^2/4) Z^(lam/(2b) - 1/2),  Z = sqrt(2b) (x - xi2/b),

with phi a smooth bump equal to one on [t - d, t + d] and zero outside
[t - 2d, t + 2d], t = 1/cos(theta). Norms grow like exp(p_max n^2) and
overflow double precision before n = 30, so every integral is accumulated
in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import gauss_legendre, logsumexp_weighted, principal_log, smooth_step
from .operator_core import fd_derivative, residual_coefficient

__all__ = [
    "ComplexQuasimodeConfig",
    "CutoffProfile",
    "QuasimodeReport",
    "WeylRateReport",
    "QuadratureAccuracyError",
    "make_config",
    "smooth_bump",
    "p_profile",
    "zeta",
    "log_mode_u",
    "mode_u",
    "psi_n",
    "norm_and_residual",
    "residual_fd_check",
    "weyl_rate",
    "xi2_center_of_mass",
]


class QuadratureAccuracyError(ArithmeticError):
    """Order doubling changed an integral by more than the accepted tolerance."""


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth bump: 1 on ``plateau``, 0 off ``support``, exp(-1/s) ramps."""

    plateau: tuple[float, float]
    support: tuple[float, float]

    def __post_init__(self):
        (a, b), (c, d) = self.plateau, self.support
        if not (c < a < b < d):
            raise ValueError("plateau must sit strictly inside the support")

    def _ramps(self, t):
        (a, b), (c, d) = self.plateau, self.support
        t = np.asarray(t, dtype=float)
        return t, (t - c) / (a - c), (d - t) / (d - b), 1.0 / (a - c), -1.0 / (d - b)

    def __call__(self, t):
        t, sl, sr, _, _ = self._ramps(t)
        return np.where(t < self.plateau[0], smooth_step(sl),
                        np.where(t > self.plateau[1], smooth_step(sr), 1.0))

    def derivative(self, t, order=1):
        t, sl, sr, kl, kr = self._ramps(t)
        left = smooth_step(sl, order) * kl**order
        right = smooth_step(sr, order) * kr**order
        return np.where(t < self.plateau[0], left, np.where(t > self.plateau[1], right, 0.0))


def smooth_bump(t, profile: CutoffProfile):
    return profile(t)


@dataclass(frozen=True)
class ComplexQuasimodeConfig:
    theta: float
    d: float
    lam: complex
    order: int = 96
    n_range: tuple[int, int] = (4, 12)
    c_variant: str = "derived"

    @property
    def b(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def t_theta(self) -> float:
        return 1.0 / math.cos(self.theta)

    @property
    def p_max(self) -> float:
        return math.sin(self.theta) ** 2 / math.cos(self.theta)

    @property
    def kappa(self) -> float:
        return math.cos(self.theta) * (math.tan(self.theta) ** 2 - self.d**2)

    @property
    def plateau(self):
        return (self.t_theta - self.d, self.t_theta + self.d)

    @property
    def support(self):
        return (self.t_theta - 2 * self.d, self.t_theta + 2 * self.d)

    @property
    def profile(self) -> CutoffProfile:
        return CutoffProfile(self.plateau, self.support)

    @property
    def exponent(self) -> complex:
        """mu = lam/(2b) - 1/2, the power of Z in u."""
        return self.lam / (2 * self.b) - 0.5

    @property
    def coefficient(self) -> complex:
        return residual_coefficient(self.lam, self.b, self.c_variant)

    @property
    def ns(self):
        return list(range(self.n_range[0], self.n_range[1] + 1))


def make_config(theta, d=None, lam=2 + 0.5j, order=96, n_range=(4, 12),
                c_variant="derived") -> ComplexQuasimodeConfig:
    """Validated configuration; ``d`` defaults to tan(theta)/2.

    Besides 0 < d < tan(theta) the support must stay right of t = -1, where
    the principal branch cut of Z^mu meets the real x line (x = -xi2).
    """
    theta = float(theta)
    if not 0 < theta < math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2), got {theta}")
    tan = math.tan(theta)
    if d is None:
        d = 0.5 * tan
    d = float(d)
    if not 0 < d < tan:
        raise ValueError(f"d must lie in (0, tan(theta)) = (0, {tan:.6g}), got {d}")
    if 1.0 / math.cos(theta) - 2 * d <= -1.0:
        raise ValueError("support reaches x/xi2 = -1, the branch cut of Z^mu; take a smaller d")
    lo, hi = n_range
    if lo < 2 or hi < lo:
        raise ValueError(f"bad n range {n_range}; need 2 <= n_min <= n_max")
    return ComplexQuasimodeConfig(theta, d, complex(lam), int(order), (int(lo), int(hi)), c_variant)


def p_profile(t, theta):
    """p(t) = -cos(theta) t^2 + 2 t - cos(theta); maximal at 1/cos(theta)."""
    c = math.cos(theta)
    return -c * t * t + 2 * t - c


def laplace_prefactor(config: ComplexQuasimodeConfig) -> float:
    """sqrt(pi/cos theta) q(t_theta), the asymptotic Laplace-method constant."""
    c = math.cos(config.theta)
    t = config.t_theta
    q = (t * t - 2 * c * t + 1) ** ((config.lam / config.b).real / 2 - 0.5)
    return math.sqrt(math.pi / c) * q


def zeta(x, xi2, b):
    b = complex(b)
    return np.sqrt(2 * b + 0j) * (np.asarray(x) - np.asarray(xi2) / b)


def log_mode_u(x, xi2, config: ComplexQuasimodeConfig):
    """Complex logarithm of u; Re gives log|u| without overflow."""
    Z = zeta(x, xi2, config.b)
    if np.any(Z == 0):
        raise ZeroDivisionError("u is singular where Z = 0")
    return -0.25 * Z * Z + config.exponent * principal_log(Z)


def mode_u(x, xi2, config: ComplexQuasimodeConfig):
    return np.exp(log_mode_u(x, xi2, config))


def psi_n(x, xi2, n, config: ComplexQuasimodeConfig):
    x, xi2 = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi2, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    live = (xi2 >= n - 1) & (xi2 <= n + 1) & (xi2 > 0)
    xl, xil = x[live], xi2[live]
    bump = config.profile(xl / xil)
    vals = np.zeros(xl.shape, dtype=complex)
    nz = bump > 0
    vals[nz] = bump[nz] * mode_u(xl[nz], xil[nz], config)
    out[live] = vals
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class QuasimodeReport:
    n: int
    log_norm_sq: float
    log_residual_sq: float
    log_laplace_reference: float
    order: int = 0
    quadrature_change: float = 0.0

    @property
    def log_ratio(self) -> float:
        return self.log_residual_sq - self.log_norm_sq

    @property
    def norm_sq(self) -> float:
        return _exp_or_inf(self.log_norm_sq)

    @property
    def residual_sq(self) -> float:
        return _exp_or_inf(self.log_residual_sq)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_ratio)

    @property
    def laplace_reference(self) -> float:
        return _exp_or_inf(self.log_laplace_reference)


def _exp_or_inf(v):
    return math.exp(v) if v < 709.0 else math.inf


def _grid(n, config: ComplexQuasimodeConfig, order):
    """Tensor Gauss-Legendre nodes in (t, xi2) with x = t xi2; weights include dx = xi2 dt."""
    lo, hi = config.support
    a, b = config.plateau
    ts, wts = [], []
    for p, q in ((lo, a), (a, b), (b, hi)):
        r = gauss_legendre(order, p, q)
        ts.append(r.nodes)
        wts.append(r.weights)
    t = np.concatenate(ts)
    wt = np.concatenate(wts)
    rx = gauss_legendre(order, n - 1.0, n + 1.0)
    T, XI = np.meshgrid(t, rx.nodes)
    W = np.outer(rx.weights, wt) * XI
    return T, XI, W


def _log_integrands(n, config: ComplexQuasimodeConfig, order):
    T, XI, W = _grid(n, config, order)
    X = T * XI
    Z = zeta(X, XI, config.b)
    logu = -0.25 * Z * Z + config.exponent * principal_log(Z)
    log_u2 = 2.0 * logu.real
    prof = config.profile
    phi = prof(T)
    dphi = prof.derivative(T, 1)
    d2phi = prof.derivative(T, 2)
    mu = config.exponent
    Dx = np.sqrt(2 * config.b) * (-0.5 * Z + mu / Z)   # d_x u / u
    bracket = (-d2phi / XI**2 - 2.0 * dphi / XI * Dx
               + config.coefficient / Z**2 * phi)
    with np.errstate(divide="ignore"):
        log_norm = log_u2 + 2.0 * np.log(phi)
        log_res = log_u2 + 2.0 * np.log(np.abs(bracket))
    return log_norm, log_res, W


def _integrate(n, config, order):
    log_norm, log_res, W = _log_integrands(n, config, order)
    return logsumexp_weighted(log_norm, W), logsumexp_weighted(log_res, W)


def norm_and_residual(n: int, config: ComplexQuasimodeConfig, check: bool = True,
                      rtol: float = 1e-6) -> QuasimodeReport:
    """||Psi_n||^2 and ||(fiber - lam) Psi_n||^2 by tensor Gauss-Legendre in log space.

    The residual uses the closed form
    1[n-1,n+1] (-phi''/xi2^2 u - 2 phi'/xi2 d_x u) + C/Z^2 Psi_n.
    With ``check`` the integrals are recomputed at twice the order and a
    relative change above ``rtol`` raises :class:`QuadratureAccuracyError`.
    """
    if n < 2:
        raise ValueError("need n >= 2 so that |Z| stays away from zero on the support")
    ln, lr = _integrate(n, config, config.order)
    change = 0.0
    if check:
        ln2, lr2 = _integrate(n, config, 2 * config.order)
        change = max(abs(math.expm1(ln2 - ln)), abs(math.expm1(lr2 - lr)))
        if change > rtol:
            raise QuadratureAccuracyError(
                f"n={n}: order {config.order} -> {2 * config.order} changed integrals by {change:.2e}")
        ln, lr = ln2, lr2
    ref = (config.lam / config.b).real - 1.0
    log_ref = ref * math.log(n) + config.p_max * (n - 1) ** 2
    return QuasimodeReport(n, ln, lr, log_ref, config.order, change)


def residual_fd_check(n: int, config: ComplexQuasimodeConfig, order: int | None = None,
                      h_scale: float = 8e-3) -> float:
    """Relative gap between analytic and finite-difference residual norms.

    The fiber operator is applied by Richardson-extrapolated differences
    (step ``h_scale / xi2``) to Psi_n rescaled by exp(-p_max xi2^2 / 2) so the
    samples stay in range; the scale is restored in log space.
    """
    order = order or config.order
    T, XI, W = _grid(n, config, order)
    X = T * XI
    shift = 0.5 * config.p_max * XI**2
    prof = config.profile

    def scaled_psi(x):
        return prof(x / XI) * np.exp(log_mode_u(x, XI, config) - shift)

    fxx = fd_derivative(scaled_psi, (X,), axis=0, order=2, h=h_scale / XI, relative=False)
    b = config.b
    res = -fxx + ((b * X - XI) ** 2 - config.lam) * scaled_psi(X)
    with np.errstate(divide="ignore"):
        log_fd = logsumexp_weighted(2.0 * np.log(np.abs(res)) + 2.0 * shift, W)
    _, log_an = _integrate(n, config, order)
    return abs(math.expm1(log_fd - log_an))


def xi2_center_of_mass(n: int, config: ComplexQuasimodeConfig) -> float:
    log_norm, _, W = _log_integrands(n, config, config.order)
    _, XI, _ = _grid(n, config, config.order)
    m = np.max(log_norm)
    w = W * np.exp(log_norm - m)
    return float(np.sum(w * XI) / np.sum(w))


@dataclass
class WeylRateReport:
    config: ComplexQuasimodeConfig
    reports: list = field(default_factory=list)
    coefficient: float = math.nan      # fitted slope of log(ratio) against n^2
    intercept: float = math.nan
    bound: float = math.nan            # kappa - p_max
    slack: float = 0.1

    @property
    def strictly_decreasing(self) -> bool:
        r = [q.log_ratio for q in self.reports]
        return all(b < a for a, b in zip(r, r[1:]))

    @property
    def within_bound(self) -> bool:
        return self.coefficient <= self.bound + self.slack

    @property
    def decay_factor(self) -> float:
        return math.exp(self.reports[-1].log_ratio - self.reports[0].log_ratio)


def weyl_rate(config: ComplexQuasimodeConfig, slack: float = 0.1, check: bool = True,
              executor=None) -> WeylRateReport:
    """Reports over the configured n range and a linear fit of log(ratio) vs n^2."""
    ns = config.ns
    if len(ns) < 5:
        raise ValueError("rate fit needs at least 5 values of n")
    if executor is not None:
        reports = list(executor.map(lambda n: norm_and_residual(n, config, check), ns))
    else:
        reports = [norm_and_residual(n, config, check) for n in ns]
    lr = np.array([r.log_ratio for r in reports])
    if not np.all(np.isfinite(lr)):
        raise ArithmeticError("non-finite residual ratio")
    n2 = np.array(ns, dtype=float) ** 2
    slope, intercept = np.polyfit(n2, lr, 1)
    return WeylRateReport(config, reports, float(slope), float(intercept),
                          config.kappa - config.p_max, slack)
