"""Weyl sequences for b = i in the first-order Fourier picture.

After the gauge change and a full Fourier transform the operator becomes

    L = 2 (i xi1 + xi2) d/dxi1 + xi1^2 + xi2^2 + i,

whose kernel along each xi2-fiber is solved exactly by

    u = exp(-xi1 xi2 / 2 + i xi1^2 / 4) (xi1 - i xi2)^(-(1 + i lam)/2).

The quasimodes are Psi_n = 1_[1,2](n xi2) phi(xi1 / (n^alpha xi2)) u with phi
a smooth step from 0 (s <= 1) to 1 (s >= 2), so (L - lam) Psi_n lives only on
the ramp.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (fit_loglog_slope, gauss_legendre, principal_log, smooth_step,
                       upper_incomplete_gamma)
from .operator_core import fd_derivative

__all__ = [
    "ImagQuasimodeConfig",
    "ImagReport",
    "ImagDecayFit",
    "make_imag_config",
    "cutoff",
    "log_mode_u_imag",
    "mode_u_imag",
    "psi_n_imag",
    "norm_sq_imag",
    "gamma_kernel_bound",
    "lower_bound_law",
    "residual_and_ratio",
    "residual_fd_check_imag",
    "decay_fit",
    "nonintegrability_demo",
]

TAIL_WINDOW = 40.0


@dataclass(frozen=True)
class ImagQuasimodeConfig:
    lam: complex
    alpha: float = 1.5
    n_range: tuple[int, int] = (10, 50)
    order: int = 64
    note: str = ""

    @property
    def exponent(self) -> complex:
        return -(1 + 1j * self.lam) / 2


def make_imag_config(lam, alpha=1.5, n_range=(10, 50), order=64) -> ImagQuasimodeConfig:
    """Validated config. Im lam < 0 is reflected to conj(lam) (T-symmetry)."""
    lam = complex(lam)
    note = ""
    if lam.imag < 0:
        note = f"lam={lam} reflected to its conjugate via T psi = conj(psi)"
        lam = lam.conjugate()
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")
    lo, hi = n_range
    if lo < 2 or hi < lo:
        raise ValueError(f"bad n range {n_range}")
    return ImagQuasimodeConfig(lam, float(alpha), (int(lo), int(hi)), int(order), note)


def cutoff(s, deriv=0):
    """phi(s): 0 for s <= 1, 1 for s >= 2."""
    return smooth_step(np.asarray(s, dtype=float) - 1.0, deriv)


def log_mode_u_imag(xi1, xi2, lam):
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    w = xi1 - 1j * xi2
    if np.any(w == 0):
        raise ZeroDivisionError("u is singular at the origin")
    c = -(1 + 1j * complex(lam)) / 2
    return -0.5 * xi1 * xi2 + 0.25j * xi1 * xi1 + c * principal_log(w)


def mode_u_imag(xi1, xi2, lam):
    return np.exp(log_mode_u_imag(xi1, xi2, lam))


def _abs_u_sq(xi1, xi2, lam):
    # |u|^2 = e^{-xi1 xi2} e^{Arg(xi1 - i xi2) Re lam} (xi1^2 + xi2^2)^{(Im lam - 1)/2}
    lam = complex(lam)
    arg = np.arctan2(-xi2, xi1)
    return np.exp(-xi1 * xi2 + arg * lam.real
                  + 0.5 * (lam.imag - 1.0) * np.log(xi1 * xi1 + xi2 * xi2))


def psi_n_imag(xi1, xi2, n, config: ImagQuasimodeConfig):
    xi1, xi2 = np.broadcast_arrays(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
    out = np.zeros(xi1.shape, dtype=complex)
    live = (n * xi2 >= 1) & (n * xi2 <= 2)
    s = xi1[live] / (n**config.alpha * xi2[live])
    phi = cutoff(s)
    vals = np.zeros(s.shape, dtype=complex)
    nz = phi > 0
    vals[nz] = phi[nz] * mode_u_imag(xi1[live][nz], xi2[live][nz], config.lam)
    out[live] = vals
    return out[()] if out.ndim == 0 else out


def _plateau_integral(xi2, t0, lam, order):
    """int_{t0}^inf |u(t/xi2, xi2)|^2 dt / xi2 for one fiber, plus a tail estimate."""
    pieces = []
    if t0 < 1.0:
        r = gauss_legendre(order, math.log(t0), 0.0)
        t = np.exp(r.nodes)
        pieces.append((t, r.weights * t))
        start = 1.0
    else:
        start = t0
    r = gauss_legendre(2 * order, start, start + TAIL_WINDOW)
    pieces.append((r.nodes, r.weights))
    total = 0.0
    for t, w in pieces:
        total += np.sum(w * _abs_u_sq(t / xi2, xi2, lam)) / xi2
    T = start + TAIL_WINDOW
    # e^{-t} t^k tail: int_T^inf <= 2 e^{-T} T^k for k <= T/2
    tail = 2.0 * _abs_u_sq(T / xi2, xi2, lam) / xi2
    return total, tail


def norm_sq_imag(n: int, config: ImagQuasimodeConfig, order: int | None = None) -> float:
    """||Psi_n||^2 via xi1 = sigma n^alpha xi2 on the ramp and t = xi1 xi2 beyond it."""
    if n < 2:
        raise ValueError("need n >= 2")
    order = order or config.order
    lam = config.lam
    na = n**config.alpha
    rx = gauss_legendre(order, 1.0 / n, 2.0 / n)
    rs = gauss_legendre(order, 1.0, 2.0)
    total = 0.0
    tail_total = 0.0
    phi2 = cutoff(rs.nodes) ** 2
    for xi2, wx in zip(rx.nodes, rx.weights):
        xi1 = rs.nodes * na * xi2
        ramp = np.sum(rs.weights * phi2 * _abs_u_sq(xi1, xi2, lam)) * na * xi2
        plateau, tail = _plateau_integral(xi2, 2.0 * na * xi2 * xi2, lam, order)
        total += wx * (ramp + plateau)
        tail_total += wx * tail
    if tail_total > 1e-12 * total:
        raise ArithmeticError(f"semi-infinite tail {tail_total:.2e} not negligible (total {total:.2e})")
    return float(total)


def residual_sq_imag(n: int, config: ImagQuasimodeConfig, order: int | None = None) -> float:
    """||(L - lam) Psi_n||^2 from 2/n^alpha (i xi1/xi2 + 1) phi' u on the ramp."""
    order = order or config.order
    lam = config.lam
    na = n**config.alpha
    rx = gauss_legendre(order, 1.0 / n, 2.0 / n)
    rs = gauss_legendre(order, 1.0, 2.0)
    dphi2 = cutoff(rs.nodes, 1) ** 2
    s = rs.nodes * na                         # xi1 / xi2
    total = 0.0
    for xi2, wx in zip(rx.nodes, rx.weights):
        integrand = 4.0 / na**2 * (s * s + 1.0) * dphi2 * _abs_u_sq(s * xi2, xi2, lam)
        total += wx * np.sum(rs.weights * integrand) * na * xi2
    return float(total)


def gamma_kernel_bound(n: int, config: ImagQuasimodeConfig, order: int = 64) -> float:
    """int_{1/n}^{2/n} xi2^{-Im lam} Gamma(Im lam, 2 n^alpha xi2^2) dxi2."""
    a = config.lam.imag
    r = gauss_legendre(order, 1.0 / n, 2.0 / n)
    na = n**config.alpha
    vals = [x ** (-a) * upper_incomplete_gamma(a, 2.0 * na * x * x) for x in r.nodes]
    return float(np.dot(r.weights, vals))


def lower_bound_law(n, lam) -> float:
    """n^{Im lam - 1} if Im lam > 0, else ln(n)/n."""
    a = complex(lam).imag
    return n ** (a - 1.0) if a > 0 else math.log(n) / n


@dataclass(frozen=True)
class ImagReport:
    n: int
    norm_sq: float
    residual_sq: float
    lower_model: float      # Gamma-kernel integral
    law: float              # n^{Im lam - 1} or ln(n)/n

    @property
    def ratio(self) -> float:
        return self.residual_sq / self.norm_sq

    @property
    def log_norm_sq(self) -> float:
        return math.log(self.norm_sq)

    @property
    def log_residual_sq(self) -> float:
        return math.log(self.residual_sq)

    @property
    def log_ratio(self) -> float:
        return math.log(self.ratio)


def residual_and_ratio(n: int, config: ImagQuasimodeConfig, check: bool = True,
                       rtol: float = 1e-8) -> ImagReport:
    norm = norm_sq_imag(n, config)
    res = residual_sq_imag(n, config)
    if check:
        norm2 = norm_sq_imag(n, config, 2 * config.order)
        res2 = residual_sq_imag(n, config, 2 * config.order)
        change = max(abs(norm2 / norm - 1), abs(res2 / res - 1))
        if change > rtol:
            raise ArithmeticError(f"n={n}: quadrature order doubling changed integrals by {change:.2e}")
        norm, res = norm2, res2
    return ImagReport(n, norm, res, gamma_kernel_bound(n, config), lower_bound_law(n, config.lam))


def residual_fd_check_imag(n: int, config: ImagQuasimodeConfig, order: int | None = None,
                           h_scale: float = 1e-3) -> float:
    """Relative gap between analytic and finite-difference residual norms on the ramp."""
    order = order or config.order
    lam = config.lam
    na = n**config.alpha
    rx = gauss_legendre(order, 1.0 / n, 2.0 / n)
    rs = gauss_legendre(order, 1.0, 2.0)
    S, XI2 = np.meshgrid(rs.nodes, rx.nodes)
    W = np.outer(rx.weights, rs.weights) * na * XI2
    XI1 = S * na * XI2

    def psi(x1):
        return cutoff(x1 / (na * XI2)) * mode_u_imag(x1, XI2, lam)

    h = h_scale * np.minimum(1.0, na * XI2)
    dpsi = fd_derivative(psi, (XI1,), axis=0, order=1, h=h, relative=False)
    fd = 2 * (1j * XI1 + XI2) * dpsi + (XI1**2 + XI2**2 + 1j - lam) * psi(XI1)
    fd_sq = float(np.sum(W * np.abs(fd) ** 2))
    return abs(fd_sq / residual_sq_imag(n, config, order) - 1.0)


@dataclass
class ImagDecayFit:
    reports: list = field(default_factory=list)
    residual_slope: float = math.nan
    norm_slope: float = math.nan
    ratio_slope: float = math.nan

    @property
    def ratio_drop(self) -> float:
        return self.reports[-1].ratio / self.reports[0].ratio

    @property
    def strictly_decreasing(self) -> bool:
        r = [q.ratio for q in self.reports]
        return all(b < a for a, b in zip(r, r[1:]))


def decay_fit(config: ImagQuasimodeConfig, ns=None, check: bool = True, executor=None) -> ImagDecayFit:
    """Per-n reports and log-log slopes of residual^2, norm^2 and their ratio."""
    if ns is None:
        lo, hi = config.n_range
        ns = sorted(set(int(round(v)) for v in np.geomspace(lo, hi, 9)))
    ns = list(ns)
    if len(ns) < 3:
        raise ValueError("slope fit needs at least 3 values of n")
    job = (lambda n: residual_and_ratio(n, config, check))
    reports = list(executor.map(job, ns)) if executor is not None else [job(n) for n in ns]
    rs = fit_loglog_slope([(r.n, r.residual_sq) for r in reports])[0]
    ms = fit_loglog_slope([(r.n, r.norm_sq) for r in reports])[0]
    qs = fit_loglog_slope([(r.n, r.ratio) for r in reports])[0]
    return ImagDecayFit(reports, rs, ms, qs)


def nonintegrability_demo(xi2: float, lam, R_list, order: int = 200):
    """Truncated squared norms int_{-R}^0 |u(xi1, xi2)|^2 dxi1.

    Returns a list of dicts with keys R, value, ratio (to the previous R) and
    model, the pure exponential e^{(R - R_prev) xi2}.
    """
    if xi2 <= 0:
        raise ValueError("need xi2 > 0")
    R_list = sorted(float(R) for R in R_list)
    rows = []
    prev = None
    for R in R_list:
        cut = min(1.0, R)
        val = 0.0
        for a, b in ((-R, -cut), (-cut, 0.0)):
            if b > a:
                r = gauss_legendre(order, a, b)
                val += float(np.sum(r.weights * _abs_u_sq(r.nodes, xi2, lam)))
        row = {"R": R, "value": val, "ratio": math.nan, "model": math.nan}
        if prev is not None:
            row["ratio"] = val / prev[1]
            row["model"] = math.exp((R - prev[0]) * xi2)
        rows.append(row)
        prev = (R, val)
    return rows
