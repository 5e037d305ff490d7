"""Complex Landau eigenfunctions of the fiber operator -d_x^2 + (b x - xi2)^2.

    h_kl(x, xi2) = psi_k(sqrt(b) (x - xi2 / b)) psi_l(xi2 / sqrt(cos theta))

With y = sqrt(b)(x - xi2/b) one has (b x - xi2)^2 = b y^2 and d_x^2 = b d_y^2,
so the fiber operator acts as b(-d_y^2 + y^2) and h_kl has eigenvalue b(2k+1)
for every l.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .numerics import gauss_legendre, hermite_function, hermite_function_derivative, hermite_functions
from .operator_core import _as_b, fd_derivative

__all__ = [
    "LandauMode",
    "GramConditioningWarning",
    "h_kl_eval",
    "eigen_residual",
    "eigen_residual_fd",
    "quadrature_box",
    "gram_matrix",
    "degeneracy_gram",
    "span_eigen_residual",
    "projection_completeness_demo",
]

MAX_INDEX = 10
MAX_K_PROJECTION = 12


class GramConditioningWarning(RuntimeWarning):
    pass


def _check_b(b) -> complex:
    b = _as_b(b)
    theta = cmath.phase(b)
    if not (0.0 < theta < math.pi / 2) or b == 0:
        raise ValueError(f"Landau modes need arg b in (0, pi/2), got arg b = {theta:.6g}")
    return b


def _shear_args(b, x, xi2):
    sb = cmath.sqrt(b)
    y = sb * (np.asarray(x, dtype=float) - np.asarray(xi2, dtype=float) / b)
    z = np.asarray(xi2, dtype=float) / math.sqrt(math.cos(cmath.phase(b)))
    return y, z


def h_kl_eval(k: int, l: int, b, x, xi2):
    """h_kl at (x, xi2); sqrt(b) by principal branch."""
    if k < 0 or l < 0:
        raise ValueError("Hermite indices must be >= 0")
    b = _check_b(b)
    y, z = _shear_args(b, x, xi2)
    return hermite_function(k, y) * hermite_function(l, z)


@dataclass(frozen=True)
class LandauMode:
    k: int
    l: int
    b: complex

    def __post_init__(self):
        _check_b(self.b)
        if self.k < 0 or self.l < 0:
            raise ValueError("Hermite indices must be >= 0")

    @property
    def eigenvalue(self) -> complex:
        return complex(self.b) * (2 * self.k + 1)

    def __call__(self, x, xi2):
        return h_kl_eval(self.k, self.l, self.b, x, xi2)

    def d2x(self, x, xi2):
        """d^2 h / dx^2 via the ladder relations."""
        b = complex(self.b)
        y, z = _shear_args(b, x, xi2)
        return b * hermite_function_derivative(self.k, y, 2) * hermite_function(self.l, z)


def quadrature_box(b, kmax: int, order: int = 128):
    """Tensor Gauss-Legendre rule in sheared coordinates (x' = x - xi2/cos theta, xi2).

    Half-widths 8/sqrt(cos theta) plus the classical turning point
    sqrt(2 kmax + 1), scaled the same way. Returns (X, XI2, W) grids.
    """
    c = math.cos(cmath.phase(b))
    half = (8.0 + math.sqrt(2 * kmax + 1)) / math.sqrt(c * abs(b))
    half2 = (8.0 + math.sqrt(2 * kmax + 1)) / math.sqrt(c)
    rx = gauss_legendre(order, -half, half)
    rz = gauss_legendre(order, -half2, half2)
    XP, XI2 = np.meshgrid(rx.nodes, rz.nodes, indexing="ij")
    W = np.outer(rx.weights, rz.weights)
    return XP + XI2 / c, XI2, W


def _rel_residual(r, h, W):
    return math.sqrt(float(np.sum(W * np.abs(r) ** 2)) / float(np.sum(W * np.abs(h) ** 2)))


def eigen_residual(k: int, l: int, b, adjoint: bool = False, order: int = 128) -> float:
    """||(fiber - b(2k+1)) h_kl|| / ||h_kl|| by tensor quadrature.

    With ``adjoint`` the check is on conj(h_kl) against conj(b)(2k+1) with the
    fiber operator for conj(b), which is the adjoint.
    """
    if max(k, l) > MAX_INDEX:
        raise ValueError(f"indices up to {MAX_INDEX} supported")
    b = _check_b(b)
    mode = LandauMode(k, l, b)
    X, XI2, W = quadrature_box(b, max(k, l), order)
    h = mode(X, XI2)
    d2 = mode.d2x(X, XI2)
    bb, lam = b, mode.eigenvalue
    if adjoint:
        h, d2, bb, lam = np.conj(h), np.conj(d2), b.conjugate(), lam.conjugate()
    r = -d2 + (bb * X - XI2) ** 2 * h - lam * h
    return _rel_residual(r, h, W)


def eigen_residual_fd(k: int, l: int, b, order: int = 96, h: float = 1e-3) -> float:
    """Same as eigen_residual but with a Richardson finite difference for d_x^2."""
    b = _check_b(b)
    mode = LandauMode(k, l, b)
    X, XI2, W = quadrature_box(b, max(k, l), order)
    hv = mode(X, XI2)
    d2 = fd_derivative(lambda x: mode(x, XI2), (X,), axis=0, order=2, h=h, relative=False)
    r = -d2 + (b * X - XI2) ** 2 * hv - mode.eigenvalue * hv
    return _rel_residual(r, hv, W)


# --------------------------------------------------------------------------
# Gram matrices and projections
# --------------------------------------------------------------------------

def _index_list(K):
    return [(k, l) for k in range(K + 1) for l in range(K + 1)]


def _mode_table(b, indices, X, XI2):
    kmax = max(k for k, _ in indices)
    lmax = max(l for _, l in indices)
    y, z = _shear_args(b, X, XI2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hy = hermite_functions(kmax, y)
        hz = hermite_functions(lmax, z)
    return np.stack([(hy[k] * hz[l]).ravel() for k, l in indices])


def _plane_grid(b, K, f_radius, order):
    """Fixed (x, xi2) box containing both the modes up to K and the support of f."""
    c = math.cos(cmath.phase(b))
    reach = (8.0 + math.sqrt(2 * K + 1)) / math.sqrt(c)
    ymax = max(reach, f_radius)
    xmax = max(ymax / c + reach, f_radius)
    npan = 4
    xs, ws = [], []
    for a, bnd in ((-xmax, xmax), (-ymax, ymax)):
        edges = np.linspace(a, bnd, npan + 1)
        rules = [gauss_legendre(order, e0, e1) for e0, e1 in zip(edges, edges[1:])]
        xs.append(np.concatenate([r.nodes for r in rules]))
        ws.append(np.concatenate([r.weights for r in rules]))
    X, XI2 = np.meshgrid(xs[0], xs[1], indexing="ij")
    return X, XI2, np.outer(ws[0], ws[1])


def gram_matrix(b, indices, order: int = 48, X=None, XI2=None, W=None):
    """G[i, j] = <h_i, h_j> in L^2(R^2) for the given (k, l) list."""
    b = _check_b(b)
    if X is None:
        K = max(max(k, l) for k, l in indices)
        X, XI2, W = _plane_grid(b, K, 0.0, order)
    H = _mode_table(b, indices, X, XI2)
    w = W.ravel()
    return (H.conj() * w) @ H.T


def degeneracy_gram(b, k: int, lmax: int, order: int = 48):
    """Gram matrix over l = 0..lmax at fixed k, and its smallest eigenvalue."""
    G = gram_matrix(b, [(k, l) for l in range(lmax + 1)], order)
    return G, float(np.linalg.eigvalsh(G)[0])


def span_eigen_residual(b, lam, K: int, order: int = 48) -> float:
    """min over span{h_kl : k, l <= K} of ||(fiber - lam) f|| / ||f||.

    (fiber - lam) sum a_kl h_kl = sum (b(2k+1) - lam) a_kl h_kl, so this is
    the square root of the smallest generalized eigenvalue of (D* G D, G).
    """
    b = _check_b(b)
    idx = _index_list(K)
    G = gram_matrix(b, idx, order)
    D = np.diag([b * (2 * k + 1) - complex(lam) for k, _ in idx])
    A = D.conj().T @ G @ D
    ev = scipy.linalg.eigh((A + A.conj().T) / 2, (G + G.conj().T) / 2, eigvals_only=True)
    return math.sqrt(max(float(ev[0]), 0.0))


def _regularized_solve(G, c, shift=1e-12, refine=3):
    """Tikhonov solve (G + eps I) a = c, eps = shift * ||G||, plus iterative refinement."""
    eps = shift * np.linalg.norm(G, 2)
    cho = scipy.linalg.cho_factor(G + eps * np.eye(len(G)))
    a = scipy.linalg.cho_solve(cho, c)
    for _ in range(refine):
        a = a + scipy.linalg.cho_solve(cho, c - G @ a)
    return a


def projection_completeness_demo(f, b, K: int = 8, f_radius: float = 3.0, order: int = 40,
                                 cond_limit: float = 1e12):
    """Relative L^2 residual of the projection of f onto span{h_kl : k, l <= K'}, K' = 1..K.

    ``f(x, xi2)`` must be vectorized; ``f_radius`` bounds its effective
    support. Returns a list of (K', residual). Stops early with a
    GramConditioningWarning once cond(G) exceeds ``cond_limit``.
    """
    if K > MAX_K_PROJECTION:
        raise ValueError(f"K <= {MAX_K_PROJECTION} required")
    b = _check_b(b)
    X, XI2, W = _plane_grid(b, K, f_radius, order)
    w = W.ravel()
    fv = np.asarray(f(X, XI2), dtype=complex).ravel()
    fnorm2 = float(np.sum(w * np.abs(fv) ** 2))
    idx_all = _index_list(K)
    H_all = _mode_table(b, idx_all, X, XI2)
    rows = []
    for Kp in range(1, K + 1):
        sel = [i for i, (k, l) in enumerate(idx_all) if k <= Kp and l <= Kp]
        H = H_all[sel]
        # unit-norm columns (Jacobi scaling) before the conditioning test
        H = H / np.sqrt(np.sum(w * np.abs(H) ** 2, axis=1))[:, None]
        Hw = H.conj() * w
        G = Hw @ H.T
        cond = np.linalg.cond(G)
        if cond > cond_limit:
            warnings.warn(f"Gram condition number {cond:.2e} at K={Kp}; truncating",
                          GramConditioningWarning, stacklevel=2)
            break
        a = _regularized_solve(G, Hw @ fv)
        r = fv - a @ H
        rows.append((Kp, math.sqrt(float(np.sum(w * np.abs(r) ** 2)) / fnorm2)))
    for (_, r0), (Kp, r1) in zip(rows, rows[1:]):
        if r1 > r0 * (1 + 1e-8) + 1e-13:
            raise ArithmeticError(f"projection residual increased at K={Kp}: {r0:.3e} -> {r1:.3e}")
    return rows
