"""Matrix truncations, smallest singular values and pseudospectrum maps."""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .operator_core import _as_b

__all__ = [
    "OperatorMatrix",
    "SigmaMinMap",
    "FillingRow",
    "fiber_matrix_fd",
    "rotated_oscillator_hermite",
    "first_order_matrix_imag",
    "sigma_min",
    "pseudospectrum_map",
    "filling_scan",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 1500


@dataclass(frozen=True)
class OperatorMatrix:
    """A square complex matrix plus where it came from.

    ``entries`` may be a scipy sparse matrix for the FD discretizations;
    ``dense()`` always gives an ndarray.
    """
    entries: object
    provenance: str
    params: dict = field(default_factory=dict)
    grid: np.ndarray | None = None

    @property
    def shape(self):
        return self.entries.shape

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.entries):
            return self.entries.toarray()
        return np.asarray(self.entries)

    def sparse(self):
        return sp.csc_matrix(self.entries)

    def eigvals(self) -> np.ndarray:
        return scipy.linalg.eigvals(self.dense())


def fiber_matrix_fd(b, xi2: float, L: float, N: int) -> OperatorMatrix:
    """-d_x^2 + (b x - xi2)^2 on [-L, L], Dirichlet, N interior points, h = 2L/(N+1)."""
    if N < 16 or L <= 0:
        raise ValueError("need N >= 16 and L > 0")
    b = _as_b(b)
    h = 2 * L / (N + 1)
    x = -L + h * np.arange(1, N + 1)
    pot = (b * x - xi2) ** 2
    off = -np.ones(N - 1) / h**2
    M = sp.diags([off, 2.0 / h**2 + pot, off], [-1, 0, 1], format="csr", dtype=complex)
    return OperatorMatrix(M, "fiber-FD", {"b": b, "xi2": xi2, "L": L, "N": N, "h": h}, x)


def rotated_oscillator_hermite(b, N: int) -> OperatorMatrix:
    """-d^2 + b^2 y^2 in the first N Hermite functions.

    -d^2 + y^2 is diag(2k+1). With y = (a + a^+)/sqrt(2),
    <j|y^2|k> = (2k+1)/2 on the diagonal and sqrt((k+1)(k+2))/2 for j = k+2
    (and symmetrically), so M = diag(2k+1) + (b^2 - 1) Y2.
    """
    if N < 16:
        raise ValueError("need N >= 16")
    b = _as_b(b)
    k = np.arange(N, dtype=float)
    Y2 = np.diag((2 * k + 1) / 2)
    off = np.sqrt((k[:-2] + 1) * (k[:-2] + 2)) / 2
    Y2 += np.diag(off, 2) + np.diag(off, -2)
    c = b * b - 1
    M = np.diag(2 * k + 1) + (c.real if c.imag == 0 else c) * Y2
    return OperatorMatrix(M, "rotated-Hermite", {"b": b, "N": N})


def first_order_matrix_imag(L: float, N: int) -> OperatorMatrix:
    """2(i xi1 + xi2) d/dxi1 + xi1^2 + xi2^2 + i on an N x N grid of [-L, L]^2.

    Unknowns are ordered row by row in xi2 (index = j2 * N + j1), so the
    matrix is block diagonal with one block per xi2 row. Centered differences
    inside, second-order one-sided stencils at the two ends.
    """
    if N < 32:
        raise ValueError("need N >= 32")
    xs = np.linspace(-L, L, N)
    h = xs[1] - xs[0]
    D = sp.lil_matrix((N, N))
    for j in range(1, N - 1):
        D[j, j - 1], D[j, j + 1] = -0.5 / h, 0.5 / h
    D[0, 0:3] = np.array([-1.5, 2.0, -0.5]) / h
    D[N - 1, N - 3:N] = np.array([0.5, -2.0, 1.5]) / h
    D = D.tocsr()
    blocks = []
    for x2 in xs:
        blocks.append(sp.diags(2 * (1j * xs + x2)) @ D + sp.diags(xs**2 + x2**2 + 1j))
    M = sp.block_diag(blocks, format="csr")
    XI1, XI2 = np.meshgrid(xs, xs, indexing="xy")
    return OperatorMatrix(M, "first-order-FD", {"L": L, "N": N, "h": h},
                          np.stack([XI1.ravel(), XI2.ravel()]))


def _sigma_min_sparse(A, tol=1e-10, maxiter=500):
    """Smallest singular value from the largest eigenvalue of (A^H A)^{-1}.

    One sparse LU of A; Lanczos (a Krylov form of inverse iteration) on the
    inverse normal-equations operator, so clustered singular values do not stall.
    """
    lu = spla.splu(sp.csc_matrix(A))
    n = A.shape[0]
    op = spla.LinearOperator((n, n), matvec=lambda v: lu.solve(lu.solve(v), trans="H"),
                             dtype=complex)
    try:
        mu = spla.eigsh(op, k=1, which="LM", tol=tol, maxiter=maxiter,
                        v0=np.ones(n, dtype=complex), return_eigenvectors=False)[0]
    except spla.ArpackNoConvergence as exc:
        raise ArithmeticError(f"inverse iteration did not converge in {maxiter} steps") from exc
    if not np.isfinite(mu) or mu <= 0:
        return 0.0
    return 1.0 / math.sqrt(mu)


def sigma_min(M, lam: complex = 0.0) -> float:
    """Smallest singular value of M - lam I."""
    if isinstance(M, OperatorMatrix):
        n = M.n
        A = M.entries
    else:
        A = M
        n = A.shape[0]
    if n <= DENSE_LIMIT:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A)
        s = scipy.linalg.svdvals(dense - lam * np.eye(n))
        return float(s[-1])
    A = sp.csc_matrix(A) - lam * sp.identity(n, format="csc")
    try:
        return _sigma_min_sparse(A)
    except RuntimeError:               # exactly singular factor
        return 0.0


@dataclass(frozen=True)
class SigmaMinMap:
    re: np.ndarray
    im: np.ndarray
    values: np.ndarray          # shape (len(im), len(re)); nan where sigma_min failed

    @property
    def lambdas(self) -> np.ndarray:
        return self.re[None, :] + 1j * self.im[:, None]

    def argmin(self) -> complex:
        j, i = np.unravel_index(np.nanargmin(self.values), self.values.shape)
        return complex(self.re[i], self.im[j])

    def local_minima(self) -> list[complex]:
        v = np.where(np.isnan(self.values), np.inf, self.values)
        pad = np.pad(v, 1, constant_values=np.inf)
        out = []
        for j in range(v.shape[0]):
            for i in range(v.shape[1]):
                nb = pad[j:j + 3, i:i + 3].copy()
                nb[1, 1] = np.inf
                if v[j, i] < nb.min():
                    out.append(complex(self.re[i], self.im[j]))
        return out


def pseudospectrum_map(M, re_range, im_range, resolution, threads: int | None = None) -> SigmaMinMap:
    """sigma_min(M - lam) on an m_re x m_im grid; ``resolution`` is m or (m_re, m_im)."""
    m_re, m_im = (resolution, resolution) if np.isscalar(resolution) else resolution
    if max(m_re, m_im) > 512 or min(m_re, m_im) < 1:
        raise ValueError("grid resolution must be between 1 and 512")
    re = np.linspace(*re_range, m_re) if m_re > 1 else np.array([0.5 * sum(re_range)])
    im = np.linspace(*im_range, m_im) if m_im > 1 else np.array([0.5 * sum(im_range)])
    lams = [complex(r, i) for i in im for r in re]

    def one(lam):
        try:
            return sigma_min(M, lam)
        except (ArithmeticError, np.linalg.LinAlgError):
            return math.nan

    with ThreadPoolExecutor(max_workers=threads) as ex:
        vals = list(ex.map(one, lams))
    return SigmaMinMap(re, im, np.array(vals).reshape(m_im, m_re))


@dataclass(frozen=True)
class FillingRow:
    n: int
    L: float
    N: int
    sigma: float
    sigma_refined: float
    floor: float            # eps * ||A||: below this sigma_min is roundoff

    @property
    def at_floor(self) -> bool:
        return self.sigma_refined < self.floor

    @property
    def bound(self) -> float:
        """sigma_min, or the roundoff floor when the computed value is below it."""
        return max(self.sigma_refined, self.floor)

    @property
    def refinement_gap(self) -> float:
        return abs(self.sigma_refined - self.sigma) / max(self.sigma_refined, 1e-300)


def _roundoff_floor(M: OperatorMatrix, lam) -> float:
    A = M.entries
    norm1 = abs(A - lam * sp.identity(A.shape[0])).sum(axis=0).max()
    return 100 * np.finfo(float).eps * float(norm1)


def filling_scan(b, lam, ns, d: float | None = None, points_per_unit: float = 40.0,
                 refine_tol: float = 0.05, check_decrease: bool = True) -> list[FillingRow]:
    """sigma_min(fiber(xi2 = n) - lam) for each n on a window sized for the quasimodes.

    The window is [-L_n, L_n] with L_n = (t_theta + 3 d)(n + 1) + 8/sqrt(|b| cos theta),
    t_theta = 1/cos theta, d = tan(theta)/2, and N = points_per_unit * 2 L_n.
    The additive Gaussian margin keeps the Dirichlet walls off the modes
    centred at x = n/b (it matters for real b where d = 0). Each point is
    recomputed at 1.5x resolution; disagreement beyond ``refine_tol`` above
    the roundoff floor raises ArithmeticError. Once sigma_min drops below the
    floor the row only certifies sigma_min <= floor.
    """
    b = _as_b(b)
    theta = cmath.phase(b)
    if not (0.0 <= theta < math.pi / 2) or b == 0:
        raise ValueError("filling_scan needs arg b in [0, pi/2)")
    t_theta = 1.0 / math.cos(theta)
    if d is None:
        d = 0.5 * math.tan(theta)
    ns = list(ns)
    if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])):
        raise ValueError("n-list must be increasing")
    margin = 8.0 / math.sqrt(abs(b) * math.cos(theta))
    rows = []
    for n in ns:
        L = (t_theta + 3 * d) * (n + 1) + margin
        N = max(64, int(points_per_unit * 2 * L))
        M = fiber_matrix_fd(b, n, L, N)
        s1 = sigma_min(M, lam)
        M2 = fiber_matrix_fd(b, n, L, int(1.5 * N))
        row = FillingRow(n, L, N, s1, sigma_min(M2, lam), _roundoff_floor(M2, lam))
        if not row.at_floor and row.refinement_gap > refine_tol:
            raise ArithmeticError(f"n={n}: h-refinement changed sigma_min by {row.refinement_gap:.1%}")
        rows.append(row)
    if check_decrease and b.imag != 0:
        for a, c in zip(rows, rows[1:]):
            if a.at_floor:
                break
            if not c.bound < a.bound:
                raise AssertionError(f"sigma_min did not decrease from n={a.n} to n={c.n}")
    return rows
