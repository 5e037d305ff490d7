"""The magnetic Laplacian with constant complex field b and its relatives.

Three representations are used throughout:

* planar:        L_b = -Delta + 2 i b x1 d/dx2 + b^2 x1^2 acting on psi(x1, x2)
* fibered:       -d^2/dx^2 + (b x - xi2)^2 acting on f(x) for fixed xi2
* first order:   2 (i xi1 + xi2) d/dxi1 + xi1^2 + xi2^2 + i   (only b = i)

Derivatives come either from closures attached to a :class:`TestFunction`
or from centered differences with one Richardson step.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "FieldParameter",
    "TestFunction",
    "SpectrumClassification",
    "ContinuousPart",
    "landau_levels",
    "fd_derivative",
    "apply_planar",
    "apply_gauge_imag",
    "apply_fiber",
    "apply_first_order_imag",
    "residual_coefficient",
    "symmetry_residual",
    "classify_spectrum",
    "gaussian_test_function",
    "parabolic_mode",
    "fd_residual_coefficient",
    "coefficient_discrepancy_report",
]

DEFAULT_H = 1e-3


class FieldParameter:
    """Complex field b = |b| e^{i theta}, theta = Arg b in (-pi, pi]."""

    __slots__ = ("b",)

    def __init__(self, b):
        if isinstance(b, FieldParameter):
            b = b.b
        b = complex(b)
        if b.imag == 0:
            b = complex(b.real, 0.0)
        self.b = b

    @classmethod
    def polar(cls, modulus, theta):
        return cls(cmath.rect(modulus, theta))

    @property
    def modulus(self) -> float:
        return abs(self.b)

    @property
    def theta(self) -> float:
        return float(np.angle(self.b)) if self.b != 0 else 0.0

    @property
    def kind(self) -> str:
        if self.b == 0:
            return "zero"
        if self.b.imag == 0:
            return "real"
        if self.b.real == 0:
            return "imaginary"
        return "generic"

    def reduction_chain(self):
        """Maps bringing b to the first-quadrant unit arc.

        Returns ``(representative, steps)``; each step is a ``(name, b_before,
        b_after)`` triple among "scaling" (b -> b/|b|), "reflection"
        (b -> -b) and "conjugation" (b -> conj b).
        """
        if self.b == 0:
            return FieldParameter(0), []
        steps = []
        b = self.b
        if abs(b) != 1.0:
            steps.append(("scaling", b, b / abs(b)))
            b = b / abs(b)
        if b.real < 0 or (b.real == 0 and b.imag < 0):
            steps.append(("reflection", b, -b))
            b = -b
        if b.imag < 0:
            steps.append(("conjugation", b, b.conjugate()))
            b = b.conjugate()
        return FieldParameter(b), steps

    def __complex__(self):
        return self.b

    def __eq__(self, other):
        if isinstance(other, FieldParameter):
            return self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash(self.b)

    def __repr__(self):
        return f"FieldParameter({self.b!r})"


def _as_b(b) -> complex:
    return b.b if isinstance(b, FieldParameter) else complex(b)


@dataclass(frozen=True)
class TestFunction:
    """A function of one or two real variables with optional analytic derivatives.

    ``value(*coords)`` must be vectorized. ``d1``/``d2`` are first partials in
    the first/second coordinate and ``d11``/``d22`` the pure second partials.
    Missing derivatives are replaced by finite differences.
    """

    value: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    d11: Optional[Callable] = None
    d22: Optional[Callable] = None

    __test__ = False  # not a pytest class

    def __call__(self, *coords):
        return self.value(*coords)

    def without_derivatives(self) -> "TestFunction":
        return TestFunction(self.value)


def gaussian_test_function(center=(0.0, 0.0), width=1.0, wavevector=(0.0, 0.0),
                           amplitude=1.0) -> TestFunction:
    """A modulated complex Gaussian with analytic derivatives."""
    c1, c2 = center
    k1, k2 = wavevector
    a = 1.0 / width**2

    def val(x1, x2):
        return amplitude * np.exp(-0.5 * a * ((x1 - c1) ** 2 + (x2 - c2) ** 2)
                                  + 1j * (k1 * x1 + k2 * x2))

    def g1(x1, x2):
        return -a * (x1 - c1) + 1j * k1

    def g2(x1, x2):
        return -a * (x2 - c2) + 1j * k2

    return TestFunction(
        value=val,
        d1=lambda x1, x2: g1(x1, x2) * val(x1, x2),
        d2=lambda x1, x2: g2(x1, x2) * val(x1, x2),
        d11=lambda x1, x2: (g1(x1, x2) ** 2 - a) * val(x1, x2),
        d22=lambda x1, x2: (g2(x1, x2) ** 2 - a) * val(x1, x2),
    )


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------

def _shift(coords, axis, delta):
    out = list(coords)
    out[axis] = out[axis] + delta
    return out


def _centered(f, coords, axis, order, h):
    if order == 1:
        return (f(*_shift(coords, axis, h)) - f(*_shift(coords, axis, -h))) / (2 * h)
    return (f(*_shift(coords, axis, h)) - 2 * f(*coords) + f(*_shift(coords, axis, -h))) / h**2


def fd_derivative(f, coords, axis=0, order=1, h=DEFAULT_H, relative=True):
    """Centered difference of order 1 or 2 plus one Richardson step (O(h^4)).

    With ``relative`` the step is h * max(1, |coordinate|), else h itself.
    """
    coords = [np.asarray(c, dtype=float) for c in coords]
    hs = h * np.maximum(1.0, np.abs(coords[axis])) if relative else np.asarray(h, dtype=float)
    d_h = _centered(f, coords, axis, order, hs)
    d_h2 = _centered(f, coords, axis, order, hs / 2)
    return (4.0 * d_h2 - d_h) / 3.0


def _deriv(psi: TestFunction, name, coords, h):
    fn = getattr(psi, name)
    if fn is not None:
        return fn(*coords)
    axis = 0 if name in ("d1", "d11") else 1
    order = 2 if name in ("d11", "d22") else 1
    return fd_derivative(psi.value, coords, axis=axis, order=order, h=h)


# --------------------------------------------------------------------------
# Operator actions
# --------------------------------------------------------------------------

def apply_planar(b, psi: TestFunction, point, h=DEFAULT_H):
    """(-Delta + 2 i b x1 d2 + b^2 x1^2) psi at ``point = (x1, x2)``."""
    b = _as_b(b)
    x1, x2 = (np.asarray(p, dtype=float) for p in point)
    c = (x1, x2)
    lap = _deriv(psi, "d11", c, h) + _deriv(psi, "d22", c, h)
    return -lap + 2j * b * x1 * _deriv(psi, "d2", c, h) + b * b * x1 * x1 * psi.value(x1, x2)


def apply_gauge_imag(g: TestFunction, point, h=DEFAULT_H):
    """(-i d1 + x1)^2 + (-i d2 - i x1)^2 applied to g (the b = i gauge-shifted form).

    Expanded: -Delta g - i g - 2 i x1 d1 g - 2 x1 d2 g.
    """
    x1, x2 = (np.asarray(p, dtype=float) for p in point)
    c = (x1, x2)
    lap = _deriv(g, "d11", c, h) + _deriv(g, "d22", c, h)
    return (-lap - 1j * g.value(x1, x2) - 2j * x1 * _deriv(g, "d1", c, h)
            - 2 * x1 * _deriv(g, "d2", c, h))


def apply_fiber(b, xi2, f: TestFunction, x, h=DEFAULT_H):
    """(-d^2/dx^2 + (b x - xi2)^2) f at ``x`` for the fiber ``xi2``."""
    b = _as_b(b)
    x = np.asarray(x, dtype=float)
    if f.d11 is not None:
        fxx = f.d11(x)
    else:
        fxx = fd_derivative(f.value, (x,), axis=0, order=2, h=h)
    return -fxx + (b * x - xi2) ** 2 * f.value(x)


def apply_first_order_imag(g: TestFunction, point, h=DEFAULT_H):
    """2 (i xi1 + xi2) d/dxi1 g + (xi1^2 + xi2^2 + i) g."""
    x1, x2 = (np.asarray(p, dtype=float) for p in point)
    gx = _deriv(g, "d1", (x1, x2), h)
    return 2 * (1j * x1 + x2) * gx + (x1 * x1 + x2 * x2 + 1j) * g.value(x1, x2)


def residual_coefficient(lam, b, variant: str = "derived") -> complex:
    """C such that (fiber - lam) u = C / Z^2 u for the parabolic-cylinder mode u.

    ``variant="derived"`` gives -lam^2/(2b) + 2 lam - 3b/2, which is what
    differentiating u actually produces. ``variant="paper-printed"`` gives
    -lam^2/2 + 2 lam - 3b/2; the two agree only when b = 1.
    """
    b = _as_b(b)
    lam = complex(lam)
    if b == 0:
        raise ValueError("residual coefficient needs b != 0")
    if variant == "derived":
        return -lam * lam / (2 * b) + 2 * lam - 1.5 * b
    if variant == "paper-printed":
        return -lam * lam / 2 + 2 * lam - 1.5 * b
    raise ValueError(f"unknown variant {variant!r}")


def parabolic_mode(lam, b):
    """u(x, xi2) = exp(-Z^2/4) Z^(lam/(2b) - 1/2), Z = sqrt(2b)(x - xi2/b), principal branch."""
    b = _as_b(b)
    lam = complex(lam)
    sb2 = cmath.sqrt(2 * b)
    mu = lam / (2 * b) - 0.5

    def u(x, xi2):
        Z = sb2 * (np.asarray(x, dtype=float) - xi2 / b)
        return np.exp(-0.25 * Z * Z + mu * np.log(Z))
    return u


def fd_residual_coefficient(lam, b, xi2, x, h=3e-3):
    """C estimated pointwise as Z^2 (fiber - lam) u / u with Richardson differences.

    The step is absolute; at moderate |Z| (order 1) h = 3e-3 balances the
    O(h^4) truncation against roundoff.
    """
    b = _as_b(b)
    lam = complex(lam)
    u = parabolic_mode(lam, b)
    x = np.asarray(x, dtype=float)
    f = TestFunction(lambda t: u(t, xi2))
    fxx = fd_derivative(f.value, (x,), axis=0, order=2, h=h, relative=False)
    Z = cmath.sqrt(2 * b) * (x - xi2 / b)
    return (-fxx + ((b * x - xi2) ** 2 - lam) * f(x)) * Z * Z / f(x)


def coefficient_sample_points(b, xi2, count, rng):
    """Real x with 0.7 < |Z| and |Arg Z| < 2.8 (clear of the branch cut)."""
    b = _as_b(b)
    sb2 = cmath.sqrt(2 * b)
    out = np.empty(0)
    while out.size < count:
        x = xi2 * b.real / abs(b) + rng.uniform(-1.5, 1.5, 4 * count)
        Z = sb2 * (x - xi2 / b)
        out = np.concatenate([out, x[(np.abs(Z) > 0.7) & (np.abs(np.angle(Z)) < 2.8)]])
    return out[:count]


@dataclass(frozen=True)
class CoefficientCheck:
    lam: complex
    b: complex
    derived: complex
    printed: complex
    fd_max_rel_derived: float     # max_x |C_fd / C_derived - 1|
    fd_min_rel_printed: float     # min_x |C_fd / C_printed - 1|

    @property
    def printed_rejected(self) -> bool:
        return self.fd_min_rel_printed > 1e-3


def coefficient_discrepancy_report(pairs=20, points=100, seed=0, h=3e-3):
    """FD identification of C for random (lam, b), 0.3 < arg b < 1.3.

    Returns ``(checks, text)``; the text lists both variants against the
    FD value for each pair.
    """
    rng = np.random.default_rng(seed)
    checks = []
    for _ in range(pairs):
        b = cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(0.3, 1.3))
        lam = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        xi2 = rng.uniform(1.0, 2.0)
        x = coefficient_sample_points(b, xi2, points, rng)
        C = fd_residual_coefficient(lam, b, xi2, x, h)
        d = residual_coefficient(lam, b, "derived")
        p = residual_coefficient(lam, b, "paper-printed")
        checks.append(CoefficientCheck(lam, b, d, p, float(np.max(np.abs(C / d - 1))),
                                       float(np.min(np.abs(C / p - 1)))))
    lines = ["residual coefficient C in (fiber - lam) u = C/Z^2 u",
             "  derived: -lam^2/(2b) + 2 lam - 3b/2;  printed: -lam^2/2 + 2 lam - 3b/2"]
    for c in checks:
        lines.append(f"  b={c.b:.4f} lam={c.lam:.4f}: derived {c.derived:.6f} (FD rel err "
                     f"{c.fd_max_rel_derived:.1e}), printed {c.printed:.6f} (FD rel err >= "
                     f"{c.fd_min_rel_printed:.1e})")
    return checks, "\n".join(lines)


def landau_levels(b, kmax: int):
    """Complex Landau levels {+-(2k+1) b : k <= kmax}, sign chosen so Re > 0.

    Returns ``(levels, tag)``. For Re b = 0 the list is empty and the tag
    explains why; otherwise the tag is ``"+"`` or ``"-"``.
    """
    b = _as_b(b)
    if b.real == 0:
        return [], "no eigenvalues: Re b = 0"
    sign = 1.0 if b.real > 0 else -1.0
    return [sign * (2 * k + 1) * b for k in range(kmax + 1)], "+" if sign > 0 else "-"


# --------------------------------------------------------------------------
# Symmetries
# --------------------------------------------------------------------------

_RELATIONS = ("scaling", "reflection", "C-conjugation", "T-conjugation")


def symmetry_residual(relation: str, b, psi: TestFunction, samples, h=DEFAULT_H) -> float:
    """Max pointwise discrepancy between the two sides of an intertwining relation.

    scaling:        V^-1 L_b V = |b| L_{b/|b|},  (V psi)(x) = |b|^{1/2} psi(|b|^{1/2} x)
    reflection:     S^-1 L_b S = L_{-b},        (S psi)(x1, x2) = psi(-x1, x2)
    C-conjugation:  C L_b C^-1 = L_{conj b},    (C psi)(x1, x2) = conj psi(-x1, x2)
    T-conjugation:  T L_i = L_i T,              T psi = conj psi  (b = i only)

    Both sides are evaluated by finite differences on the transformed
    closures, so no analytic derivatives of ``psi`` are used.
    """
    b = _as_b(b)
    if relation not in _RELATIONS:
        raise ValueError(f"relation must be one of {_RELATIONS}")
    samples = np.asarray(samples, dtype=float)
    x1, x2 = samples[:, 0], samples[:, 1]
    f = psi.value

    if relation == "scaling":
        r = abs(b)
        if r == 0:
            raise ValueError("scaling relation needs b != 0")
        sr = math.sqrt(r)
        Vpsi = TestFunction(lambda y1, y2: sr * f(sr * y1, sr * y2))
        # (V^-1 g)(x) = r^{-1/2} g(x / sqrt r)
        lhs = apply_planar(b, Vpsi, (x1 / sr, x2 / sr), h=h) / sr
        rhs = r * apply_planar(b / r, TestFunction(f), (x1, x2), h=h)
    elif relation == "reflection":
        Spsi = TestFunction(lambda y1, y2: f(-y1, y2))
        lhs = apply_planar(b, Spsi, (-x1, x2), h=h)
        rhs = apply_planar(-b, TestFunction(f), (x1, x2), h=h)
    elif relation == "C-conjugation":
        Cpsi = TestFunction(lambda y1, y2: np.conj(f(-y1, y2)))
        lhs = np.conj(apply_planar(b, Cpsi, (-x1, x2), h=h))
        rhs = apply_planar(b.conjugate(), TestFunction(f), (x1, x2), h=h)
    else:
        if b != 1j:
            raise ValueError("T-conjugation relation only holds for b = i")
        Tpsi = TestFunction(lambda y1, y2: np.conj(f(y1, y2)))
        lhs = np.conj(apply_planar(b, TestFunction(f), (x1, x2), h=h))
        rhs = apply_planar(b, Tpsi, (x1, x2), h=h)
    return float(np.max(np.abs(lhs - rhs)))


# --------------------------------------------------------------------------
# Spectrum classification
# --------------------------------------------------------------------------

class ContinuousPart(str, Enum):
    HALF_LINE = "half-line"                    # [0, inf)
    PLANE = "whole-plane"                      # C
    PLANE_MINUS_POINTS = "plane-minus-landau"  # C \ Lambda_b
    EMPTY = "empty"


@dataclass(frozen=True)
class SpectrumClassification:
    b: complex
    continuous: ContinuousPart
    point_part: str                     # "empty" or "landau"
    note: str
    landau_sign: Optional[str] = None   # "+" or "-" when point_part == "landau"
    residual: str = field(default="empty")

    def point_spectrum(self, kmax: int = 4):
        if self.point_part == "empty":
            return []
        return landau_levels(self.b, kmax)[0]

    @property
    def whole_plane(self) -> bool:
        return self.continuous in (ContinuousPart.PLANE, ContinuousPart.PLANE_MINUS_POINTS)


def classify_spectrum(b) -> SpectrumClassification:
    b = FieldParameter(b)
    kind = b.kind
    if kind == "zero":
        return SpectrumClassification(b.b, ContinuousPart.HALF_LINE, "empty",
                                      "free Laplacian: purely continuous [0, inf)")
    if kind == "real":
        _, sign = landau_levels(b, 0)
        return SpectrumClassification(b.b, ContinuousPart.EMPTY, "landau",
                                      "self-adjoint: pure point, Landau levels of infinite multiplicity",
                                      landau_sign=sign)
    if kind == "imaginary":
        return SpectrumClassification(b.b, ContinuousPart.PLANE, "empty",
                                      "purely imaginary field: spectrum is C, no eigenvalues")
    _, sign = landau_levels(b, 0)
    return SpectrumClassification(b.b, ContinuousPart.PLANE_MINUS_POINTS, "landau",
                                  "spectrum is C; eigenvalues are the rotated Landau levels",
                                  landau_sign=sign)

