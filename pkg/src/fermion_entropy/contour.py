"""Entropies as contour integrals of ``d/dlam ln det(lam I - A)``.

With ``D(lam) = det(lam I - A)``,

    S = (1 / 2 pi i) oint e(1 + eps, lam) d/dlam ln D(lam) dlam

and the same with the Renyi kernel.  By the residue theorem the integral is
``sum_i e(1 + eps, nu_i)``, which tends to the spectral entropy as
``eps -> 0+``.  The contour must enclose ``[-1, 1]`` while staying clear of
the kernel's cuts ``(-inf, -1-eps]`` and ``[1+eps, inf)``, so it crosses the
real axis at ``+-(1 + eps/2)``: a distance ``eps/2`` from both a possible
pole at ``+-1`` and a branch point.  Panels are therefore graded
geometrically toward the two crossings, and each panel is integrated with
Gauss-Legendre nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import check_alpha, mode_entropy, mode_renyi
from .errors import ContourError, NearSingularShift, QuadratureError
from .spectral import lu_factor, resolvent_trace

__all__ = [
    "ContourSpec",
    "log_det_D",
    "log_det_D_path",
    "contour_nodes",
    "entropy_by_contour",
    "renyi_by_contour",
    "residue_sum",
]

IMAG_TOL = 1e-8


@dataclass(frozen=True)
class ContourSpec:
    """Closed curve around ``[-1, 1]``.

    ``shape`` is ``"rectangle"`` (corners ``+-(1 + eps/2) +- i half_height``)
    or ``"ellipse"`` (semi-axes ``1 + eps/2`` and ``half_height``).
    ``panels`` counts the ungraded Gauss-Legendre panels, ``order`` the nodes
    per panel.
    """

    epsilon: float = 1e-4
    shape: str = "rectangle"
    half_height: float = 0.4
    panels: int = 64
    order: int = 20

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ContourError(f"epsilon must be positive, got {self.epsilon}")
        if self.shape not in ("rectangle", "ellipse"):
            raise ContourError(f"unknown contour shape {self.shape!r}")
        if not self.half_height >= self.epsilon / 2:
            raise ContourError("half_height must keep the curve eps/2 away from [-1, 1]")
        if self.panels < 64:
            raise ContourError(f"need at least 64 panels, got {self.panels}")
        if self.order < 2:
            raise ContourError("need at least 2 nodes per panel")

    @property
    def crossing(self) -> float:
        return 1.0 + self.epsilon / 2.0

    def for_alpha(self, alpha: float) -> "ContourSpec":
        """Copy whose height avoids the zeros of the Renyi kernel's log argument.

        For ``alpha > 1`` the sum ``a^alpha + b^alpha`` vanishes on the
        imaginary axis at ``|Im lam| = x tan(pi / (2 alpha))``.
        """
        if alpha <= 1.0:
            return self
        limit = (1.0 + self.epsilon) * math.tan(math.pi / (2.0 * alpha))
        if self.half_height < 0.8 * limit:
            return self
        return ContourSpec(self.epsilon, self.shape, 0.8 * limit, self.panels, self.order)

    def doubled(self) -> "ContourSpec":
        return ContourSpec(self.epsilon, self.shape, self.half_height, 2 * self.panels, 2 * self.order)


def _graded(scale: float, extent: float) -> np.ndarray:
    """Breakpoints ``0, scale, 2 scale, 4 scale, ..., extent``."""
    pts = [0.0]
    step = scale
    while step < extent:
        pts.append(step)
        step *= 2.0
    pts.append(extent)
    return np.asarray(pts)


def _gauss(breaks: np.ndarray, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


def _segment(z0: complex, z1: complex, breaks: np.ndarray, order: int):
    """Nodes on the straight segment ``z0 -> z1`` at fractions ``breaks``."""
    t, w = _gauss(breaks, order)
    return z0 + (z1 - z0) * t, (z1 - z0) * w


def contour_nodes(contour: ContourSpec):
    """Quadrature nodes ``lam_k`` and complex weights ``w_k`` (``dlam``).

    The curve is traversed counter-clockwise.
    """
    x0 = contour.crossing
    eta = contour.half_height
    d = contour.epsilon / 2.0
    n = contour.order
    uniform = np.linspace(0.0, 1.0, contour.panels // 2 + 1)
    if contour.shape == "rectangle":
        up = _graded(d, eta)
        side = np.concatenate((-up[::-1], up[1:]))
        side = (side + eta) / (2.0 * eta)
        parts = [
            _segment(complex(x0, -eta), complex(x0, eta), side, n),
            _segment(complex(x0, eta), complex(-x0, eta), uniform, n),
            _segment(complex(-x0, eta), complex(-x0, -eta), side, n),
            _segment(complex(-x0, -eta), complex(x0, -eta), uniform, n),
        ]
        lam = np.concatenate([p[0] for p in parts])
        w = np.concatenate([p[1] for p in parts])
        return lam, w
    # ellipse: lam(t) = x0 cos t + i eta sin t, graded in t around t = 0, pi
    dt = min(d / eta, 0.1)
    half = _graded(dt, math.pi / 2.0)
    around0 = np.concatenate((-half[::-1], half[1:]))
    t_parts, w_parts = [], []
    for centre in (0.0, math.pi):
        t, wt = _gauss(around0 + centre, n)
        t_parts.append(t)
        w_parts.append(wt)
    t = np.concatenate(t_parts)
    wt = np.concatenate(w_parts)
    lam = x0 * np.cos(t) + 1j * eta * np.sin(t)
    dlam = -x0 * np.sin(t) + 1j * eta * np.cos(t)
    return lam, wt * dlam


def _entries(a):
    return np.asarray(getattr(a, "entries", a), dtype=float)


def log_det_D(a, lam: complex) -> complex:
    """``ln det(lam I - A)`` on the principal branch of each pivot's log."""
    a = _entries(a)
    n = a.shape[0]
    f = lu_factor(complex(lam) * np.eye(n) - a, rtol=1e-14)
    if f.singular:
        raise NearSingularShift(f"lambda={lam} is too close to the spectrum of A")
    piv = f.pivots
    val = np.sum(np.log(piv.astype(complex)))
    if f.parity < 0:
        val += 1j * math.pi
    return complex(val)


def log_det_D_path(a, lams) -> np.ndarray:
    """``ln D`` along a sequence of points, unwrapped to a continuous branch."""
    vals = np.array([log_det_D(a, z) for z in np.asarray(lams, dtype=complex)])
    return vals.real + 1j * np.unwrap(vals.imag)


def residue_sum(spectrum, epsilon: float, alpha: float = None) -> float:
    """``sum_i e(1 + eps, nu_i)`` (or the Renyi kernel): the exact value of the integral."""
    nu = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    if alpha is None:
        return float(np.sum(mode_entropy(1.0 + epsilon, nu)))
    return float(np.sum(mode_renyi(1.0 + epsilon, nu, check_alpha(alpha))))


def _integrate(a, contour: ContourSpec, kernel, spectrum) -> complex:
    lam, w = contour_nodes(contour)
    trace = resolvent_trace(_entries(a), lam, spectrum=spectrum)
    return complex(np.sum(kernel(lam) * trace * w) / (2j * math.pi))


def _evaluate(a, contour, kernel, spectrum, check, tol):
    value = _integrate(a, contour, kernel, spectrum)
    if abs(value.imag) > IMAG_TOL:
        raise QuadratureError(f"imaginary residue {value.imag:.3e} exceeds {IMAG_TOL}")
    if check:
        finer = _integrate(a, contour.doubled(), kernel, spectrum)
        if abs(finer.real - value.real) > tol:
            raise QuadratureError(
                f"quadrature not converged: refinement moved result by {abs(finer - value):.3e}")
    return value.real


def entropy_by_contour(a, contour: ContourSpec = ContourSpec(), spectrum=None,
                       check: bool = True, tol: float = 1e-9) -> float:
    """Von Neumann entropy from the contour representation.

    The log-derivative of ``D`` is the resolvent trace, from batched LU
    solves unless ``spectrum`` is given.  With ``check`` the quadrature is
    repeated on a refined node set and must agree to ``tol``.
    """
    x = 1.0 + contour.epsilon
    return _evaluate(a, contour, lambda lam: mode_entropy(x, lam), spectrum, check, tol)


def renyi_by_contour(a, contour: ContourSpec = ContourSpec(), alpha: float = 2.0,
                     spectrum=None, check: bool = True, tol: float = 1e-9) -> float:
    alpha = check_alpha(alpha)
    contour = contour.for_alpha(alpha)
    x = 1.0 + contour.epsilon
    return _evaluate(a, contour, lambda lam: mode_renyi(x, lam, alpha), spectrum, check, tol)
