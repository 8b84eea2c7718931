"""Dense kernels: pivoted LU, log-determinants, resolvent traces, eigenvalues.

The LU routines are written against stacks of matrices (shape ``(..., N, N)``)
so that a whole contour's worth of shifted matrices ``lambda_k I - A`` is
factorised in one pass with ``N`` vectorised elimination steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NearSingularShift, NoConvergence, NotSymmetric

__all__ = [
    "LUFactor",
    "Spectrum",
    "lu_factor",
    "lu_solve",
    "lu_logdet",
    "resolvent_trace",
    "jacobi_eigh",
    "eig_symmetric",
    "SPECTRUM_SLACK",
]

SPECTRUM_SLACK = 1e-9
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class LUFactor:
    """Packed ``P A = L U`` factors of a stack of square matrices.

    ``lu`` holds unit-lower ``L`` below the diagonal and ``U`` on/above it;
    ``perm[..., i]`` is the original row now in position ``i``.  ``parity``
    is +1/-1 for the row permutation and ``singular`` marks stack entries
    where a pivot fell under ``tol``.
    """

    lu: np.ndarray
    perm: np.ndarray
    parity: np.ndarray
    singular: np.ndarray
    tol: np.ndarray

    @property
    def pivots(self) -> np.ndarray:
        return np.diagonal(self.lu, axis1=-2, axis2=-1)


def lu_factor(a, rtol: float = None) -> LUFactor:
    """Doolittle LU with partial (row) pivoting over a stack of matrices.

    A pivot is declared zero when ``|pivot| <= rtol * max|a|`` for its matrix,
    with ``rtol`` defaulting to ``N * machine epsilon``.  Zero pivots leave
    their column uneliminated, so the factor stays finite.
    """
    a = np.array(a, copy=True)
    if not np.issubdtype(a.dtype, np.inexact):
        a = a.astype(float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected a stack of square matrices, got shape {a.shape}")
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    nb = a.shape[0]
    if rtol is None:
        rtol = max(n, 1) * np.finfo(float).eps
    scale = np.abs(a).max(axis=(1, 2)) if n else np.zeros(nb)
    tol = rtol * scale
    perm = np.tile(np.arange(n), (nb, 1))
    parity = np.ones(nb)
    singular = np.zeros(nb, dtype=bool)
    b = np.arange(nb)
    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = p != k
        if swap.any():
            bs, ps = b[swap], p[swap]
            rows = a[bs, k, :].copy()
            a[bs, k, :] = a[bs, ps, :]
            a[bs, ps, :] = rows
            idx = perm[bs, k].copy()
            perm[bs, k] = perm[bs, ps]
            perm[bs, ps] = idx
            parity[swap] *= -1.0
        piv = a[:, k, k]
        dead = np.abs(piv) <= tol
        singular |= dead
        if k + 1 == n:
            break
        safe = np.where(dead, 1.0, piv)
        l = a[:, k + 1:, k] / safe[:, None]
        l[dead] = 0.0
        a[:, k + 1:, k] = l
        a[:, k + 1:, k + 1:] -= l[:, :, None] * a[:, k, None, k + 1:]
    return LUFactor(
        lu=a.reshape(batch_shape + (n, n)),
        perm=perm.reshape(batch_shape + (n,)),
        parity=parity.reshape(batch_shape),
        singular=singular.reshape(batch_shape),
        tol=tol.reshape(batch_shape),
    )


def lu_solve(f: LUFactor, rhs) -> np.ndarray:
    """Solve ``A X = rhs`` for every matrix of the stack.

    ``rhs`` has shape ``(..., N, K)`` (or ``(N, K)``, broadcast over the stack).
    Singular entries of the stack are not checked here.
    """
    lu = f.lu
    n = lu.shape[-1]
    batch_shape = lu.shape[:-2]
    lu2 = lu.reshape((-1, n, n))
    nb = lu2.shape[0]
    rhs = np.asarray(rhs)
    if rhs.ndim == 1:
        rhs = rhs[:, None]
    rhs = np.broadcast_to(rhs, batch_shape + rhs.shape[-2:]).reshape((nb,) + rhs.shape[-2:])
    perm = f.perm.reshape((-1, n))
    dtype = np.result_type(lu2.dtype, rhs.dtype)
    x = np.take_along_axis(rhs, perm[:, :, None], axis=1).astype(dtype, copy=True)
    for k in range(1, n):
        x[:, k, :] -= np.einsum("bj,bjk->bk", lu2[:, k, :k], x[:, :k, :])
    for k in range(n - 1, -1, -1):
        if k + 1 < n:
            x[:, k, :] -= np.einsum("bj,bjk->bk", lu2[:, k, k + 1:], x[:, k + 1:, :])
        x[:, k, :] /= lu2[:, k, k][:, None]
    return x.reshape(batch_shape + x.shape[-2:])


def lu_logdet(matrix):
    """Determinant of ``matrix`` as ``(sign, log|det|)``.

    For real input ``sign`` is -1, 0 or +1; for complex input it is the unit
    phase of the determinant (0 when singular).  A zero sign comes with
    ``log|det| = -inf``.
    """
    f = lu_factor(matrix)
    piv = f.pivots
    if f.singular.ndim == 0:
        if f.singular:
            return 0.0, -np.inf
        mag = np.abs(piv)
        phase = f.parity * np.prod(piv / mag)
        if not np.iscomplexobj(piv):
            phase = float(np.sign(phase))
        return phase, float(np.sum(np.log(mag)))
    mag = np.abs(piv)
    with np.errstate(divide="ignore", invalid="ignore"):
        phase = f.parity * np.prod(np.where(mag > 0, piv / np.where(mag > 0, mag, 1), 0), axis=-1)
        logabs = np.sum(np.log(mag), axis=-1)
    phase = np.where(f.singular, 0, phase)
    logabs = np.where(f.singular, -np.inf, logabs)
    return phase, logabs


def resolvent_trace(a, lam, spectrum=None):
    """``trace((lam I - a)^{-1})``, i.e. ``d/dlam ln det(lam I - a)``.

    With ``spectrum`` (eigenvalues of ``a``) this is ``sum_i 1/(lam - nu_i)``.
    Otherwise every shift is factorised with :func:`lu_factor` and the trace
    is read off ``N`` triangular solves.  ``lam`` may be a scalar or an array
    of shifts; the result has the same shape.
    """
    lam = np.asarray(lam, dtype=complex)
    if spectrum is not None:
        nu = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
        return np.sum(1.0 / (lam[..., None] - nu), axis=-1)
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    shifted = lam[..., None, None] * np.eye(n) - a
    f = lu_factor(shifted, rtol=1e-14)
    if np.any(f.singular):
        bad = np.atleast_1d(lam)[np.atleast_1d(f.singular)]
        raise NearSingularShift(f"lambda I - A is singular near lambda={bad[0]}")
    inv = lu_solve(f, np.eye(n))
    return np.trace(inv, axis1=-2, axis2=-1)


def jacobi_eigh(a, tol: float = 1e-13, max_sweeps: int = 60):
    """Cyclic Jacobi eigen-decomposition of a real symmetric matrix.

    Sweeps stop once the off-diagonal Frobenius norm drops to
    ``tol * ||a||_F``.  Returns ascending eigenvalues and the orthogonal
    matrix of column eigenvectors.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    target = tol * norm
    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target or n < 2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_symmetric(matrix, vectors: bool = False, method: str = "lapack"):
    """Eigenvalues (ascending) of a real symmetric matrix.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    :func:`jacobi_eigh`, which is practical up to a few hundred rows.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    if a.size and np.abs(a - a.T).max() > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"asymmetry {np.abs(a - a.T).max():.3e} exceeds tolerance")
    if method == "lapack":
        if vectors:
            return np.linalg.eigh(a)
        return np.linalg.eigvalsh(a)
    if method == "jacobi":
        w, v = jacobi_eigh(a)
        return (w, v) if vectors else w
    raise ValueError(f"unknown eigen method {method!r}")


@dataclass(frozen=True)
class Spectrum:
    """Sorted mode eigenvalues ``nu_i`` of a correlation matrix, each in [-1, 1]."""

    values: np.ndarray
    source_dim: int

    @classmethod
    def from_values(cls, values, slack: float = SPECTRUM_SLACK) -> "Spectrum":
        nu = np.sort(np.asarray(values, dtype=float).ravel())
        if nu.size and np.abs(nu).max() > 1.0 + slack:
            raise DomainError(f"eigenvalue {nu[np.argmax(np.abs(nu))]!r} outside [-1, 1]")
        nu = np.clip(nu, -1.0, 1.0)
        nu.setflags(write=False)
        return cls(values=nu, source_dim=nu.size)

    @classmethod
    def of(cls, matrix, method: str = "lapack") -> "Spectrum":
        """Spectrum of a correlation matrix (``CorrMatrix`` or plain array)."""
        entries = getattr(matrix, "entries", matrix)
        return cls.from_values(eig_symmetric(entries, method=method))

    def __len__(self):
        return self.source_dim
