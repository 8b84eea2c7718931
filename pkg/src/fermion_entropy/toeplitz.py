"""Toeplitz-like bordered matrices and their determinants.

For sites ``p`` and ``q`` separated by complement sites ``D_1 < ... < D_K``
the matrix ``T_pq`` has rows labelled ``(p, D_1, ..., D_K)``, columns
labelled ``(q, D_1, ..., D_K)`` and entries ``g_{row - col}``.  Every
``T_pq`` of one interval pair shares the same trailing ``K x K`` block ``M``,
so a single factorisation of ``M`` serves the whole block of determinants::

    det T_pq = det(M) * (g_{p-q} - u_p^T M^{-1} v_q)

with ``u_p[k] = g_{p - D_k}`` and ``v_q[k] = g_{D_k - q}``.  When ``M`` is
singular (common at ``h = 0``, where odd-sized cores are exactly singular)
the adjugate form ``a det M - u^T adj(M) v`` is used instead.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg as la

from .errors import SingularCore, TableRangeError
from .model import FourierTable

__all__ = [
    "ToeplitzLike",
    "SeparatorCore",
    "build_toeplitz_like",
    "bordered_matrix",
    "det_direct",
    "factor_core",
    "batch_det_schur",
    "block_det_schur",
    "block_det_adjugate",
    "CORE_PIVOT_RTOL",
]

CORE_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class ToeplitzLike:
    row_sites: tuple
    col_sites: tuple
    entries: np.ndarray = field(repr=False)

    @property
    def separators(self) -> tuple:
        return self.row_sites[1:]


def _check_sites(p, q, separators):
    seps = tuple(int(d) for d in separators)
    if len(set(seps)) != len(seps):
        raise ValueError(f"duplicate separator sites in {seps}")
    if any(b <= a for a, b in zip(seps, seps[1:])):
        raise ValueError("separators must be in ascending order")
    if p in seps or q in seps:
        raise ValueError(f"sites {p}, {q} must not be separators")
    return seps


def bordered_matrix(p: int, q: int, separators: Sequence[int],
                    entry: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """Matrix with rows ``(p, *separators)``, columns ``(q, *separators)``.

    ``entry(rows, cols)`` is called with broadcastable site arrays and must
    return the kernel values; the Toeplitz case passes ``g_{rows - cols}``.
    """
    seps = _check_sites(int(p), int(q), separators)
    rows = np.array((int(p),) + seps)
    cols = np.array((int(q),) + seps)
    return np.asarray(entry(rows[:, None], cols[None, :]), dtype=float)


def build_toeplitz_like(p: int, q: int, separators: Iterable[int],
                        table: FourierTable) -> ToeplitzLike:
    seps = _check_sites(int(p), int(q), tuple(separators))
    span = max((int(p), int(q)) + seps) - min((int(p), int(q)) + seps)
    if span > table.max_lag:
        raise TableRangeError(f"site span {span} exceeds table range {table.max_lag}")
    entries = bordered_matrix(p, q, seps, lambda r, c: table.lag(r - c))
    return ToeplitzLike(row_sites=(int(p),) + seps, col_sites=(int(q),) + seps,
                        entries=entries)


def det_direct(t) -> float:
    """Determinant of ``T_pq`` (or any square array) via pivoted LU."""
    entries = getattr(t, "entries", t)
    sign, logabs = np.linalg.slogdet(entries)
    if sign == 0:
        return 0.0
    return float(sign * np.exp(logabs))


@dataclass(frozen=True)
class SeparatorCore:
    """LU factorisation of the shared block ``M[i, j] = g_{D_i - D_j}``."""

    sites: tuple
    matrix: np.ndarray = field(repr=False)
    lu: np.ndarray = field(repr=False)
    piv: np.ndarray = field(repr=False)
    log_abs_det: float
    det_sign: int
    singular_flag: bool
    cond_estimate: float

    @property
    def det(self) -> float:
        return 0.0 if self.det_sign == 0 else self.det_sign * float(np.exp(self.log_abs_det))

    def reconstruct(self) -> np.ndarray:
        """``P L U`` rebuilt from the packed factors."""
        k = len(self.sites)
        lower = np.tril(self.lu, -1) + np.eye(k)
        upper = np.triu(self.lu)
        lu_prod = lower @ upper
        order = np.arange(k)
        for i, j in enumerate(self.piv):
            order[i], order[j] = order[j], order[i]
        out = np.empty_like(lu_prod)
        out[order] = lu_prod
        return out


def factor_core(separators: Sequence[int], table: FourierTable) -> SeparatorCore:
    """Factorise the separator block and classify it as singular or not.

    The core counts as singular when some pivot is below
    ``CORE_PIVOT_RTOL`` times the largest column norm of ``M``.
    """
    seps = tuple(int(d) for d in separators)
    k = len(seps)
    if k == 0:
        empty = np.zeros((0, 0))
        return SeparatorCore(seps, empty, empty, np.zeros(0, dtype=np.int32),
                             0.0, 1, False, 1.0)
    if seps[-1] - seps[0] > table.max_lag:
        raise TableRangeError(f"separator span exceeds table range {table.max_lag}")
    d = np.asarray(seps)
    m = table.lag(d[:, None] - d[None, :])
    with warnings.catch_warnings():
        # singular cores are expected (h = 0, odd K) and handled below
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(m, check_finite=False)
    pivots = np.diag(lu)
    colnorm = float(np.linalg.norm(m, axis=0).max())
    singular = bool(np.abs(pivots).min() < CORE_PIVOT_RTOL * max(colnorm, np.finfo(float).tiny))
    swaps = int(np.count_nonzero(piv != np.arange(k)))
    if singular:
        sign, logabs = 0, -np.inf
    else:
        sign = (-1) ** swaps * int(np.prod(np.sign(pivots)))
        logabs = float(np.sum(np.log(np.abs(pivots))))
    # cheap 1-norm condition estimate; informational only
    if singular:
        cond = np.inf
    else:
        inv = la.lu_solve((lu, piv), np.eye(k), check_finite=False)
        cond = float(np.abs(m).sum(axis=0).max() * np.abs(inv).sum(axis=0).max())
    return SeparatorCore(seps, m, lu, piv, logabs, sign, singular, cond)


def _borders(core: SeparatorCore, rows, cols, table: FourierTable):
    d = np.asarray(core.sites, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    u = table.lag(rows[:, None] - d[None, :])      # (P, K)
    v = table.lag(d[:, None] - cols[None, :])      # (K, Q)
    a = table.lag(rows[:, None] - cols[None, :])   # (P, Q)
    return u, v, a


def block_det_schur(core: SeparatorCore, rows, cols, table: FourierTable) -> np.ndarray:
    """``det T_pq`` for every ``p in rows``, ``q in cols`` via one core LU.

    Cost is one ``K x K`` factorisation (done in :func:`factor_core`), a
    solve against the ``Q`` column borders and a ``(P, K) @ (K, Q)`` product.
    """
    if core.singular_flag:
        raise SingularCore(f"separator core of size {len(core.sites)} is singular; "
                           "fall back to det_direct or block_det_adjugate")
    u, v, a = _borders(core, rows, cols, table)
    if len(core.sites) == 0:
        return a.copy()
    x = la.lu_solve((core.lu, core.piv), v, check_finite=False)
    return core.det * (a - u @ x)


def batch_det_schur(core: SeparatorCore, pairs, table: FourierTable) -> np.ndarray:
    """Determinants of ``T_pq`` for a list of ``(p, q)`` pairs sharing ``core``."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if core.singular_flag:
        raise SingularCore(f"separator core of size {len(core.sites)} is singular")
    prow, pidx = np.unique(pairs[:, 0], return_inverse=True)
    qcol, qidx = np.unique(pairs[:, 1], return_inverse=True)
    block = block_det_schur(core, prow, qcol, table)
    return block[pidx, qidx]


def _adjugate(m: np.ndarray):
    """``det(m)`` and ``adj(m)`` from an SVD; valid for singular ``m``."""
    w, s, zt = np.linalg.svd(m)
    sign = np.linalg.det(w) * np.linalg.det(zt)
    sign = 1.0 if sign > 0 else -1.0
    k = s.size
    # products of all singular values but one, via prefix/suffix products
    prefix = np.concatenate(([1.0], np.cumprod(s)[:-1]))
    suffix = np.concatenate((np.cumprod(s[::-1])[:-1][::-1], [1.0]))
    others = prefix * suffix
    det = sign * float(np.prod(s))
    adj = sign * (zt.T * others[None, :]) @ w.T
    return det, adj


def block_det_adjugate(core: SeparatorCore, rows, cols, table: FourierTable) -> np.ndarray:
    """``det T_pq = g_{p-q} det M - u_p^T adj(M) v_q`` for a whole block.

    Works whether or not ``M`` is singular; used as the batched fallback
    when :func:`block_det_schur` refuses a singular core.
    """
    u, v, a = _borders(core, rows, cols, table)
    if len(core.sites) == 0:
        return a.copy()
    det, adj = _adjugate(core.matrix)
    return a * det - u @ (adj @ v)
