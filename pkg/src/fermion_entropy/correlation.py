"""Subsystem specifications and the real symmetric correlation matrix ``A``.

For sites ``m, n`` of the subsystem, ``A[m, n] = -det T_mn`` where the
separators of ``T_mn`` are the complement sites strictly between ``m`` and
``n``.  Subsystem sites lying between ``m`` and ``n`` are *not* separators,
so the entry depends on the whole subsystem and not only on ``m`` and ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DuplicateSite, NonPositiveSite, SpanTooLarge
from .model import FourierTable, ModelParams, fourier_table
from .toeplitz import (
    block_det_adjugate,
    block_det_schur,
    build_toeplitz_like,
    det_direct,
    factor_core,
)

__all__ = [
    "SubsystemSpec",
    "CorrMatrix",
    "parse_spec",
    "correlation_entry",
    "build_corr_matrix",
    "DEFAULT_SPAN_CAP",
]

DEFAULT_SPAN_CAP = 10**6


def _runs(values):
    """Maximal runs of consecutive integers as ``(start, length)``."""
    runs = []
    for v in values:
        if runs and v == runs[-1][0] + runs[-1][1]:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return [tuple(r) for r in runs]


@dataclass(frozen=True)
class SubsystemSpec:
    """Strictly increasing 1-based sites with their interval/gap layout."""

    sites: tuple
    intervals: tuple = field(init=False)
    gaps: tuple = field(init=False)

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        intervals = tuple(_runs(sites))
        gaps = tuple((s + n, nxt - (s + n))
                     for (s, n), (nxt, _) in zip(intervals, intervals[1:]))
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "gaps", gaps)

    def __len__(self):
        return len(self.sites)

    @property
    def span(self) -> int:
        return self.sites[-1] - self.sites[0]

    def complement_between(self, m: int, n: int) -> tuple:
        """Complement sites strictly between ``m`` and ``n``, ascending."""
        lo, hi = min(m, n), max(m, n)
        inside = set(self.sites)
        return tuple(d for d in range(lo + 1, hi) if d not in inside)

    def interval_sites(self):
        return [tuple(range(s, s + n)) for s, n in self.intervals]

    def shifted(self, offset: int) -> "SubsystemSpec":
        return parse_spec([s + offset for s in self.sites])

    def union(self, other: "SubsystemSpec") -> "SubsystemSpec":
        return parse_spec(sorted(set(self.sites) | set(other.sites)))


def parse_spec(site_list: Iterable[int]) -> SubsystemSpec:
    """Validate raw site indices and build a :class:`SubsystemSpec`.

    Order of the input does not matter; duplicates and indices below 1 are
    rejected.
    """
    raw = [int(s) for s in site_list]
    if not raw:
        raise ValueError("a subsystem needs at least one site")
    bad = [s for s in raw if s < 1]
    if bad:
        raise NonPositiveSite(f"site indices are 1-based, got {bad[0]}")
    seen = set()
    for s in raw:
        if s in seen:
            raise DuplicateSite(f"site {s} listed twice")
        seen.add(s)
    return SubsystemSpec(tuple(sorted(raw)))


@dataclass(frozen=True)
class CorrMatrix:
    spec: SubsystemSpec
    params: ModelParams
    entries: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def correlation_entry(m: int, n: int, spec: SubsystemSpec, table: FourierTable) -> float:
    """``A[m, n] = -det T_mn``, computed directly from the full bordered matrix."""
    if m not in spec.sites or n not in spec.sites:
        raise ValueError(f"sites {m}, {n} must both belong to the subsystem")
    seps = spec.complement_between(m, n)
    if not seps:
        return -float(table.lag(m - n))
    return -det_direct(build_toeplitz_like(m, n, seps, table))


def build_corr_matrix(spec: SubsystemSpec, params: ModelParams, method: str = "schur",
                      span_cap: int = DEFAULT_SPAN_CAP, table: FourierTable = None) -> CorrMatrix:
    """Assemble ``A`` for ``spec``.

    Parameters
    ----------
    method : {"schur", "direct"}
        ``"schur"`` fills each off-diagonal interval-pair block from one
        shared separator factorisation (adjugate form if that core is
        singular).  ``"direct"`` runs one dense LU per entry and is kept as
        the reference path.
    span_cap : int
        Largest allowed ``max(sites) - min(sites)``.
    """
    if spec.span > span_cap:
        raise SpanTooLarge(f"site span {spec.span} exceeds cap {span_cap}")
    if table is None or table.params != params or table.max_lag < spec.span:
        table = fourier_table(params, spec.span)
    sites = np.asarray(spec.sites)
    n = sites.size
    a = np.zeros((n, n))
    offsets = np.cumsum([0] + [length for _, length in spec.intervals])
    blocks = spec.interval_sites()
    for i, rows in enumerate(blocks):
        r0 = offsets[i]
        r = np.asarray(rows)
        a[r0:r0 + r.size, r0:r0 + r.size] = 0.0 - table.lag(r[:, None] - r[None, :])
        for j in range(i + 1, len(blocks)):
            c = np.asarray(blocks[j])
            c0 = offsets[j]
            if method == "direct":
                sub = np.empty((r.size, c.size))
                for x, p in enumerate(r):
                    for y, q in enumerate(c):
                        sub[x, y] = correlation_entry(int(p), int(q), spec, table)
            elif method == "schur":
                seps = spec.complement_between(int(r[-1]), int(c[0]))
                core = factor_core(seps, table)
                if core.singular_flag:
                    sub = -block_det_adjugate(core, r, c, table)
                else:
                    sub = -block_det_schur(core, r, c, table)
            else:
                raise ValueError(f"unknown fill method {method!r}")
            a[r0:r0 + r.size, c0:c0 + c.size] = sub
            a[c0:c0 + c.size, r0:r0 + r.size] = sub.T
    a.setflags(write=False)
    return CorrMatrix(spec=spec, params=params, entries=a)
