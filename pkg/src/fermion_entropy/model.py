"""XX-chain parameters, the step symbol and its Fourier coefficients.

The ground-state correlators of the XX chain are the Fourier coefficients
of a symbol that equals +1 on the Fermi sea ``|theta| < k_F`` and -1
elsewhere.  Everything downstream is built from these coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, TableRangeError

__all__ = [
    "ModelParams",
    "FourierTable",
    "symbol",
    "fourier_coefficient",
    "fourier_table",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """Transverse field ``h`` of the XX chain, restricted to ``|h| < 2``."""

    h: float = 0.0
    k_f: float = field(init=False, repr=False)

    def __post_init__(self):
        h = float(self.h)
        if not math.isfinite(h) or abs(h) >= 2.0:
            raise ModelError(f"|h| must be < 2 (critical phase), got h={self.h!r}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k_f", math.acos(abs(h) / 2.0))


def symbol(params: ModelParams, theta: float) -> float:
    """Value of the step symbol g(theta): +1 inside the Fermi sea, -1 outside.

    The boundary points ``theta = +-k_F`` are assigned +1.
    """
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    k = params.k_f
    if t <= k or t >= TWO_PI - k:
        return 1.0
    return -1.0


def fourier_coefficient(params: ModelParams, l: int) -> float:
    """Closed-form ``g_l = (1/2pi) int_0^{2pi} exp(-i l theta) g(theta) dtheta``.

    ``g_0 = (2 k_F - pi)/pi`` and ``g_l = 2 sin(l k_F) / (pi l)`` otherwise.
    At ``h = 0`` the even coefficients vanish identically.
    """
    l = int(l)
    if l == 0:
        return (2.0 * params.k_f - math.pi) / math.pi
    if params.h == 0.0:
        # exact zeros for even lags; sin(l pi/2) would leave ~1e-17 residue
        if l % 2 == 0:
            return 0.0
        return (2.0 if l % 4 == 1 else -2.0) / (math.pi * l)
    return 2.0 * math.sin(l * params.k_f) / (math.pi * l)


def _coefficients(params: ModelParams, lags: np.ndarray) -> np.ndarray:
    lags = np.asarray(lags, dtype=np.int64)
    out = np.empty(lags.shape, dtype=float)
    zero = lags == 0
    nz = ~zero
    out[zero] = (2.0 * params.k_f - math.pi) / math.pi
    l = lags[nz].astype(float)
    if params.h == 0.0:
        odd = (lags[nz] % 2) != 0
        # sin(l pi / 2) for odd l is +-1: +1 when l = 1 mod 4
        sign = np.where((lags[nz] % 4) == 1, 1.0, -1.0)
        out[nz] = np.where(odd, 2.0 * sign / (math.pi * l), 0.0)
    else:
        out[nz] = 2.0 * np.sin(l * params.k_f) / (math.pi * l)
    return out


@dataclass(frozen=True)
class FourierTable:
    """Cached ``g_l`` for ``-max_lag <= l <= max_lag``.

    ``values[max_lag + l]`` holds ``g_l``.  Use :meth:`lag` for vectorised
    lookups by (possibly negative) lag arrays.
    """

    params: ModelParams
    max_lag: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, l: int) -> float:
        return float(self.lag(l))

    def lag(self, lags):
        """Look up ``g`` at integer lags (scalar or array)."""
        idx = np.asarray(lags, dtype=np.int64)
        if idx.size and int(np.max(np.abs(idx))) > self.max_lag:
            raise TableRangeError(
                f"lag {int(np.max(np.abs(idx)))} exceeds table range {self.max_lag}"
            )
        return self.values[idx + self.max_lag]

    def as_dict(self) -> dict[int, float]:
        return {l: float(self.values[l + self.max_lag])
                for l in range(-self.max_lag, self.max_lag + 1)}


def fourier_table(params: ModelParams, max_lag: int) -> FourierTable:
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    lags = np.arange(-max_lag, max_lag + 1)
    values = _coefficients(params, lags)
    values.setflags(write=False)
    return FourierTable(params=params, max_lag=max_lag, values=values)
