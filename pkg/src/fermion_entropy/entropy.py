"""Entropies from mode eigenvalues, and mutual information between parts.

Each eigenvalue ``nu`` of ``A`` is one fermionic mode occupied with
probability ``(1 - nu)/2``; entropies are sums of per-mode binary terms.
All values are in nats.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .correlation import SubsystemSpec, build_corr_matrix, parse_spec
from .errors import BadAlpha, DomainError, OverlappingParts, TooLarge
from .model import ModelParams
from .spectral import Spectrum

__all__ = [
    "EntropyReport",
    "MutualInformationReport",
    "binary_term",
    "mode_entropy",
    "mode_renyi",
    "von_neumann",
    "renyi",
    "entanglement_entropy",
    "mutual_information",
    "reduced_density_matrix",
    "check_alpha",
]

RDM_MAX_SITES = 12


def mode_entropy(x, nu):
    """``-(x+nu)/2 ln((x+nu)/2) - (x-nu)/2 ln((x-nu)/2)``.

    Accepts complex ``nu`` (principal logarithm), which is what the contour
    integrand needs.  For real arguments ``0 ln 0`` is taken as 0.
    """
    if np.iscomplexobj(nu) or np.iscomplexobj(x):
        a = (x + nu) / 2.0
        b = (x - nu) / 2.0
        return -a * np.log(a) - b * np.log(b)
    a = (np.asarray(x, dtype=float) + nu) / 2.0
    b = (np.asarray(x, dtype=float) - nu) / 2.0
    return -xlogy(a, a) - xlogy(b, b)


def mode_renyi(x, nu, alpha: float):
    """``ln[((x+nu)/2)^alpha + ((x-nu)/2)^alpha] / (1 - alpha)``."""
    if np.iscomplexobj(nu) or np.iscomplexobj(x):
        a = (x + nu) / 2.0
        b = (x - nu) / 2.0
        return np.log(a ** alpha + b ** alpha) / (1.0 - alpha)
    a = (np.asarray(x, dtype=float) + nu) / 2.0
    b = (np.asarray(x, dtype=float) - nu) / 2.0
    return np.log(np.power(a, alpha) + np.power(b, alpha)) / (1.0 - alpha)


def _check_nu(nu):
    nu = np.asarray(nu, dtype=float)
    if nu.size and np.abs(nu).max() > 1.0:
        raise DomainError(f"mode eigenvalue {nu.flat[np.argmax(np.abs(nu))]!r} outside [-1, 1]")
    return nu


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0 or abs(alpha - 1.0) < 1e-12:
        raise BadAlpha(f"Renyi index must be > 0 and != 1, got {alpha!r}")
    return alpha


def binary_term(nu):
    """Entropy of one mode with eigenvalue ``nu`` (scalar or array)."""
    nu = _check_nu(nu)
    out = mode_entropy(1.0, nu)
    return float(out) if out.ndim == 0 else out


def _values(spectrum):
    return np.asarray(getattr(spectrum, "values", spectrum), dtype=float)


def von_neumann(spectrum) -> float:
    nu = _check_nu(_values(spectrum))
    return float(np.sum(mode_entropy(1.0, nu)))


def renyi(spectrum, alpha: float) -> float:
    alpha = check_alpha(alpha)
    nu = _check_nu(_values(spectrum))
    return float(np.sum(mode_renyi(1.0, nu, alpha)))


@dataclass(frozen=True)
class EntropyReport:
    spec: SubsystemSpec
    params: ModelParams
    s_von_neumann: float
    renyi: dict = field(default_factory=dict)
    spectrum: Spectrum = field(default=None, repr=False)


@dataclass(frozen=True)
class MutualInformationReport:
    part1: SubsystemSpec
    part2: SubsystemSpec
    I: float
    s1: float
    s2: float
    s_union: float


def entanglement_entropy(spec, params: ModelParams, alphas=(), method: str = "schur") -> EntropyReport:
    """Full pipeline: build ``A``, diagonalise, sum mode entropies."""
    if not isinstance(spec, SubsystemSpec):
        spec = parse_spec(spec)
    corr = build_corr_matrix(spec, params, method=method)
    spectrum = Spectrum.of(corr)
    s = von_neumann(spectrum)
    ren = {float(a): renyi(spectrum, a) for a in alphas}
    return EntropyReport(spec=spec, params=params, s_von_neumann=s, renyi=ren,
                         spectrum=spectrum)


def mutual_information(part1, part2, params: ModelParams, workers: int = 1) -> MutualInformationReport:
    """``I = S(part1) + S(part2) - S(part1 u part2)``.

    The three entropies come from independent pipeline runs: the union's
    correlation matrix is *not* a block extension of the parts' matrices,
    because its separator sets differ.
    """
    if not isinstance(part1, SubsystemSpec):
        part1 = parse_spec(part1)
    if not isinstance(part2, SubsystemSpec):
        part2 = parse_spec(part2)
    common = set(part1.sites) & set(part2.sites)
    if common:
        raise OverlappingParts(f"parts share sites {sorted(common)}")
    union = part1.union(part2)
    specs = (part1, part2, union)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 3)) as pool:
            s1, s2, su = pool.map(lambda sp: entanglement_entropy(sp, params).s_von_neumann, specs)
    else:
        s1, s2, su = (entanglement_entropy(sp, params).s_von_neumann for sp in specs)
    return MutualInformationReport(part1=part1, part2=part2, I=s1 + s2 - su,
                                   s1=s1, s2=s2, s_union=su)


def reduced_density_matrix(spec, params: ModelParams) -> np.ndarray:
    """Product-form ``rho_A`` in the mode-occupation basis (``N <= 12``).

    Diagonal ``2^N x 2^N`` matrix whose entries are all products of
    ``(1 + nu_i)/2`` and ``(1 - nu_i)/2``; mode 1 is the most significant bit.
    """
    if not isinstance(spec, SubsystemSpec):
        spec = parse_spec(spec)
    if len(spec) > RDM_MAX_SITES:
        raise TooLarge(f"explicit rho_A limited to {RDM_MAX_SITES} sites, got {len(spec)}")
    nu = Spectrum.of(build_corr_matrix(spec, params)).values
    weights = np.array([1.0])
    for v in nu:
        weights = np.kron(weights, [(1.0 + v) / 2.0, (1.0 - v) / 2.0])
    return np.diag(weights)

