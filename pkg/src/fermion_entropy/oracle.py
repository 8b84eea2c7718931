"""Brute-force reference values on a finite open XX chain.

Two independent routes to subsystem entropies of the ground state of

    H = -sum_{n<L} (sx_n sx_{n+1} + sy_n sy_{n+1}) - h sum_n sz_n

* spin space: dense ``2^L`` diagonalisation, partial trace, eigenvalues;
* fermions: Jordan-Wigner modes of the ``L x L`` hopping matrix, the
  finite correlator ``G``, and the same bordered-determinant construction
  of ``A`` that the thermodynamic-limit pipeline uses with ``g_{m-n}``.

Basis convention: site 1 is the most significant tensor factor and spin up
(``sz = +1``) is index 0.  With ``a_l = (prod_{n<l} sz_n) s^-_l`` the
hopping becomes ``+2 (a_n^+ a_{n+1} + h.c.)`` and the field ``-2h a_n^+ a_n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .correlation import SubsystemSpec, parse_spec
from .entropy import von_neumann
from .errors import DegenerateFermiLevel, DegenerateGroundState, TooLarge
from .spectral import Spectrum
from .toeplitz import bordered_matrix, det_direct

__all__ = [
    "FiniteChain",
    "spin_hamiltonian",
    "ed_ground_state",
    "ed_reduced_density_matrix",
    "ed_reduced_entropy",
    "ed_mode_correlator",
    "finite_correlator",
    "finite_corr_matrix",
    "ff_finite_entropy",
]

ED_MAX_SITES = 12
RDM_MAX_SITES = 10
GAP_TOL = 1e-10
FERMI_TOL = 1e-12

_SX = sp.csr_matrix([[0.0, 1.0], [1.0, 0.0]])
_SY = sp.csr_matrix([[0.0, -1j], [1j, 0.0]])
_SZ = sp.csr_matrix([[1.0, 0.0], [0.0, -1.0]])
_SMINUS = sp.csr_matrix([[0.0, 0.0], [1.0, 0.0]])


@dataclass(frozen=True)
class FiniteChain:
    L: int
    h: float = 0.0

    def __post_init__(self):
        if int(self.L) < 2:
            raise ValueError(f"chain needs L >= 2, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "h", float(self.h))


def _site_op(op, n: int, L: int):
    """``op`` acting on site ``n`` (1-based) of an ``L``-site chain."""
    return reduce(sp.kron, [op if k == n else sp.identity(2, format="csr")
                            for k in range(1, L + 1)]).tocsr()


def spin_hamiltonian(chain: FiniteChain) -> np.ndarray:
    L = chain.L
    if L > ED_MAX_SITES:
        raise TooLarge(f"spin-space ED limited to L <= {ED_MAX_SITES}")
    dim = 2 ** L
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for n in range(1, L):
        h = h - _site_op(_SX, n, L) @ _site_op(_SX, n + 1, L)
        h = h - _site_op(_SY, n, L) @ _site_op(_SY, n + 1, L)
    for n in range(1, L + 1):
        h = h - chain.h * _site_op(_SZ, n, L)
    # the XX Hamiltonian is real in the sz basis
    return np.real(h.toarray())


def ed_ground_state(chain: FiniteChain) -> np.ndarray:
    """Normalised ground state; refuses degenerate ground spaces."""
    w, v = np.linalg.eigh(spin_hamiltonian(chain))
    if w[1] - w[0] < GAP_TOL:
        raise DegenerateGroundState(
            f"L={chain.L}, h={chain.h}: ground-state gap {w[1] - w[0]:.2e} below {GAP_TOL}")
    psi = v[:, 0]
    return psi / np.linalg.norm(psi)


def _as_spec(sites) -> SubsystemSpec:
    return sites if isinstance(sites, SubsystemSpec) else parse_spec(sites)


def ed_reduced_density_matrix(state: np.ndarray, sites) -> np.ndarray:
    """Partial trace of ``|state><state|`` onto ``sites`` (kept in ascending order)."""
    spec = _as_spec(sites)
    L = int(round(np.log2(state.size)))
    if spec.sites[-1] > L:
        raise ValueError(f"sites exceed chain length {L}")
    if len(spec) > RDM_MAX_SITES:
        raise TooLarge(f"partial trace limited to {RDM_MAX_SITES} sites")
    keep = [s - 1 for s in spec.sites]
    rest = [k for k in range(L) if k not in keep]
    psi = np.transpose(state.reshape([2] * L), keep + rest).reshape(2 ** len(keep), -1)
    return psi @ psi.conj().T


def ed_reduced_entropy(state: np.ndarray, sites) -> float:
    """Von Neumann entropy (nats) of the spin reduced density matrix."""
    spec = _as_spec(sites)
    L = int(round(np.log2(state.size)))
    if len(spec) > RDM_MAX_SITES:
        raise TooLarge(f"partial trace limited to {RDM_MAX_SITES} sites")
    keep = [s - 1 for s in spec.sites]
    rest = [k for k in range(L) if k not in keep]
    psi = np.transpose(state.reshape([2] * L), keep + rest).reshape(2 ** len(keep), -1)
    # Schmidt values avoid forming rho for either side
    p = np.linalg.svd(psi, compute_uv=False) ** 2
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def ed_mode_correlator(state: np.ndarray, sites) -> np.ndarray:
    """``2 <a~_m a~_n^+> - delta_mn`` measured directly in spin space.

    ``a~_l`` carries a Jordan-Wigner string over subsystem sites only.  For
    any subsystem this equals ``A`` built from bordered determinants of the
    finite correlator.
    """
    spec = _as_spec(sites)
    L = int(round(np.log2(state.size)))
    ops = []
    for l in spec.sites:
        op = _site_op(_SMINUS, l, L)
        for n in spec.sites:
            if n < l:
                op = _site_op(_SZ, n, L) @ op
        ops.append(op)
    kets = [op.conj().T @ state for op in ops]       # a~_n^+ |psi>
    bras = [op.conj().T @ state for op in ops]       # (<psi| a~_m)^+ = a~_m^+ |psi>
    n = len(ops)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = np.real(np.vdot(bras[i], kets[j]))
    return 2.0 * out - np.eye(n)


def finite_correlator(chain: FiniteChain) -> np.ndarray:
    """``G_mn = 2 <a_m^+ a_n> - delta_mn`` in the fermionic ground state."""
    L = chain.L
    t = np.zeros((L, L))
    idx = np.arange(L - 1)
    t[idx, idx + 1] = t[idx + 1, idx] = 2.0
    t[np.arange(L), np.arange(L)] = -2.0 * chain.h
    e, u = np.linalg.eigh(t)
    if np.any(np.abs(e) < FERMI_TOL):
        raise DegenerateFermiLevel(f"L={chain.L}, h={chain.h}: zero-energy mode")
    occ = u[:, e < 0]
    c = occ @ occ.T
    return 2.0 * c - np.eye(L)


def finite_corr_matrix(chain: FiniteChain, sites, g: np.ndarray = None) -> np.ndarray:
    """``A_mn = -det T^_mn`` with the finite correlator in place of ``g_{m-n}``."""
    spec = _as_spec(sites)
    if spec.sites[-1] > chain.L:
        raise ValueError(f"sites exceed chain length {chain.L}")
    if g is None:
        g = finite_correlator(chain)
    kernel = lambda r, c: g[r - 1, c - 1]  # noqa: E731
    n = len(spec)
    a = np.empty((n, n))
    for i, m in enumerate(spec.sites):
        for j in range(i, n):
            q = spec.sites[j]
            seps = spec.complement_between(m, q)
            a[i, j] = a[j, i] = -det_direct(bordered_matrix(m, q, seps, kernel))
    return a


def ff_finite_entropy(chain: FiniteChain, sites, g: np.ndarray = None) -> float:
    """Subsystem entropy from the product-form mode construction on a finite chain."""
    return von_neumann(Spectrum.of(finite_corr_matrix(chain, sites, g)))
