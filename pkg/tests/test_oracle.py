import itertools
import math

import numpy as np
import pytest

from fermion_entropy.errors import DegenerateFermiLevel, DegenerateGroundState, TooLarge
from fermion_entropy.oracle import (
    FiniteChain,
    ed_ground_state,
    ed_mode_correlator,
    ed_reduced_density_matrix,
    ed_reduced_entropy,
    ff_finite_entropy,
    finite_corr_matrix,
    finite_correlator,
    spin_hamiltonian,
)


@pytest.fixture(scope="module")
def chain8():
    chain = FiniteChain(8, 0.0)
    return chain, ed_ground_state(chain), finite_correlator(chain)


def test_two_site_singlet_like_state():
    psi = ed_ground_state(FiniteChain(2, 0.0))
    # basis |uu>, |ud>, |du>, |dd>
    expected = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
    assert abs(abs(np.vdot(expected, psi)) - 1.0) < 1e-12


def test_strong_field_polarises():
    psi = ed_ground_state(FiniteChain(4, 5.0))
    assert abs(psi[0]) == pytest.approx(1.0, abs=1e-12)
    assert ed_reduced_entropy(psi, [1, 2]) == pytest.approx(0.0, abs=1e-12)


def test_hamiltonian_symmetric_and_normalised_state():
    h = spin_hamiltonian(FiniteChain(5, 0.3))
    assert np.allclose(h, h.T)
    assert np.linalg.norm(ed_ground_state(FiniteChain(5, 0.3))) == pytest.approx(1.0)


def test_full_system_and_complement(chain8):
    _, psi, _ = chain8
    assert ed_reduced_entropy(psi, range(1, 9)) == pytest.approx(0.0, abs=1e-10)
    for sites in ([1, 2, 3], [2, 5], [1, 4, 6, 8]):
        rest = [s for s in range(1, 9) if s not in sites]
        assert ed_reduced_entropy(psi, sites) == pytest.approx(ed_reduced_entropy(psi, rest), abs=1e-10)


def test_rdm_entropy_matches_schmidt(chain8):
    _, psi, _ = chain8
    rho = ed_reduced_density_matrix(psi, [2, 5, 6])
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    assert np.trace(rho) == pytest.approx(1.0)
    assert -np.sum(w * np.log(w)) == pytest.approx(ed_reduced_entropy(psi, [2, 5, 6]), abs=1e-12)


def test_correlator_spectrum(chain8):
    _, _, g = chain8
    w = np.linalg.eigvalsh(g)
    assert np.all(np.abs(w) <= 1 + 1e-12)
    # pure Gaussian state: G^2 = I
    np.testing.assert_allclose(g @ g, np.eye(8), atol=1e-12)


@pytest.mark.parametrize("h", [0.0, 0.3])
def test_contiguous_blocks_match_ed(h):
    chain = FiniteChain(8, h)
    psi, g = ed_ground_state(chain), finite_correlator(chain)
    for start in range(1, 9):
        for stop in range(start, min(start + 4, 9)):
            sites = list(range(start, stop + 1))
            assert ff_finite_entropy(chain, sites, g) == pytest.approx(
                ed_reduced_entropy(psi, sites), abs=1e-8)


@pytest.mark.parametrize("h", [0.0, 0.3])
def test_two_point_identity_for_every_small_subset(h):
    chain = FiniteChain(8, h)
    psi, g = ed_ground_state(chain), finite_correlator(chain)
    for k in (2, 3):
        for sites in itertools.combinations(range(1, 9), k):
            np.testing.assert_allclose(finite_corr_matrix(chain, sites, g),
                                       ed_mode_correlator(psi, sites), atol=1e-12)


def test_disjoint_pair_is_not_gaussian(chain8):
    # the determinant construction reproduces every two-point function of
    # the restricted-string modes, yet rho_A is not Gaussian in them once A
    # has a hole, so the product-form entropy is off by far more than 1e-8
    chain, psi, g = chain8
    ed = ed_reduced_entropy(psi, [1, 3])
    ff = ff_finite_entropy(chain, [1, 3], g)
    assert ed == pytest.approx(1.17092, abs=1e-5)
    assert ff - ed > 1e-3


def test_odd_chain_zero_mode():
    chain = FiniteChain(5, 0.0)
    with pytest.raises(DegenerateFermiLevel):
        finite_correlator(chain)
    with pytest.raises(DegenerateGroundState):
        ed_ground_state(chain)


def test_guards():
    with pytest.raises(ValueError):
        FiniteChain(1)
    with pytest.raises(TooLarge):
        spin_hamiltonian(FiniteChain(13))
    with pytest.raises(ValueError):
        finite_corr_matrix(FiniteChain(4, 0.0), [2, 6])
