import math

import numpy as np
import pytest

from fermion_entropy.contour import (
    ContourSpec,
    contour_nodes,
    entropy_by_contour,
    log_det_D,
    log_det_D_path,
    renyi_by_contour,
    residue_sum,
)
from fermion_entropy.correlation import build_corr_matrix, parse_spec
from fermion_entropy.entropy import renyi, von_neumann
from fermion_entropy.errors import ContourError, NearSingularShift
from fermion_entropy.model import ModelParams
from fermion_entropy.spectral import Spectrum

NU13 = 4 / math.pi**2


def _random_corr(rng, max_sites=12):
    k = int(rng.integers(1, max_sites + 1))
    sites = rng.choice(np.arange(1, 40), size=k, replace=False)
    return build_corr_matrix(parse_spec(sites), ModelParams(float(rng.uniform(0, 1.5))))


def test_log_det_examples():
    assert log_det_D(np.zeros((2, 2)), 2.0) == pytest.approx(2 * math.log(2), abs=1e-15)
    a = np.diag([-NU13, NU13])
    assert log_det_D(a, 3.0).real == pytest.approx(2.1788053448861567635, abs=1e-14)
    a13 = build_corr_matrix(parse_spec([1, 3]), ModelParams(0.0))
    assert log_det_D(a13, 3.0).real == pytest.approx(2.1788053448861567635, abs=1e-14)
    assert abs(log_det_D(a13, 3.0).imag) < 1e-15


def test_log_det_singular_shift():
    with pytest.raises(NearSingularShift):
        log_det_D(np.diag([0.5, -0.5]), 0.5)


def test_log_det_path_is_continuous():
    a = np.diag([-0.9, -0.2, 0.4, 0.95])
    lam, _ = contour_nodes(ContourSpec(epsilon=1e-2, panels=64, order=8))
    vals = log_det_D_path(a, lam)
    # winding once around four zeros
    assert np.max(np.abs(np.diff(vals.imag))) < 1.0
    assert (vals.imag[-1] - vals.imag[0]) == pytest.approx(2 * math.pi * 4, abs=0.5)


@pytest.mark.parametrize("shape", ["rectangle", "ellipse"])
def test_nodes_enclose_unit_interval(shape):
    spec = ContourSpec(epsilon=1e-3, shape=shape)
    lam, w = contour_nodes(spec)
    # closed curve: weights sum to zero, winding number one around 0 and +-1
    assert abs(np.sum(w)) < 1e-12
    for z in (0.0, 1.0, -1.0):
        assert np.sum(w / (lam - z)) / (2j * math.pi) == pytest.approx(1.0, abs=1e-10)
    assert np.sum(w / (lam - (1 + 2e-3))) / (2j * math.pi) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("shape", ["rectangle", "ellipse"])
@pytest.mark.parametrize("eps", [1e-3, 1e-4])
def test_contour_matches_residue_sum(rng, shape, eps):
    for _ in range(5):
        a = _random_corr(rng)
        spec = Spectrum.of(a)
        contour = ContourSpec(epsilon=eps, shape=shape)
        assert entropy_by_contour(a, contour) == pytest.approx(residue_sum(spec, eps), abs=1e-7)
        for alpha in (0.5, 2.0, 3.0):
            got = renyi_by_contour(a, contour, alpha)
            assert got == pytest.approx(residue_sum(spec, eps, alpha), abs=1e-7)


def test_spectrum_at_the_edges():
    # eigenvalues exactly +-1 sit eps/2 inside the crossing points
    a = np.diag([-1.0, 0.0, 1.0])
    for eps in (1e-3, 1e-4):
        c = ContourSpec(epsilon=eps)
        assert entropy_by_contour(a, c) == pytest.approx(residue_sum(a.diagonal(), eps), abs=1e-9)


def test_shapes_agree(rng):
    a = _random_corr(rng)
    r = entropy_by_contour(a, ContourSpec(shape="rectangle"))
    e = entropy_by_contour(a, ContourSpec(shape="ellipse"))
    assert r == pytest.approx(e, abs=1e-7)


def test_lu_and_spectral_traces_agree(rng):
    a = _random_corr(rng)
    spec = Spectrum.of(a)
    c = ContourSpec(epsilon=1e-3)
    assert entropy_by_contour(a, c) == pytest.approx(entropy_by_contour(a, c, spectrum=spec), abs=1e-10)


def test_eps_shift_for_two_sites():
    a = build_corr_matrix(parse_spec([1, 3]), ModelParams(0.0))
    s = von_neumann(Spectrum.of(a))
    got = entropy_by_contour(a, ContourSpec(epsilon=1e-4))
    # the regulator moves the value by 2 (e(1+eps, nu) - e(1, nu)) ~ -4.34e-5
    assert got - s == pytest.approx(-4.343926939881e-5, rel=1e-6)
    assert entropy_by_contour(a, ContourSpec(epsilon=1e-6)) == pytest.approx(s, abs=1e-6)


def test_converges_to_spectral_entropy_as_eps_shrinks():
    a = build_corr_matrix(parse_spec([1, 2, 5, 6, 7]), ModelParams(0.4))
    spec = Spectrum.of(a)
    exact = von_neumann(spec)
    errors = [abs(entropy_by_contour(a, ContourSpec(epsilon=e)) - exact) for e in (1e-2, 1e-3, 1e-4)]
    assert errors[0] > errors[1] > errors[2]
    exact2 = renyi(spec, 2.0)
    assert renyi_by_contour(a, ContourSpec(epsilon=1e-6), 2.0) == pytest.approx(exact2, abs=1e-5)


def test_richardson_in_eps():
    # the shift is linear in eps to leading order, so extrapolation removes most of it
    a = np.diag([-0.7, 0.1, 0.6])
    exact = von_neumann(a.diagonal())
    s1 = entropy_by_contour(a, ContourSpec(epsilon=2e-3))
    s2 = entropy_by_contour(a, ContourSpec(epsilon=1e-3))
    assert abs(2 * s2 - s1 - exact) < 0.05 * abs(s2 - exact)


@pytest.mark.parametrize("kwargs", [
    {"epsilon": 0.0},
    {"epsilon": -1e-3},
    {"shape": "circle"},
    {"panels": 16},
    {"order": 1},
    {"half_height": 1e-6},
])
def test_contour_validation(kwargs):
    with pytest.raises(ContourError):
        ContourSpec(**kwargs)


def test_height_capped_for_large_alpha():
    c = ContourSpec(half_height=5.0)
    assert c.for_alpha(0.5) is c
    capped = c.for_alpha(3.0)
    assert capped.half_height < (1 + c.epsilon) * math.tan(math.pi / 6)
