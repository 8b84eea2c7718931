import math

import numpy as np
import pytest

from fermion_entropy.model import ModelParams


def quadrature_coefficient(params: ModelParams, l: int, panels: int = 2_000_000) -> float:
    """g_l by composite trapezoid on each smooth piece of the symbol.

    The symbol jumps at +-k_F, so the interval is split there; the pieces
    are integrated separately with ``panels`` trapezoid panels each.
    """
    k = params.k_f
    total = 0.0
    for lo, hi, value in ((-k, k, 1.0), (k, 2 * math.pi - k, -1.0)):
        th = np.linspace(lo, hi, panels + 1)
        f = np.cos(l * th)  # imaginary part integrates to zero for an even symbol
        total += value * np.trapezoid(f, th)
    return total / (2 * math.pi)


@pytest.fixture
def h0():
    return ModelParams(0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
