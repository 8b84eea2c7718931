"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line (run with ``-s`` to see them)
and then asserts.  Criterion 2 is expected to fail: see README.
"""
import itertools
import math
import time

import numpy as np
import pytest

from conftest import quadrature_coefficient
from fermion_entropy.cli import oracle_subsets, scan_row
from fermion_entropy.contour import ContourSpec, entropy_by_contour, renyi_by_contour, residue_sum
from fermion_entropy.correlation import build_corr_matrix, parse_spec
from fermion_entropy.entropy import mutual_information
from fermion_entropy.model import ModelParams, fourier_coefficient, fourier_table
from fermion_entropy.oracle import (
    FiniteChain,
    ed_ground_state,
    ed_reduced_entropy,
    ff_finite_entropy,
    finite_correlator,
)
from fermion_entropy.spectral import Spectrum
from fermion_entropy.toeplitz import build_toeplitz_like, det_direct

SEED = 20240601


def report(number, name, ok, detail):
    print(f"\ncriterion {number} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_criterion_1_worked_example():
    start = time.perf_counter()
    p = ModelParams(0.0)
    a = build_corr_matrix(parse_spec([1, 3]), p).entries
    g = fourier_table(p, 2)
    expected = np.array([[-g[0], g[1] ** 2 - g[2] * g[0]],
                         [g[1] ** 2 - g[2] * g[0], -g[0]]])
    err = max(float(np.abs(a - expected).max()), abs(a[0, 1] - 4 / math.pi**2), abs(a[0, 0]))
    elapsed = time.perf_counter() - start
    ok = report(1, "worked example {1,3}", err <= 1e-12 and elapsed < 1.0,
                f"max error {err:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    chain = FiniteChain(8, 0.0)
    psi, g = ed_ground_state(chain), finite_correlator(chain)
    subsets = oracle_subsets(8, 3, 200, 4, SEED)
    worst, worst_sites, bad = 0.0, None, 0
    for s in subsets:
        r = abs(ff_finite_entropy(chain, s, g) - ed_reduced_entropy(psi, s))
        bad += r > 1e-8
        if r > worst:
            worst, worst_sites = r, s
    elapsed = time.perf_counter() - start
    ok = report(2, "finite-chain oracle L=8", bad == 0 and elapsed < 120,
                f"{len(subsets)} subsets, {bad} over 1e-8, worst {worst:.3e} at {worst_sites}, "
                f"{elapsed:.1f} s")
    assert ok


def test_criterion_3_contour_vs_spectrum():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst, count = 0.0, 0
    for _ in range(20):
        n = int(rng.integers(1, 13))
        sites = rng.choice(np.arange(1, 31), size=n, replace=False)
        corr = build_corr_matrix(parse_spec(sites), ModelParams(float(rng.uniform(0, 1.9))))
        spectrum = Spectrum.of(corr)
        for eps in (1e-3, 1e-4):
            contour = ContourSpec(epsilon=eps)
            worst = max(worst, abs(entropy_by_contour(corr, contour) - residue_sum(spectrum, eps)))
            count += 1
            for alpha in (0.5, 2.0, 3.0):
                got = renyi_by_contour(corr, contour, alpha)
                worst = max(worst, abs(got - residue_sum(spectrum, eps, alpha)))
                count += 1
    elapsed = time.perf_counter() - start
    ok = report(3, "contour vs residue sum", worst <= 1e-7 and elapsed < 60,
                f"{count} integrals, worst {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_4_mutual_information_scan():
    start = time.perf_counter()
    rows = [scan_row(m) for m in (21, 40, 41, 63, 80, 81, 160, 161)]
    ms = np.array([r[0] for r in rows])
    inv = np.array([r[1] for r in rows])
    mi = np.array([r[5] for r in rows])
    positive = bool(np.all(mi > 0))
    equal = max(abs(r[2] - r[3]) for r in rows) <= 1e-9
    monotone = all(np.all(np.diff(mi[ms % 2 == parity]) < 0) for parity in (0, 1))
    slope, intercept = np.polyfit(inv, mi, 1)
    elapsed = time.perf_counter() - start
    ok = report(4, "two-interval scan", positive and equal and monotone and abs(intercept) <= 0.02,
                f"I>0 {positive}, S_A1=S_A2 {equal}, decreasing {monotone}, "
                f"intercept {intercept:.4f}, slope {slope:.3f}, {elapsed:.1f} s")
    assert ok


def test_criterion_5_structured_speedup():
    m = 160
    spec = parse_spec(list(range(1, m + 1)) + list(range(2 * m + 1, 3 * m + 1)))
    p = ModelParams(0.0)
    table = fourier_table(p, spec.span)
    t0 = time.perf_counter()
    fast = build_corr_matrix(spec, p, method="schur", table=table)
    t1 = time.perf_counter()
    slow = build_corr_matrix(spec, p, method="direct", table=table)
    t2 = time.perf_counter()
    err = float(np.abs(fast.entries - slow.entries).max())
    ratio = (t2 - t1) / (t1 - t0)
    ok = report(5, "Schur vs direct build m=160", ratio >= 20 and err <= 1e-9,
                f"speedup {ratio:.0f}x ({t1 - t0:.3f} s vs {t2 - t1:.1f} s), max diff {err:.2e}")
    assert ok


def test_criterion_6_invariants():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    checks = {}
    # spectrum bound and translation invariance
    spec_err, shift_err = 0.0, 0.0
    for _ in range(20):
        n = int(rng.integers(1, 15))
        sites = rng.choice(np.arange(1, 50), size=n, replace=False)
        p = ModelParams(float(rng.uniform(0, 1.9)))
        spec = parse_spec(sites)
        a = build_corr_matrix(spec, p).entries
        raw = np.linalg.eigvalsh(a)
        spec_err = max(spec_err, float(np.abs(raw).max()) - 1.0)
        b = build_corr_matrix(spec.shifted(int(rng.integers(1, 100))), p).entries
        shift_err = max(shift_err, float(np.abs(a - b).max()))
    checks["spectrum bound"] = spec_err <= 1e-9
    checks["translation"] = shift_err <= 1e-12
    # det T_mn = det T_nm
    table = fourier_table(ModelParams(0.7), 40)
    sym_err = 0.0
    for _ in range(20):
        p_, q_ = sorted(int(x) for x in rng.choice(np.arange(1, 40), size=2, replace=False))
        seps = [d for d in range(p_ + 1, q_) if rng.random() < 0.6]
        d1 = det_direct(build_toeplitz_like(p_, q_, seps, table))
        d2 = det_direct(build_toeplitz_like(q_, p_, seps, table))
        sym_err = max(sym_err, abs(d1 - d2))
    checks["det symmetry"] = sym_err <= 1e-12
    # closed-form Fourier coefficients against quadrature
    fourier_err = 0.0
    for h in (0.0, 0.5, 1.3):
        params = ModelParams(h)
        for l in (0, 1, 2, 3, 7, 10):
            fourier_err = max(fourier_err,
                              abs(fourier_coefficient(params, l) - quadrature_coefficient(params, l)))
    checks["fourier"] = fourier_err <= 1e-10
    # mutual-information nonnegativity
    low = math.inf
    for _ in range(50):
        k = int(rng.integers(2, 13))
        sites = rng.choice(np.arange(1, 40), size=k, replace=False)
        cut = int(rng.integers(1, k))
        p = ModelParams(float(rng.uniform(0, 1.9)))
        low = min(low, mutual_information(sites[:cut], sites[cut:], p).I)
    checks["MI nonnegative"] = low >= -1e-9
    elapsed = time.perf_counter() - start
    checks["runtime"] = elapsed < 120
    failed = [k for k, v in checks.items() if not v]
    ok = report(6, "invariant suite", not failed,
                f"|nu|-1 {spec_err:.1e}, shift {shift_err:.1e}, det sym {sym_err:.1e}, "
                f"fourier {fourier_err:.1e}, min I {low:.4f}, {elapsed:.1f} s"
                + (f", failed: {failed}" if failed else ""))
    assert ok
