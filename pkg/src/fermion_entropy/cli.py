"""Command-line driver.

Subcommands::

    entropy        entropies of one subsystem
    mutual         mutual information of two disjoint parts
    scan-fig2      two intervals of length m at distance m, h = 0, over m
    contour-check  contour representation vs residue sums on random subsystems
    oracle-check   finite-chain fermion construction vs spin-space ED

Exit codes: 0 success, 1 failed check, 2 bad input, 3 numerical-domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .contour import ContourSpec, entropy_by_contour, renyi_by_contour, residue_sum
from .correlation import build_corr_matrix, parse_spec
from .entropy import entanglement_entropy, mutual_information
from .errors import (
    DuplicateSite,
    FermionEntropyError,
    ModelError,
    NonPositiveSite,
    OverlappingParts,
)
from .model import ModelParams
from .oracle import (
    FiniteChain,
    ed_ground_state,
    ed_mode_correlator,
    ed_reduced_entropy,
    ff_finite_entropy,
    finite_corr_matrix,
    finite_correlator,
)
from .spectral import Spectrum

__all__ = ["main", "parse_sites", "build_parser", "SCAN_M", "SCAN_HEADER", "scan_row"]

SCAN_M = (21, 40, 41, 63, 80, 81, 160, 161, 189, 320, 321, 567, 640, 641)
SCAN_HEADER = ("m", "inv_m", "s_a1", "s_a2", "s_union", "mutual_info")
THREADS_ENV = "FERMION_ENTROPY_THREADS"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
_INPUT_ERRORS = (DuplicateSite, NonPositiveSite, OverlappingParts, ModelError)


def parse_sites(text: str) -> list:
    """``"1-10,21,30-32"`` -> sorted list of sites (1-based, inclusive ranges)."""
    sites = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            if "-" in tok:
                lo, hi = tok.split("-")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError
                sites.extend(range(lo, hi + 1))
            else:
                sites.append(int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad site token {tok!r}") from None
    try:
        return list(parse_spec(sites).sites)
    except (DuplicateSite, NonPositiveSite, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"{exc} (in {text!r})") from None


def _float_list(text: str) -> list:
    out = []
    for tok in text.split(","):
        try:
            out.append(float(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad number {tok.strip()!r}") from None
    return out


def _int_list(text: str) -> list:
    out = []
    for tok in text.split(","):
        try:
            out.append(int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer {tok.strip()!r}") from None
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class _Output:
    """Collects config/results/residuals and writes CSV or JSON once."""

    def __init__(self, args):
        self.args = args
        self.unit = 1.0 / math.log(2.0) if getattr(args, "bits", False) else 1.0

    def entropy(self, x):
        return float(x) * self.unit

    def config(self):
        cfg = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "output")}
        cfg["units"] = "bits" if self.args.bits else "nats"
        cfg["version"] = __version__
        return cfg

    def write(self, results, residuals, rows=None, header=None):
        if self.args.format == "csv" and rows is not None:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
            text = buf.getvalue()
        else:
            text = json.dumps({"config": self.config(), "results": results,
                               "residuals": residuals}, indent=2) + "\n"
        if self.args.output in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.args.output, "w") as fh:
                fh.write(text)


def cmd_entropy(args) -> int:
    out = _Output(args)
    params = ModelParams(args.h)
    spec = parse_spec(args.sites)
    rep = entanglement_entropy(spec, params, alphas=args.alpha or ())
    corr = build_corr_matrix(spec, params)
    nu = rep.spectrum.values
    results = {
        "sites": list(spec.sites),
        "h": params.h,
        "spectrum": [float(v) for v in nu],
        "s_von_neumann": out.entropy(rep.s_von_neumann),
        "renyi": {repr(a): out.entropy(v) for a, v in rep.renyi.items()},
    }
    residuals = {"trace_minus_eigensum": float(abs(np.trace(corr.entries) - nu.sum()))}
    rows = [("s_von_neumann", "", out.entropy(rep.s_von_neumann))]
    rows += [("renyi", repr(a), out.entropy(v)) for a, v in rep.renyi.items()]
    rows += [("nu", "", float(v)) for v in nu]
    out.write(results, residuals, rows, ("quantity", "alpha", "value"))
    return EXIT_OK


def cmd_mutual(args) -> int:
    out = _Output(args)
    rep = mutual_information(args.part1, args.part2, ModelParams(args.h), workers=_threads())
    results = {"part1": list(rep.part1.sites), "part2": list(rep.part2.sites),
               "s1": out.entropy(rep.s1), "s2": out.entropy(rep.s2),
               "s_union": out.entropy(rep.s_union), "mutual_info": out.entropy(rep.I)}
    rows = [(k, v) for k, v in results.items() if isinstance(v, float)]
    out.write(results, {}, rows, ("quantity", "value"))
    return EXIT_OK


def scan_row(m: int, h: float = 0.0):
    """``(m, 1/m, S_A1, S_A2, S_A, I)`` for intervals ``[1, m]`` and ``[2m+1, 3m]``."""
    rep = mutual_information(range(1, m + 1), range(2 * m + 1, 3 * m + 1), ModelParams(h))
    if abs(rep.s1 - rep.s2) > 1e-9:
        raise ArithmeticError(f"m={m}: S_A1 - S_A2 = {rep.s1 - rep.s2:.3e}")
    return (m, 1.0 / m, rep.s1, rep.s2, rep.s_union, rep.I)


def cmd_scan_fig2(args) -> int:
    out = _Output(args)
    ms = list(args.m_list) if args.m_list else list(SCAN_M)
    if args.max_m is not None:
        ms = [m for m in ms if m <= args.max_m]
    workers = _threads()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(scan_row, m, args.h) for m in ms]
            outcomes = []
            for m, fut in zip(ms, futures):
                try:
                    outcomes.append((m, fut.result(), None))
                except Exception as exc:  # reported per row; scan continues
                    outcomes.append((m, None, exc))
    else:
        outcomes = []
        for m in ms:
            try:
                outcomes.append((m, scan_row(m, args.h), None))
            except Exception as exc:
                outcomes.append((m, None, exc))
    rows, failures = [], []
    for m, row, exc in outcomes:
        if exc is not None:
            failures.append({"m": m, "error": str(exc)})
            print(f"scan-fig2: m={m} failed: {exc}", file=sys.stderr)
            continue
        m_, inv, s1, s2, su, i = row
        rows.append((m_, inv, out.entropy(s1), out.entropy(s2), out.entropy(su), out.entropy(i)))
    results = [dict(zip(SCAN_HEADER, r)) for r in rows]
    residuals = {"max_abs_s_a1_minus_s_a2": max((abs(r[2] - r[3]) for r in rows), default=0.0),
                 "failures": failures}
    out.write(results, residuals, rows, SCAN_HEADER)
    if args.plot_data:
        with open(args.plot_data, "w") as fh:
            fh.write("# inv_m mutual_info\n")
            for r in rows:
                fh.write(f"{_fmt(r[1])} {_fmt(r[5])}\n")
    return EXIT_FAIL if failures else EXIT_OK


def _random_specs(rng, cases, max_sites, max_span=24):
    specs = []
    for _ in range(cases):
        n = int(rng.integers(1, max_sites + 1))
        span = max(n, int(rng.integers(n, max_span + 1)))
        sites = sorted(int(s) for s in rng.choice(np.arange(1, span + 1), size=n, replace=False))
        specs.append(sites)
    return specs


def cmd_contour_check(args) -> int:
    out = _Output(args)
    rng = np.random.default_rng(args.seed)
    cases = []
    ok = True
    for sites in _random_specs(rng, args.cases, args.max_sites):
        h = float(rng.uniform(0.0, 1.9)) if args.random_h else args.h
        corr = build_corr_matrix(parse_spec(sites), ModelParams(h))
        spectrum = Spectrum.of(corr)
        for eps in args.epsilons:
            contour = ContourSpec(epsilon=eps, shape=args.shape)
            for alpha in [None] + list(args.alphas):
                if alpha is None:
                    value = entropy_by_contour(corr, contour)
                else:
                    value = renyi_by_contour(corr, contour, alpha)
                exact = residue_sum(spectrum, eps, alpha)
                if args.inject_error:
                    value += 10.0 * args.tol
                resid = abs(value - exact)
                passed = resid <= args.tol
                ok &= passed
                cases.append({"sites": sites, "h": h, "epsilon": eps, "alpha": alpha,
                              "contour": value, "residue_sum": exact,
                              "residual": resid, "pass": passed})
    residuals = {"max_residual": max(c["residual"] for c in cases), "tolerance": args.tol}
    rows = [(json.dumps(c["sites"]).replace(" ", ""), c["h"], c["epsilon"],
             "" if c["alpha"] is None else repr(c["alpha"]), c["residual"], str(c["pass"]))
            for c in cases]
    out.write({"pass": bool(ok), "cases": cases}, residuals, rows,
              ("sites", "h", "epsilon", "alpha", "residual", "pass"))
    return EXIT_OK if ok else EXIT_FAIL


def oracle_subsets(L: int, max_exhaustive: int, n_random: int, random_size: int, seed: int):
    """All subsets up to ``max_exhaustive`` sites plus seeded random ones."""
    subsets = [s for k in range(1, max_exhaustive + 1)
               for s in itertools.combinations(range(1, L + 1), k)]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        subsets.append(tuple(sorted(int(x) for x in
                                    rng.choice(np.arange(1, L + 1), size=random_size, replace=False))))
    return subsets


def cmd_oracle_check(args) -> int:
    out = _Output(args)
    chain = FiniteChain(args.L, args.h)
    psi = ed_ground_state(chain)
    g = finite_correlator(chain)
    cases = []
    ok = True
    for s in oracle_subsets(args.L, args.max_exhaustive, args.random, args.random_size, args.seed):
        contiguous = s[-1] - s[0] == len(s) - 1
        if args.subsets == "contiguous" and not contiguous:
            continue
        ed = ed_reduced_entropy(psi, s)
        ff = ff_finite_entropy(chain, s, g)
        two_point = float(np.abs(ed_mode_correlator(psi, s) - finite_corr_matrix(chain, s, g)).max())
        if args.inject_error:
            ff += 10.0 * args.tol
        resid = abs(ff - ed)
        passed = resid <= args.tol and two_point <= args.tol
        ok &= passed
        cases.append({"sites": list(s), "contiguous": contiguous, "ed": ed, "fermion": ff,
                      "residual": resid, "two_point_residual": two_point, "pass": passed})
    residuals = {
        "max_residual": max(c["residual"] for c in cases),
        "max_residual_contiguous": max((c["residual"] for c in cases if c["contiguous"]), default=0.0),
        "max_two_point_residual": max(c["two_point_residual"] for c in cases),
        "failed_cases": sum(not c["pass"] for c in cases),
        "tolerance": args.tol,
    }
    rows = [(json.dumps(c["sites"]).replace(" ", ""), str(c["contiguous"]), c["ed"], c["fermion"],
             c["residual"], c["two_point_residual"], str(c["pass"])) for c in cases]
    out.write({"pass": bool(ok), "L": chain.L, "h": chain.h, "cases": cases}, residuals, rows,
              ("sites", "contiguous", "ed", "fermion", "residual", "two_point_residual", "pass"))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", type=float, default=0.0, help="transverse field, |h| < 2")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--bits", action="store_true", help="report entropies in bits")
    common.add_argument("--seed", type=int, default=0)

    def fmt(p, default):
        p.add_argument("--format", choices=("csv", "json"), default=default)

    parser = argparse.ArgumentParser(prog="fermion-entropy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[common], help="entropies of one subsystem")
    p.add_argument("--sites", type=parse_sites, required=True, help='e.g. "1-10,21-30"')
    p.add_argument("--alpha", type=_float_list, default=None, help="Renyi indices, comma-separated")
    fmt(p, "json")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("mutual", parents=[common], help="mutual information of two parts")
    p.add_argument("--part1", type=parse_sites, required=True)
    p.add_argument("--part2", type=parse_sites, required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_mutual)

    p = sub.add_parser("scan-fig2", parents=[common], help="two-interval mutual information scan")
    p.add_argument("--m-list", type=_int_list, default=None)
    p.add_argument("--max-m", type=int, default=None)
    p.add_argument("--plot-data", default=None, help="also write 'inv_m mutual_info' columns here")
    fmt(p, "csv")
    p.set_defaults(func=cmd_scan_fig2)

    p = sub.add_parser("contour-check", parents=[common], help="contour vs residue-sum suite")
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--max-sites", type=int, default=12)
    p.add_argument("--epsilons", type=_float_list, default=[1e-3, 1e-4])
    p.add_argument("--alphas", type=_float_list, default=[0.5, 2.0, 3.0])
    p.add_argument("--shape", choices=("rectangle", "ellipse"), default="rectangle")
    p.add_argument("--random-h", action="store_true", help="draw h per case instead of --h")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--inject-error", action="store_true", help=argparse.SUPPRESS)
    fmt(p, "json")
    p.set_defaults(func=cmd_contour_check)

    p = sub.add_parser("oracle-check", parents=[common], help="finite-chain fermions vs spin ED")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--max-exhaustive", type=int, default=3)
    p.add_argument("--random", type=int, default=200)
    p.add_argument("--random-size", type=int, default=4)
    p.add_argument("--subsets", choices=("all", "contiguous"), default="all")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--inject-error", action="store_true", help=argparse.SUPPRESS)
    fmt(p, "json")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FermionEntropyError as exc:
        print(f"{parser.prog} {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
