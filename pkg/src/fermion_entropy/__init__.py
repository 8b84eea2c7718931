"""Entanglement entropies of arbitrary site subsets of the critical XX chain."""

__version__ = "0.1.0"

from .contour import ContourSpec, entropy_by_contour, renyi_by_contour
from .correlation import CorrMatrix, SubsystemSpec, build_corr_matrix, parse_spec
from .entropy import (
    EntropyReport,
    MutualInformationReport,
    entanglement_entropy,
    mutual_information,
    renyi,
    von_neumann,
)
from .model import ModelParams, fourier_coefficient, fourier_table
from .spectral import Spectrum

__all__ = [
    "ContourSpec",
    "CorrMatrix",
    "EntropyReport",
    "ModelParams",
    "MutualInformationReport",
    "Spectrum",
    "SubsystemSpec",
    "build_corr_matrix",
    "entanglement_entropy",
    "entropy_by_contour",
    "fourier_coefficient",
    "fourier_table",
    "mutual_information",
    "parse_spec",
    "renyi",
    "renyi_by_contour",
    "von_neumann",
]
