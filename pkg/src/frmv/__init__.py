"""Untargeted region-of-interest detection for GC-MS chromatograms.

The detector slides a window along the acquisition axis, autoscales each
window, takes the ratio of its two leading squared singular values, and
combines the resulting per-window probabilities into a per-acquisition
probability of belonging to a region of interest.
"""

from .detect import (
    DEFAULT_CUTOFF,
    DEFAULT_P_CLAMP,
    DEFAULT_WINDOW,
    Chromatogram,
    RoiConfig,
    RoiInterval,
    RoiResult,
    detect_rois,
)
from .io import CsvLayout, CsvParseError, read_chromatogram, write_result
from .spectra import (
    ParafacFactors,
    Spectrum,
    extract_spectra,
    match_factor,
    rank1_spectrum,
)
from .synth import GaussianPeak, SweepReport, SyntheticSpec, generate, sweep
from .windows import PseudoFSeries, scan, top2_singular, window_probabilities

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CUTOFF",
    "DEFAULT_P_CLAMP",
    "DEFAULT_WINDOW",
    "Chromatogram",
    "CsvLayout",
    "CsvParseError",
    "GaussianPeak",
    "ParafacFactors",
    "PseudoFSeries",
    "RoiConfig",
    "RoiInterval",
    "RoiResult",
    "Spectrum",
    "SweepReport",
    "SyntheticSpec",
    "detect_rois",
    "extract_spectra",
    "generate",
    "match_factor",
    "rank1_spectrum",
    "read_chromatogram",
    "scan",
    "sweep",
    "top2_singular",
    "window_probabilities",
    "write_result",
    "__version__",
]
