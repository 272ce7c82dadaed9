"""Synthetic chromatogram generation and detection-rate sweeps.

Peaks are Gaussian elution profiles times a fixed nonnegative unit-norm
fragment spectrum, added onto iid Gaussian noise. Amplitudes are expressed
in multiples of the noise sigma, so amplitude doubles as signal-to-noise.
All randomness flows from numpy's PCG64 generator seeded explicitly; the
noise and the auto-drawn spectra use separate child streams so that adding
an amplitude-zero peak reproduces the no-peak matrix bit for bit.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .detect import Chromatogram, RoiConfig, detect_rois


@dataclass(frozen=True, eq=False)
class GaussianPeak:
    """One synthetic peak.

    apex is a 1-based acquisition position; sigma the Gaussian width in
    acquisitions; amplitude the peak height in noise-sigma units. spectrum,
    when omitted, is drawn from the generator's spectra stream.
    """

    apex: float
    sigma: float
    amplitude: float
    spectrum: np.ndarray | None = None

    def __post_init__(self):
        apex = float(self.apex)
        sigma = float(self.sigma)
        amplitude = float(self.amplitude)
        if not math.isfinite(apex):
            raise ValueError("apex must be finite")
        if not math.isfinite(sigma) or sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        if not math.isfinite(amplitude) or amplitude < 0.0:
            raise ValueError(f"amplitude must be nonnegative, got {amplitude}")
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "amplitude", amplitude)
        if self.spectrum is not None:
            s = np.asarray(self.spectrum, dtype=float)
            if s.ndim != 1 or s.size == 0:
                raise ValueError("spectrum must be a nonempty 1-D vector")
            if not np.all(np.isfinite(s)) or s.min() < 0.0:
                raise ValueError("spectrum must be finite and nonnegative")
            norm = float(np.linalg.norm(s))
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"spectrum must have unit norm, got {norm}")
            object.__setattr__(self, "spectrum", s)


@dataclass(frozen=True, eq=False)
class SyntheticSpec:
    """Full description of one synthetic chromatogram."""

    rows: int
    cols: int
    peaks: tuple = ()
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.rows, int) or self.rows < 3:
            raise ValueError(f"rows must be an integer >= 3, got {self.rows!r}")
        if not isinstance(self.cols, int) or self.cols < 1:
            raise ValueError(f"cols must be an integer >= 1, got {self.cols!r}")
        noise_sigma = float(self.noise_sigma)
        if not math.isfinite(noise_sigma) or noise_sigma <= 0.0:
            raise ValueError(f"noise_sigma must be positive, got {noise_sigma}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        peaks = tuple(self.peaks)
        for peak in peaks:
            if not isinstance(peak, GaussianPeak):
                raise ValueError("peaks must be GaussianPeak instances")
            if not 1.0 <= peak.apex <= self.rows:
                raise ValueError(
                    f"apex {peak.apex} outside [1, {self.rows}]"
                )
            if peak.spectrum is not None and peak.spectrum.shape != (self.cols,):
                raise ValueError(
                    f"spectrum length {peak.spectrum.shape[0]} != cols {self.cols}"
                )
        object.__setattr__(self, "peaks", peaks)
        object.__setattr__(self, "noise_sigma", noise_sigma)


def _draw_spectrum(rng, cols):
    raw = rng.uniform(0.0, 1.0, cols)
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:  # astronomically unlikely; redraw would break stream math
        raw[0] = 1.0
        norm = 1.0
    return raw / norm


def generate(spec):
    """Render a SyntheticSpec to a Chromatogram.

    Deterministic per seed: the same spec yields bitwise-identical
    matrices. Peaks without an explicit spectrum consume one draw from the
    spectra stream each, in peak order.
    """
    if not isinstance(spec, SyntheticSpec):
        raise TypeError("spec must be a SyntheticSpec")
    noise_seq, spectra_seq = np.random.SeedSequence(spec.seed).spawn(2)
    x = np.random.default_rng(noise_seq).normal(
        0.0, spec.noise_sigma, (spec.rows, spec.cols)
    )
    spectra_rng = np.random.default_rng(spectra_seq)
    idx = np.arange(1, spec.rows + 1, dtype=float)
    for peak in spec.peaks:
        spectrum = peak.spectrum
        if spectrum is None:
            spectrum = _draw_spectrum(spectra_rng, spec.cols)
        z = (idx - peak.apex) / peak.sigma
        profile = peak.amplitude * spec.noise_sigma * np.exp(-0.5 * z * z)
        x += np.outer(profile, spectrum)
    return Chromatogram(x)


def peak_support(peak, rows):
    """1-based inclusive acquisition range within two sigma of the apex,
    clipped to the chromatogram; collapses to the nearest acquisition for
    very narrow peaks."""
    lo = max(1, math.ceil(peak.apex - 2.0 * peak.sigma))
    hi = min(rows, math.floor(peak.apex + 2.0 * peak.sigma))
    if lo > hi:
        lo = hi = min(max(int(round(peak.apex)), 1), rows)
    return lo, hi


def roi_membership(result):
    """Boolean vector marking acquisitions inside any reported interval."""
    member = np.zeros(result.n_acquisitions, dtype=bool)
    for roi in result.rois:
        member[roi.start_index - 1 : roi.end_index] = True
    return member


def peak_detected(result, peak):
    """True when at least half of the peak's two-sigma support lies inside
    reported regions of interest."""
    lo, hi = peak_support(peak, result.n_acquisitions)
    member = roi_membership(result)
    return bool(member[lo - 1 : hi].mean() >= 0.5)


@dataclass(frozen=True)
class SweepCell:
    """Detection outcome for one (amplitude, seed, peak) combination."""

    amplitude: float
    seed: int
    peak_id: int
    detected: bool


@dataclass(frozen=True, eq=False)
class SweepReport:
    """All sweep cells plus per-amplitude aggregate detection rates."""

    amplitudes: tuple
    seeds: tuple
    config: RoiConfig
    cells: tuple

    @property
    def n_seeds(self):
        return len(self.seeds)

    def rate(self, amplitude):
        hits = [c.detected for c in self.cells if c.amplitude == amplitude]
        if not hits:
            raise ValueError(f"no cells for amplitude {amplitude}")
        return sum(hits) / len(hits)

    def rates(self):
        return {a: self.rate(a) for a in self.amplitudes}


def sweep(spec_template, amplitudes, seeds, config=None, threads=None):
    """Detection rate study over an amplitude x seed grid.

    Every peak of the template is rescaled to each amplitude in turn (the
    dilution-series reading: the whole sample is diluted together), the
    template seed is replaced by each sweep seed, and the detector runs at
    the given config. Cells are assembled in amplitude-major order.
    """
    if not isinstance(spec_template, SyntheticSpec):
        raise TypeError("spec_template must be a SyntheticSpec")
    if not spec_template.peaks:
        raise ValueError("spec_template needs at least one peak")
    amplitudes = tuple(float(a) for a in amplitudes)
    seeds = tuple(int(s) for s in seeds)
    if not amplitudes or not seeds:
        raise ValueError("amplitudes and seeds must be nonempty")
    if any(a < 0 for a in amplitudes):
        raise ValueError("amplitudes must be nonnegative")
    if any(s < 0 for s in seeds):
        raise ValueError("seeds must be nonnegative")
    if config is None:
        config = RoiConfig()

    cells = []
    for amplitude in amplitudes:
        for seed in seeds:
            spec = replace(
                spec_template,
                peaks=tuple(
                    replace(p, amplitude=amplitude) for p in spec_template.peaks
                ),
                seed=seed,
            )
            result = detect_rois(generate(spec), config, threads=threads)
            for peak_id, peak in enumerate(spec.peaks, start=1):
                cells.append(
                    SweepCell(
                        amplitude=amplitude,
                        seed=seed,
                        peak_id=peak_id,
                        detected=peak_detected(result, peak),
                    )
                )
    return SweepReport(
        amplitudes=amplitudes, seeds=seeds, config=config, cells=tuple(cells)
    )
