"""Spectrum recovery and comparison utilities for detected regions.

Given externally fitted per-component elution profiles and quantity
scalings, component mass spectra are recovered by solving the normal
equations of the profile model (never by forming an explicit inverse).
A rank-1 fallback estimates a single spectrum directly from an ROI
sub-matrix, and match factors score spectra on the conventional 0-100
cosine scale.
"""

from dataclasses import dataclass

import numpy as np

# Largest acceptable condition estimate for the normal-equation matrix.
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class ParafacFactors:
    """Per-component elution profiles with their quantity scalings.

    profiles is acquisitions x components; quantities holds the diagonal
    of the component scaling matrix and must be nonnegative.
    """

    profiles: np.ndarray
    quantities: np.ndarray

    def __post_init__(self):
        profiles = np.asarray(self.profiles, dtype=float)
        if profiles.ndim != 2 or profiles.shape[0] < 1 or profiles.shape[1] < 1:
            raise ValueError("profiles must be a nonempty 2-D matrix")
        if not np.all(np.isfinite(profiles)):
            raise ValueError("profiles must be finite")
        if np.any(np.all(profiles == 0.0, axis=0)):
            raise ValueError("every profile column must be nonzero")
        quantities = np.asarray(self.quantities, dtype=float)
        if quantities.shape != (profiles.shape[1],):
            raise ValueError(
                f"quantities must have length {profiles.shape[1]}, "
                f"got {quantities.shape}"
            )
        if not np.all(np.isfinite(quantities)) or quantities.min() < 0.0:
            raise ValueError("quantities must be finite and nonnegative")
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "quantities", quantities)

    @property
    def n_components(self):
        return self.profiles.shape[1]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """A nonnegative mass spectrum with an optional label."""

    intensities: np.ndarray
    label: str | None = None

    def __post_init__(self):
        x = np.asarray(self.intensities, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("intensities must be a nonempty 1-D vector")
        if not np.all(np.isfinite(x)) or x.min() < 0.0:
            raise ValueError("intensities must be finite and nonnegative")
        if x.max() <= 0.0:
            raise ValueError("spectrum needs at least one positive intensity")
        object.__setattr__(self, "intensities", x)


def extract_spectra(roi, factors):
    """Recover component spectra from an ROI sub-matrix.

    With G the profiles scaled column-wise by the quantities, the spectra
    solve A (G^T G) = roi^T G, i.e. the least-squares fit of the ROI to
    the profile model. Returns channels x components.
    """
    if not isinstance(factors, ParafacFactors):
        raise TypeError("factors must be a ParafacFactors")
    x = np.asarray(roi, dtype=float)
    if x.ndim != 2:
        raise ValueError("roi must be a 2-D matrix")
    if not np.all(np.isfinite(x)):
        raise ValueError("roi must be finite")
    if x.shape[0] != factors.profiles.shape[0]:
        raise ValueError(
            f"roi has {x.shape[0]} acquisitions but profiles have "
            f"{factors.profiles.shape[0]}"
        )
    scaled = factors.profiles * factors.quantities[None, :]
    gram = scaled.T @ scaled
    condition = float(np.linalg.cond(gram))
    if not condition <= MAX_CONDITION:
        raise ValueError(
            f"profile system is ill-conditioned: condition estimate "
            f"{condition:.3e} exceeds {MAX_CONDITION:.0e}"
        )
    rhs = scaled.T @ x  # components x channels
    return np.linalg.solve(gram, rhs).T


def rank1_spectrum(roi, label=None):
    """Estimate a single spectrum from an ROI sub-matrix.

    Takes the dominant right singular vector of the column-mean-centered
    ROI, flips its sign so the largest-magnitude entry is positive, clips
    negatives, and renormalizes.
    """
    x = np.asarray(roi, dtype=float)
    if x.ndim != 2:
        raise ValueError("roi must be a 2-D matrix")
    if x.shape[0] < 2:
        raise ValueError(f"roi needs at least 2 acquisitions, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("roi must be finite")
    centered = x - x.mean(axis=0)
    singular_values, right = np.linalg.svd(centered, full_matrices=False)[1:]
    if singular_values[0] <= 0.0:
        raise ValueError("roi is degenerate: no variance across acquisitions")
    v = right[0]
    if v[np.argmax(np.abs(v))] < 0.0:
        v = -v
    v = np.clip(v, 0.0, None)
    return Spectrum(v / np.linalg.norm(v), label=label)


def _as_intensity_vector(spectrum):
    if isinstance(spectrum, Spectrum):
        return spectrum.intensities
    x = np.asarray(spectrum, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("spectrum must be a nonempty 1-D vector")
    if not np.all(np.isfinite(x)) or x.min() < 0.0:
        raise ValueError("spectrum must be finite and nonnegative")
    return x


def match_factor(a, b):
    """Cosine similarity between two spectra on a 0-100 scale."""
    va = _as_intensity_vector(a)
    vb = _as_intensity_vector(b)
    if va.shape != vb.shape:
        raise ValueError(f"spectrum lengths differ: {va.size} vs {vb.size}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("match factor is undefined for a zero spectrum")
    return min(100.0 * float(va @ vb) / (norm_a * norm_b), 100.0)
