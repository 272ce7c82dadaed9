"""Region-of-interest detection over a whole chromatogram.

Each window's variance-ratio probability is converted to a 1-df chi-square
score and spread over the acquisitions the window touches. Summed scores
are mapped back to a per-acquisition probability through the chi-square CDF
whose degrees of freedom equal the number of windows covering that
acquisition, and a cutoff on those probabilities yields the regions.
"""

from dataclasses import dataclass, field

import numpy as np

from .stats import chi2_cdf, chi2_inv
from .windows import scan, window_probabilities

DEFAULT_WINDOW = 10
DEFAULT_CUTOFF = 0.7
# Keeps saturated window probabilities strictly below 1 so the chi-square
# quantile stays finite.
DEFAULT_P_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class RoiConfig:
    """Detector settings.

    window is the moving-window length in acquisitions and should sit near
    the average peak width; cutoff is the inclusive probability threshold
    an acquisition must reach to enter a region.
    """

    window: int = DEFAULT_WINDOW
    cutoff: float = DEFAULT_CUTOFF
    epsilon: float = 0.0
    p_clamp: float = DEFAULT_P_CLAMP
    min_roi_len: int = 0

    def __post_init__(self):
        if isinstance(self.window, bool) or not isinstance(self.window, int):
            raise ValueError(f"window must be an integer, got {self.window!r}")
        if self.window < 3:
            raise ValueError(f"window must be >= 3, got {self.window}")
        cutoff = float(self.cutoff)
        if not 0.0 <= cutoff <= 1.0:
            raise ValueError(f"cutoff must lie in [0, 1], got {cutoff}")
        epsilon = float(self.epsilon)
        if not np.isfinite(epsilon) or epsilon < 0.0:
            raise ValueError(f"epsilon must be finite and >= 0, got {epsilon}")
        p_clamp = float(self.p_clamp)
        if not 0.0 < p_clamp < 1.0:
            raise ValueError(f"p_clamp must lie strictly in (0, 1), got {p_clamp}")
        if isinstance(self.min_roi_len, bool) or not isinstance(self.min_roi_len, int):
            raise ValueError(f"min_roi_len must be an integer, got {self.min_roi_len!r}")
        if self.min_roi_len < 0:
            raise ValueError(f"min_roi_len must be >= 0, got {self.min_roi_len}")
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "p_clamp", p_clamp)


@dataclass(frozen=True, eq=False)
class Chromatogram:
    """An acquisitions x channels intensity matrix with optional axes.

    retention_times, when given, must be strictly increasing with one entry
    per acquisition; mz_axis labels the channels.
    """

    intensities: np.ndarray
    retention_times: np.ndarray | None = None
    mz_axis: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.intensities, dtype=float)
        if x.ndim != 2:
            raise ValueError("intensities must be a 2-D array")
        if x.shape[0] < 3:
            raise ValueError(f"need at least 3 acquisitions, got {x.shape[0]}")
        if x.shape[1] < 1:
            raise ValueError("need at least 1 channel")
        if not np.all(np.isfinite(x)):
            raise ValueError("intensities must be finite")
        object.__setattr__(self, "intensities", x)
        if self.retention_times is not None:
            t = np.asarray(self.retention_times, dtype=float)
            if t.shape != (x.shape[0],):
                raise ValueError(
                    f"retention_times must have length {x.shape[0]}, got {t.shape}"
                )
            if not np.all(np.isfinite(t)):
                raise ValueError("retention_times must be finite")
            if np.any(np.diff(t) <= 0.0):
                raise ValueError("retention_times must be strictly increasing")
            object.__setattr__(self, "retention_times", t)
        if self.mz_axis is not None:
            mz = np.asarray(self.mz_axis, dtype=float)
            if mz.shape != (x.shape[1],):
                raise ValueError(
                    f"mz_axis must have length {x.shape[1]}, got {mz.shape}"
                )
            if not np.all(np.isfinite(mz)):
                raise ValueError("mz_axis must be finite")
            object.__setattr__(self, "mz_axis", mz)

    @property
    def n_acquisitions(self):
        return self.intensities.shape[0]

    @property
    def n_channels(self):
        return self.intensities.shape[1]

    def tic(self):
        """Total intensity per acquisition (sum across channels)."""
        return self.intensities.sum(axis=1)


@dataclass(frozen=True, eq=False)
class ScoreAccumulator:
    """Summed chi-square scores and window coverage per acquisition."""

    chi2_sum: np.ndarray
    coverage: np.ndarray
    window: int


@dataclass(frozen=True)
class RoiInterval:
    """One detected region, 1-based and inclusive on both ends."""

    start_index: int
    end_index: int
    start_time: float | None
    end_time: float | None
    peak_probability: float

    def __post_init__(self):
        if not 1 <= self.start_index <= self.end_index:
            raise ValueError(
                f"invalid interval [{self.start_index}, {self.end_index}]"
            )

    def __len__(self):
        return self.end_index - self.start_index + 1


@dataclass(frozen=True, eq=False)
class RoiResult:
    """Everything the detector produces for one chromatogram."""

    config: RoiConfig
    acquisition_probs: np.ndarray
    probs_above_cutoff: np.ndarray
    roi_mask: np.ndarray
    tic: np.ndarray
    tic_in_rois: np.ndarray
    intensities_in_rois: np.ndarray
    rois: list[RoiInterval] = field(default_factory=list)
    retention_times: np.ndarray | None = None
    mz_axis: np.ndarray | None = None

    @property
    def n_acquisitions(self):
        return self.acquisition_probs.shape[0]


def window_coverage(n_acquisitions, window):
    """Number of windows that touch each acquisition.

    Ramps up from 1 at the edges and plateaus at min(window, n_windows)
    in the interior.
    """
    if not isinstance(window, int) or not 3 <= window <= n_acquisitions:
        raise ValueError(
            f"window must be an integer in [3, {n_acquisitions}], got {window}"
        )
    i = np.arange(n_acquisitions)
    n_win = n_acquisitions - window + 1
    low = np.maximum(i - window + 1, 0)
    high = np.minimum(i, n_win - 1)
    return (high - low + 1).astype(np.int64)


def accumulate(window_probs, n_acquisitions, window, p_clamp=DEFAULT_P_CLAMP):
    """Convert window probabilities to 1-df chi-square scores and sum them
    over the acquisitions each window spans.

    Probabilities are clamped to [0, p_clamp] before inversion so that a
    saturated window contributes a large finite score. Windows are applied
    in ascending start order, which fixes the floating-point summation
    order regardless of how the scan was threaded.
    """
    probs = np.asarray(window_probs, dtype=float)
    if probs.ndim != 1:
        raise ValueError("window_probs must be 1-D")
    n_win = n_acquisitions - window + 1
    if probs.shape[0] != n_win:
        raise ValueError(
            f"expected {n_win} window probabilities, got {probs.shape[0]}"
        )
    if np.any(np.isnan(probs)) or probs.min() < 0.0 or probs.max() > 1.0:
        raise ValueError("window probabilities must lie in [0, 1]")
    p_clamp = float(p_clamp)
    if not 0.0 < p_clamp < 1.0:
        raise ValueError(f"p_clamp must lie strictly in (0, 1), got {p_clamp}")

    chi2_sum = np.zeros(n_acquisitions)
    scores = {}
    for s in range(n_win):
        p = min(float(probs[s]), p_clamp)
        q = scores.get(p)
        if q is None:
            q = chi2_inv(p, 1)
            scores[p] = q
        chi2_sum[s : s + window] += q
    return ScoreAccumulator(
        chi2_sum=chi2_sum,
        coverage=window_coverage(n_acquisitions, window),
        window=window,
    )


def acquisition_probabilities(state):
    """Probability per acquisition: chi-square CDF of the summed score with
    degrees of freedom equal to that acquisition's window coverage."""
    if not isinstance(state, ScoreAccumulator):
        raise TypeError("state must be a ScoreAccumulator")
    out = np.empty(state.chi2_sum.shape[0])
    for i, (total, k) in enumerate(zip(state.chi2_sum, state.coverage)):
        out[i] = chi2_cdf(float(total), int(k))
    return out


def extract_rois(roi_mask, acquisition_probs, retention_times=None, min_roi_len=0):
    """Contiguous runs of the mask as intervals.

    Runs shorter than min_roi_len are dropped. Indices are 1-based and
    inclusive; times are attached when retention_times is given.
    """
    mask = np.asarray(roi_mask).astype(bool)
    probs = np.asarray(acquisition_probs, dtype=float)
    if mask.shape != probs.shape:
        raise ValueError("mask and probabilities must have the same length")
    edges = np.flatnonzero(np.diff(np.concatenate([[0], mask.view(np.uint8), [0]])))
    rois = []
    for lo, hi in zip(edges[::2], edges[1::2]):
        # lo is the first masked index, hi is one past the last
        if hi - lo < min_roi_len:
            continue
        rois.append(
            RoiInterval(
                start_index=int(lo) + 1,
                end_index=int(hi),
                start_time=float(retention_times[lo]) if retention_times is not None else None,
                end_time=float(retention_times[hi - 1]) if retention_times is not None else None,
                peak_probability=float(probs[lo:hi].max()),
            )
        )
    return rois


def detect_rois(chromatogram, config=None, threads=None):
    """Run the full detector on one chromatogram.

    Returns a RoiResult whose masked outputs satisfy, exactly:
    tic_in_rois = tic * roi_mask and intensities_in_rois = intensities
    masked by the same rows.
    """
    if not isinstance(chromatogram, Chromatogram):
        raise TypeError("chromatogram must be a Chromatogram")
    if config is None:
        config = RoiConfig()
    x = chromatogram.intensities
    if config.window > x.shape[0]:
        raise ValueError(
            f"window {config.window} exceeds the {x.shape[0]} acquisitions"
        )
    series = scan(x, config.window, epsilon=config.epsilon, threads=threads)
    probs = window_probabilities(series)
    state = accumulate(probs, x.shape[0], config.window, config.p_clamp)
    pv = acquisition_probabilities(state)
    mask = (pv >= config.cutoff).astype(np.uint8)
    keep = mask == 1
    return RoiResult(
        config=config,
        acquisition_probs=pv,
        probs_above_cutoff=np.where(keep, pv, 0.0),
        roi_mask=mask,
        tic=x.sum(axis=1),
        tic_in_rois=np.where(keep, x.sum(axis=1), 0.0),
        intensities_in_rois=np.where(keep[:, None], x, 0.0),
        rois=extract_rois(mask, pv, chromatogram.retention_times, config.min_roi_len),
        retention_times=chromatogram.retention_times,
        mz_axis=chromatogram.mz_axis,
    )
