"""Sliding-window singular value analysis.

A window of consecutive acquisitions is autoscaled per channel and reduced
to its two leading singular values; their variance ratio is the moving
statistic the detector thresholds. Singular values come from the
eigenvalues of the smaller Gram matrix, solved by a cyclic Jacobi rotation
sweep that is batched over windows so a whole chromatogram is processed
with array arithmetic.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .stats import PSEUDO_F_SATURATION, f_cdf

# Relative off-diagonal Frobenius norm at which a Gram matrix counts as
# diagonalized.
JACOBI_TOL = 1e-12
_MAX_SWEEPS = 60

# Windows are processed in fixed-size chunks. The chunk grid never depends
# on the thread count, so results are bitwise identical for any FRMV_THREADS.
_CHUNK_WINDOWS = 256

ENV_THREADS = "FRMV_THREADS"


def _as_float_matrix(matrix, name="matrix"):
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"{name} must be a nonempty 2-D array")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must contain only finite values")
    return a


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon < 0.0:
        raise ValueError(f"epsilon must be a finite nonnegative number, got {epsilon}")
    return epsilon


def _scale_block(windows, epsilon):
    """Autoscale each (rows x channels) slab of a (batch, rows, channels)
    stack: center each channel and divide by its sample standard deviation.
    Channels whose deviation does not exceed epsilon are zeroed outright."""
    rows = windows.shape[1]
    mean = windows.mean(axis=1, keepdims=True)
    centered = windows - mean
    var = np.einsum("bij,bij->bj", centered, centered) / (rows - 1)
    sd = np.sqrt(var)
    keep = sd > epsilon
    inv = np.where(keep, 1.0 / np.where(keep, sd, 1.0), 0.0)
    return np.where(keep[:, None, :], centered * inv[:, None, :], 0.0)


def autoscale(matrix, epsilon=0.0):
    """Column-wise autoscaling: subtract the mean, divide by the sample
    standard deviation (ddof 1). Columns with deviation <= epsilon become
    all-zero instead of being divided.
    """
    a = _as_float_matrix(matrix)
    if a.shape[0] < 2:
        raise ValueError("autoscale needs at least 2 rows")
    return _scale_block(a[None], _check_epsilon(epsilon))[0]


def _jacobi_eigenvalues(mats):
    """Eigenvalues of a stack of symmetric matrices by cyclic Jacobi
    rotations, batched over the leading axis. Returns a (batch, m) array in
    unspecified order. Rotations whose pivot is already negligible are
    skipped, which cannot stall convergence because the skip threshold is
    sized so that a sweep of skips implies the convergence criterion.
    """
    a = np.array(mats, dtype=float)
    nmat, m, m2 = a.shape
    if m != m2:
        raise ValueError("matrices must be square")
    if m == 1:
        return a[:, :, 0].copy()
    n_pairs = m * (m - 1) // 2
    off_mask = 1.0 - np.eye(m)
    for _ in range(_MAX_SWEEPS):
        fro2 = np.einsum("bij,bij->b", a, a)
        # summed directly (not fro2 minus the diagonal part, which cancels
        # to noise once the matrix is nearly diagonal)
        off2 = np.einsum("bij,bij,ij->b", a, a, off_mask)
        active = off2 > (JACOBI_TOL * JACOBI_TOL) * fro2
        if not active.any():
            break
        pivot_floor = (JACOBI_TOL * JACOBI_TOL) * fro2 / (2.0 * n_pairs)
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[:, p, q]
                rot = active & (apq * apq > pivot_floor)
                if not rot.any():
                    continue
                apq = apq.copy()
                app = a[:, p, p].copy()
                aqq = a[:, q, q].copy()
                denom = np.where(rot, 2.0 * apq, 1.0)
                tau = (app - aqq) / denom
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(tau, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                t = np.where(rot, t, 0.0)
                c = np.where(rot, c, 1.0)
                s = np.where(rot, s, 0.0)
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c[:, None] * colp + s[:, None] * colq
                a[:, :, q] = c[:, None] * colq - s[:, None] * colp
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c[:, None] * rowp + s[:, None] * rowq
                a[:, q, :] = c[:, None] * rowq - s[:, None] * rowp
                # the rotation annihilates the pivot; write the closed-form
                # updates to keep the matrix exactly symmetric there
                a[:, p, q] = np.where(rot, 0.0, a[:, p, q])
                a[:, q, p] = np.where(rot, 0.0, a[:, q, p])
                a[:, p, p] = np.where(rot, app + t * apq, a[:, p, p])
                a[:, q, q] = np.where(rot, aqq - t * apq, a[:, q, q])
    else:
        raise ArithmeticError("Jacobi eigenvalue sweep did not converge")
    return np.einsum("bii->bi", a).copy()


def _top2_from_grams(grams):
    """Two leading singular values per Gram matrix: (batch, 2) array."""
    lam = _jacobi_eigenvalues(grams)
    lam = np.maximum(lam, 0.0)
    lam.sort(axis=1)
    s1 = np.sqrt(lam[:, -1])
    s2 = np.sqrt(lam[:, -2]) if lam.shape[1] > 1 else np.zeros(lam.shape[0])
    return np.column_stack([s1, s2])


def top2_singular(matrix):
    """Two largest singular values of a real matrix.

    Works on the smaller of A A^T and A^T A. A matrix with a single row or
    column has one singular value; the second is reported as zero.
    """
    a = _as_float_matrix(matrix)
    m, n = a.shape
    if m < 2:
        raise ValueError("top2_singular needs at least 2 rows")
    gram = a @ a.T if m <= n else a.T @ a
    pair = _top2_from_grams(gram[None])[0]
    return float(pair[0]), float(pair[1])


@dataclass(frozen=True, eq=False)
class PseudoFSeries:
    """Per-window variance ratios from a scan.

    values[s] belongs to the window starting at acquisition s (0-based).
    Entries are >= 1, +inf for windows whose second singular value carried
    no variance, or NaN for fully degenerate windows.
    """

    values: np.ndarray
    window: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-D array")
        if not isinstance(self.window, int) or self.window < 3:
            raise ValueError(f"window must be an integer >= 3, got {self.window}")
        finite = values[np.isfinite(values)]
        if finite.size and finite.min() < 1.0:
            raise ValueError("finite variance ratios are always >= 1")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def df_num(self):
        return self.window - 1

    @property
    def df_den(self):
        return self.window - 2


def sliding_windows(intensities, window):
    """Read-only view of all length-`window` acquisition blocks, shaped
    (n_windows, window, n_channels)."""
    x = _as_float_matrix(intensities, "intensities")
    if not isinstance(window, int) or not 3 <= window <= x.shape[0]:
        raise ValueError(
            f"window must be an integer in [3, {x.shape[0]}], got {window}"
        )
    view = sliding_window_view(x, window, axis=0)
    return view.transpose(0, 2, 1)


def _pseudo_f_block(windows, epsilon):
    rows = windows.shape[1]
    channels = windows.shape[2]
    scaled = _scale_block(windows, epsilon)
    if rows <= channels:
        grams = scaled @ scaled.transpose(0, 2, 1)
    else:
        grams = scaled.transpose(0, 2, 1) @ scaled
    pairs = _top2_from_grams(grams)
    s1_sq = pairs[:, 0] * pairs[:, 0]
    s2_sq = pairs[:, 1] * pairs[:, 1]
    ratio = s1_sq / np.where(s2_sq > PSEUDO_F_SATURATION, s2_sq, 1.0)
    ratio = np.where(s2_sq <= PSEUDO_F_SATURATION, np.inf, ratio)
    # a window that autoscaled to nothing at all has no usable statistic
    return np.where(s1_sq <= PSEUDO_F_SATURATION, np.nan, ratio)


def _resolve_threads(threads):
    if threads is None:
        raw = os.environ.get(ENV_THREADS, "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(
                f"{ENV_THREADS} must be a positive integer, got {raw!r}"
            ) from None
    if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
        raise ValueError(f"thread count must be a positive integer, got {threads!r}")
    return threads


def scan(intensities, window, epsilon=0.0, threads=None):
    """Pseudo-F statistic for every window position.

    Args:
        intensities: acquisitions x channels matrix.
        window: window length in acquisitions, between 3 and the number of
            acquisitions.
        epsilon: channel deviation floor passed to autoscaling.
        threads: worker count; None reads FRMV_THREADS and falls back to 1.
            The output is bitwise independent of this value.

    Returns:
        PseudoFSeries with one entry per window start.
    """
    view = sliding_windows(intensities, window)
    epsilon = _check_epsilon(epsilon)
    threads = _resolve_threads(threads)
    n_win = view.shape[0]
    out = np.empty(n_win)
    spans = [(lo, min(lo + _CHUNK_WINDOWS, n_win)) for lo in range(0, n_win, _CHUNK_WINDOWS)]

    def run(span):
        lo, hi = span
        out[lo:hi] = _pseudo_f_block(view[lo:hi], epsilon)

    if threads == 1 or len(spans) == 1:
        for span in spans:
            run(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, spans))
    return PseudoFSeries(values=out, window=window)


def window_probabilities(series):
    """Map each window's variance ratio through the F CDF with
    (window - 1, window - 2) degrees of freedom.

    NaN ratios (degenerate windows) become probability 0; infinite ratios
    (saturated windows) become probability 1.
    """
    if not isinstance(series, PseudoFSeries):
        raise TypeError("series must be a PseudoFSeries")
    nu1, nu2 = series.df_num, series.df_den
    out = np.empty(len(series))
    for i, value in enumerate(series.values):
        if math.isnan(value):
            out[i] = 0.0
        elif math.isinf(value):
            out[i] = 1.0
        else:
            out[i] = f_cdf(float(value), nu1, nu2)
    return out
