"""Static SVG rendering of a detection result.

Draws the total ion chromatogram as a polyline with detected regions as
gray rectangles behind it, optionally overlaying the per-acquisition
probability trace rescaled to the intensity axis. Output is plain SVG 1.1
text with fixed two-decimal coordinates, so identical results render to
identical bytes.
"""

from dataclasses import dataclass

import numpy as np

from .io import _write_atomic

# Pixel gap between the drawing area and the SVG borders.
_MARGIN = 40.0

_ROI_FILL = "#d3d3d3"
_TIC_STROKE = "#000000"
_PV_STROKE = "#b22222"


@dataclass(frozen=True)
class PlotStyle:
    """Canvas size and togglable layers."""

    width_px: int = 1200
    height_px: int = 400
    roi_shade: bool = True
    show_pv: bool = True

    def __post_init__(self):
        for name, value in (("width_px", self.width_px), ("height_px", self.height_px)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value < 100:
                raise ValueError(f"{name} must be at least 100, got {value}")


def _coord(value):
    return "%.2f" % value


def render_plot(result, style=None, path=None):
    """Render a result to SVG text; writes it when path is given.

    Returns the SVG text either way.
    """
    if style is None:
        style = PlotStyle()
    if not isinstance(style, PlotStyle):
        raise TypeError("style must be a PlotStyle")
    tic = np.asarray(result.tic, dtype=float)
    n = tic.shape[0]
    left, right = _MARGIN, style.width_px - _MARGIN
    top, bottom = _MARGIN, style.height_px - _MARGIN
    lo = min(float(tic.min()), 0.0)
    hi = max(float(tic.max()), 0.0)
    if hi == lo:
        hi = lo + 1.0

    def x_at(index_1b):
        if n == 1:
            return (left + right) / 2.0
        return left + (index_1b - 1.0) / (n - 1.0) * (right - left)

    def y_at(value):
        return bottom - (value - lo) / (hi - lo) * (bottom - top)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{style.width_px}" height="{style.height_px}" '
        f'viewBox="0 0 {style.width_px} {style.height_px}">',
        f'<rect width="{style.width_px}" height="{style.height_px}" fill="#ffffff"/>',
    ]
    if style.roi_shade:
        for roi in result.rois:
            x0 = x_at(roi.start_index)
            x1 = x_at(roi.end_index)
            parts.append(
                f'<rect class="roi" x="{_coord(x0)}" y="{_coord(top)}" '
                f'width="{_coord(x1 - x0)}" height="{_coord(bottom - top)}" '
                f'fill="{_ROI_FILL}"/>'
            )
    tic_points = " ".join(
        f"{_coord(x_at(i + 1))},{_coord(y_at(tic[i]))}" for i in range(n)
    )
    parts.append(
        f'<polyline class="tic" points="{tic_points}" fill="none" '
        f'stroke="{_TIC_STROKE}" stroke-width="1"/>'
    )
    if style.show_pv:
        # Probabilities in [0, 1] stretched onto [0, max TIC].
        scale = max(float(tic.max()), 0.0)
        pv = np.asarray(result.acquisition_probs, dtype=float)
        pv_points = " ".join(
            f"{_coord(x_at(i + 1))},{_coord(y_at(pv[i] * scale))}" for i in range(n)
        )
        parts.append(
            f'<polyline class="pv" points="{pv_points}" fill="none" '
            f'stroke="{_PV_STROKE}" stroke-width="1"/>'
        )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        _write_atomic(path, text)
    return text
