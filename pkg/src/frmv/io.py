"""CSV and JSON input/output for chromatograms, detector results, sweep
reports, and spectra.

All writers emit deterministic bytes (fixed column order, fixed key order,
17-significant-digit floats) and write through a temporary file that is
renamed into place, so a failed run never leaves a partial artifact.
"""

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .detect import Chromatogram

# Lossless text round-trip for IEEE doubles.
FLOAT_FORMAT = "%.17g"

_FORBIDDEN_DELIMITERS = set("0123456789-.\n\r")


@dataclass(frozen=True)
class CsvLayout:
    """Shape of a chromatogram CSV.

    has_header marks a leading row of m/z labels; has_time_column marks a
    leading column of retention times in minutes.
    """

    has_header: bool = False
    has_time_column: bool = False
    delimiter: str = ","

    def __post_init__(self):
        if not isinstance(self.delimiter, str) or len(self.delimiter) != 1:
            raise ValueError(
                f"delimiter must be a single character, got {self.delimiter!r}"
            )
        if self.delimiter in _FORBIDDEN_DELIMITERS:
            raise ValueError(
                f"delimiter may not be a digit, minus, dot, or newline, "
                f"got {self.delimiter!r}"
            )


class CsvParseError(ValueError):
    """A malformed cell, row, or file; locations are 1-based."""

    def __init__(self, path, message, row=None, column=None):
        self.path = str(path)
        self.row = row
        self.column = column
        location = self.path
        if row is not None:
            location += f":{row}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {message}")


def _parse_cell(path, row, column, text):
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(
            path, f"not a number: {text!r}", row=row, column=column
        ) from None
    if not math.isfinite(value):
        raise CsvParseError(
            path, f"not a finite number: {text!r}", row=row, column=column
        )
    return value


def _read_rows(path, delimiter):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CsvParseError(path, f"cannot read: {exc.strerror}") from exc
    with handle:
        reader = csv.reader(handle, delimiter=delimiter)
        return [(reader.line_num, row) for row in reader if row]


def read_chromatogram(path, layout=None):
    """Load a chromatogram CSV per the layout flags."""
    if layout is None:
        layout = CsvLayout()
    rows = _read_rows(path, layout.delimiter)
    mz_axis = None
    if layout.has_header:
        if not rows:
            raise CsvParseError(path, "missing header row")
        line, header = rows[0]
        rows = rows[1:]
        labels = header[1:] if layout.has_time_column else header
        mz_axis = [
            _parse_cell(path, line, i + 1 + int(layout.has_time_column), cell)
            for i, cell in enumerate(labels)
        ]
    if not rows:
        raise CsvParseError(path, "no data rows")
    width = len(rows[0][1])
    times = [] if layout.has_time_column else None
    data = []
    for line, row in rows:
        if len(row) != width:
            raise CsvParseError(
                path, f"ragged row: expected {width} cells, got {len(row)}", row=line
            )
        values = [_parse_cell(path, line, i + 1, cell) for i, cell in enumerate(row)]
        if layout.has_time_column:
            if len(values) < 2:
                raise CsvParseError(
                    path, "time column present but no data columns", row=line
                )
            times.append(values[0])
            values = values[1:]
        data.append(values)
    if mz_axis is not None and len(mz_axis) != len(data[0]):
        raise CsvParseError(
            path,
            f"header has {len(mz_axis)} labels but rows have {len(data[0])} columns",
        )
    try:
        return Chromatogram(
            np.array(data, dtype=float),
            retention_times=np.array(times) if times is not None else None,
            mz_axis=np.array(mz_axis) if mz_axis is not None else None,
        )
    except ValueError as exc:
        raise CsvParseError(path, str(exc)) from exc


def read_spectra(path, delimiter=","):
    """Load spectra from a CSV, one spectrum per row.

    An empty file yields an empty list; all rows must have equal width.
    """
    rows = _read_rows(path, delimiter)
    spectra = []
    width = None
    for line, row in rows:
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise CsvParseError(
                path, f"ragged row: expected {width} cells, got {len(row)}", row=line
            )
        spectra.append(
            np.array(
                [_parse_cell(path, line, i + 1, cell) for i, cell in enumerate(row)]
            )
        )
    return spectra


def _write_atomic(path, text):
    path = str(path)
    directory = os.path.dirname(path) or "."
    fd, temp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp_path, path)
    except BaseException:
        try:
            os.unlink(temp_path)
        except OSError:
            pass
        raise


def _fmt(value):
    return FLOAT_FORMAT % float(value)


def _json_text(payload):
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_json(payload, path):
    """Serialize any JSON-ready payload atomically."""
    _write_atomic(path, _json_text(payload))


def write_vectors_csv(result, path):
    """Per-acquisition vectors: index, optional time, and the five
    detector outputs."""
    has_time = result.retention_times is not None
    header = ["index"]
    if has_time:
        header.append("time")
    header += ["ticData", "pv", "modPVans", "boolCutOff", "noiseDroppedTIC"]
    lines = [",".join(header)]
    for i in range(result.n_acquisitions):
        cells = [str(i + 1)]
        if has_time:
            cells.append(_fmt(result.retention_times[i]))
        cells += [
            _fmt(result.tic[i]),
            _fmt(result.acquisition_probs[i]),
            _fmt(result.probs_above_cutoff[i]),
            str(int(result.roi_mask[i])),
            _fmt(result.tic_in_rois[i]),
        ]
        lines.append(",".join(cells))
    _write_atomic(path, "\n".join(lines) + "\n")


def write_masked_csv(result, path):
    """The masked intensity matrix, mirroring the input layout: a time
    column when retention times are known, a header row when m/z labels
    are known."""
    lines = []
    if result.mz_axis is not None:
        header = [_fmt(mz) for mz in result.mz_axis]
        if result.retention_times is not None:
            header.insert(0, "time")
        lines.append(",".join(header))
    for i in range(result.n_acquisitions):
        cells = [_fmt(v) for v in result.intensities_in_rois[i]]
        if result.retention_times is not None:
            cells.insert(0, _fmt(result.retention_times[i]))
        lines.append(",".join(cells))
    _write_atomic(path, "\n".join(lines) + "\n")


def _roi_payload(roi):
    return {
        "start_index": roi.start_index,
        "end_index": roi.end_index,
        "start_time": roi.start_time,
        "end_time": roi.end_time,
        "peak_probability": roi.peak_probability,
    }


def write_rois_json(rois, path):
    """Interval list as a JSON array (see docs/rois.schema.json)."""
    _write_atomic(path, _json_text([_roi_payload(r) for r in rois]))


def _config_payload(config):
    return {
        "window": config.window,
        "cutoff": config.cutoff,
        "epsilon": config.epsilon,
        "p_clamp": config.p_clamp,
        "min_roi_len": config.min_roi_len,
    }


def write_report_json(result, path):
    """Run summary: settings echo plus basic counts."""
    payload = {
        "config": _config_payload(result.config),
        "n_acquisitions": result.n_acquisitions,
        "n_channels": int(result.intensities_in_rois.shape[1]),
        "n_rois": len(result.rois),
        "n_flagged": int(result.roi_mask.sum()),
    }
    _write_atomic(path, _json_text(payload))


def write_result(result, out_prefix):
    """Write all four detector artifacts; returns {label: path}."""
    prefix = str(out_prefix)
    paths = {
        "vectors": prefix + ".vectors.csv",
        "noisedropped": prefix + ".noisedropped.csv",
        "rois": prefix + ".rois.json",
        "report": prefix + ".report.json",
    }
    write_vectors_csv(result, paths["vectors"])
    write_masked_csv(result, paths["noisedropped"])
    write_rois_json(result.rois, paths["rois"])
    write_report_json(result, paths["report"])
    return paths


def write_sweep_csv(report, path):
    """One row per (amplitude, seed, peak) cell."""
    lines = ["amplitude,seed,peak_id,detected"]
    for cell in report.cells:
        lines.append(
            f"{_fmt(cell.amplitude)},{cell.seed},{cell.peak_id},{int(cell.detected)}"
        )
    _write_atomic(path, "\n".join(lines) + "\n")


def write_sweep_json(report, path):
    """Aggregate rates keyed by amplitude, with the settings echo."""
    payload = {
        "config": _config_payload(report.config),
        "amplitudes": list(report.amplitudes),
        "seeds": list(report.seeds),
        "n_seeds": report.n_seeds,
        "rates": {_fmt(a): report.rate(a) for a in report.amplitudes},
    }
    _write_atomic(path, _json_text(payload))


def write_synth_truth_json(spec, path):
    """Ground truth for a generated chromatogram: the full recipe plus each
    peak's two-sigma support."""
    from .synth import peak_support

    peaks = []
    for peak in spec.peaks:
        lo, hi = peak_support(peak, spec.rows)
        peaks.append(
            {
                "apex": peak.apex,
                "sigma": peak.sigma,
                "amplitude": peak.amplitude,
                "support": [lo, hi],
            }
        )
    payload = {
        "rows": spec.rows,
        "cols": spec.cols,
        "noise_sigma": spec.noise_sigma,
        "seed": spec.seed,
        "peaks": peaks,
    }
    _write_atomic(path, _json_text(payload))


def write_chromatogram_csv(chromatogram, path, layout=None):
    """Inverse of read_chromatogram for the same layout."""
    if layout is None:
        layout = CsvLayout()
    if layout.has_time_column and chromatogram.retention_times is None:
        raise ValueError("layout wants a time column but none is present")
    if layout.has_header and chromatogram.mz_axis is None:
        raise ValueError("layout wants a header but no m/z labels are present")
    lines = []
    d = layout.delimiter
    if layout.has_header:
        header = [_fmt(mz) for mz in chromatogram.mz_axis]
        if layout.has_time_column:
            header.insert(0, "time")
        lines.append(d.join(header))
    for i in range(chromatogram.n_acquisitions):
        cells = [_fmt(v) for v in chromatogram.intensities[i]]
        if layout.has_time_column:
            cells.insert(0, _fmt(chromatogram.retention_times[i]))
        lines.append(d.join(cells))
    _write_atomic(path, "\n".join(lines) + "\n")
