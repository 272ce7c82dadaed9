"""Tests for CSV/JSON reading and writing."""

import json
import os

import jsonschema
import numpy as np
import pytest

from frmv.detect import Chromatogram, RoiConfig, detect_rois
from frmv.io import (
    CsvLayout,
    CsvParseError,
    read_chromatogram,
    read_spectra,
    write_chromatogram_csv,
    write_masked_csv,
    write_result,
    write_rois_json,
    write_report_json,
    write_sweep_csv,
    write_sweep_json,
    write_synth_truth_json,
    write_vectors_csv,
)
from frmv.synth import GaussianPeak, SyntheticSpec, generate, sweep

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "..", "docs", "rois.schema.json")


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _sample_result(seed=0, with_axes=False):
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, 1.0, (30, 5))
    kwargs = {}
    if with_axes:
        kwargs["retention_times"] = np.linspace(1.0, 4.0, 30)
        kwargs["mz_axis"] = np.arange(50.0, 55.0)
    return detect_rois(Chromatogram(x, **kwargs), RoiConfig(cutoff=0.4))


class TestCsvLayout:
    def test_defaults(self):
        layout = CsvLayout()
        assert not layout.has_header
        assert not layout.has_time_column
        assert layout.delimiter == ","

    @pytest.mark.parametrize("delimiter", ["5", "-", ".", "\n", "\r", "", ",,"])
    def test_rejects_bad_delimiter(self, delimiter):
        with pytest.raises(ValueError):
            CsvLayout(delimiter=delimiter)

    @pytest.mark.parametrize("delimiter", [";", "\t", "|", " "])
    def test_accepts_common_delimiters(self, delimiter):
        assert CsvLayout(delimiter=delimiter).delimiter == delimiter


class TestReadChromatogram:
    def test_plain_matrix(self, tmp_path):
        path = _write(
            tmp_path / "x.csv", "1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n"
        )
        chrom = read_chromatogram(path)
        assert chrom.n_acquisitions == 5
        assert chrom.n_channels == 3
        assert chrom.retention_times is None
        assert chrom.mz_axis is None
        np.testing.assert_array_equal(chrom.intensities[0], [1.0, 2.0, 3.0])

    def test_time_column(self, tmp_path):
        path = _write(
            tmp_path / "x.csv", "1,2,3\n2,5,6\n3,8,9\n4,11,12\n5,14,15\n"
        )
        chrom = read_chromatogram(path, CsvLayout(has_time_column=True))
        assert chrom.n_acquisitions == 5
        assert chrom.n_channels == 2
        np.testing.assert_array_equal(chrom.retention_times, [1, 2, 3, 4, 5])

    def test_header_row(self, tmp_path):
        path = _write(tmp_path / "x.csv", "50,51\n1,2\n3,4\n5,6\n")
        chrom = read_chromatogram(path, CsvLayout(has_header=True))
        assert chrom.n_acquisitions == 3
        np.testing.assert_array_equal(chrom.mz_axis, [50.0, 51.0])

    def test_header_and_time(self, tmp_path):
        path = _write(tmp_path / "x.csv", "rt,50,51\n1,1,2\n2,3,4\n3,5,6\n")
        layout = CsvLayout(has_header=True, has_time_column=True)
        chrom = read_chromatogram(path, layout)
        assert chrom.n_channels == 2
        np.testing.assert_array_equal(chrom.retention_times, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(chrom.mz_axis, [50.0, 51.0])

    def test_nan_cell_named(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1,2\n3,NaN\n5,6\n")
        with pytest.raises(CsvParseError, match=r"x\.csv:2:2") as err:
            read_chromatogram(path)
        assert err.value.row == 2
        assert err.value.column == 2

    def test_inf_cell_rejected(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1,2\n3,inf\n5,6\n")
        with pytest.raises(CsvParseError):
            read_chromatogram(path)

    def test_text_cell_named(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1,2\n3,4\nfive,6\n")
        with pytest.raises(CsvParseError, match=r"x\.csv:3:1"):
            read_chromatogram(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1,2\n3,4,5\n6,7\n")
        with pytest.raises(CsvParseError, match="ragged"):
            read_chromatogram(path)

    def test_too_few_rows_rejected(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1,2\n3,4\n")
        with pytest.raises(CsvParseError):
            read_chromatogram(path)

    def test_empty_file_rejected(self, tmp_path):
        path = _write(tmp_path / "x.csv", "")
        with pytest.raises(CsvParseError, match="no data rows"):
            read_chromatogram(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CsvParseError, match="cannot read"):
            read_chromatogram(str(tmp_path / "absent.csv"))

    def test_nonmonotone_times_rejected(self, tmp_path):
        path = _write(tmp_path / "x.csv", "2,1\n1,2\n3,3\n")
        with pytest.raises(CsvParseError, match="increasing"):
            read_chromatogram(path, CsvLayout(has_time_column=True))

    def test_semicolon_delimiter(self, tmp_path):
        path = _write(tmp_path / "x.csv", "1;2\n3;4\n5;6\n")
        chrom = read_chromatogram(path, CsvLayout(delimiter=";"))
        assert chrom.n_channels == 2

    def test_header_width_mismatch(self, tmp_path):
        path = _write(tmp_path / "x.csv", "50,51,52\n1,2\n3,4\n5,6\n")
        with pytest.raises(CsvParseError, match="labels"):
            read_chromatogram(path, CsvLayout(has_header=True))


class TestReadSpectra:
    def test_rows_parsed(self, tmp_path):
        path = _write(tmp_path / "s.csv", "1,2,3\n4,5,6\n")
        spectra = read_spectra(path)
        assert len(spectra) == 2
        np.testing.assert_array_equal(spectra[1], [4.0, 5.0, 6.0])

    def test_empty_file_gives_empty_list(self, tmp_path):
        path = _write(tmp_path / "s.csv", "")
        assert read_spectra(path) == []

    def test_ragged_rejected(self, tmp_path):
        path = _write(tmp_path / "s.csv", "1,2,3\n4,5\n")
        with pytest.raises(CsvParseError, match="ragged"):
            read_spectra(path)

    def test_bad_cell_rejected(self, tmp_path):
        path = _write(tmp_path / "s.csv", "1,2\n3,x\n")
        with pytest.raises(CsvParseError, match=r"s\.csv:2:2"):
            read_spectra(path)


class TestChromatogramRoundTrip:
    @pytest.mark.parametrize("has_header", [False, True])
    @pytest.mark.parametrize("has_time", [False, True])
    def test_lossless_all_layouts(self, tmp_path, has_header, has_time):
        rng = np.random.default_rng(14)
        x = rng.normal(0.0, 1.0, (6, 4))
        x[0, 0] = 1e-300
        x[1, 1] = -1e300
        x[2, 2] = 0.1 + 0.2
        x[3, 3] = 0.0
        chrom = Chromatogram(
            x,
            retention_times=np.linspace(0.5, 3.0, 6) if has_time else None,
            mz_axis=np.array([50.1, 51.2, 52.3, 53.4]) if has_header else None,
        )
        layout = CsvLayout(has_header=has_header, has_time_column=has_time)
        path = tmp_path / "x.csv"
        write_chromatogram_csv(chrom, path, layout)
        back = read_chromatogram(str(path), layout)
        np.testing.assert_array_equal(back.intensities, chrom.intensities)
        if has_time:
            np.testing.assert_array_equal(back.retention_times, chrom.retention_times)
        if has_header:
            np.testing.assert_array_equal(back.mz_axis, chrom.mz_axis)

    def test_layout_requires_matching_axes(self, tmp_path):
        chrom = Chromatogram(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            write_chromatogram_csv(chrom, tmp_path / "x.csv", CsvLayout(has_time_column=True))
        with pytest.raises(ValueError):
            write_chromatogram_csv(chrom, tmp_path / "x.csv", CsvLayout(has_header=True))


class TestWriteVectors:
    def test_plain_layout(self, tmp_path):
        result = _sample_result()
        path = tmp_path / "out.vectors.csv"
        write_vectors_csv(result, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "index,ticData,pv,modPVans,boolCutOff,noiseDroppedTIC"
        assert len(lines) == 1 + result.n_acquisitions
        first = lines[1].split(",")
        assert first[0] == "1"
        assert len(first) == 6

    def test_time_layout(self, tmp_path):
        result = _sample_result(with_axes=True)
        path = tmp_path / "out.vectors.csv"
        write_vectors_csv(result, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "index,time,ticData,pv,modPVans,boolCutOff,noiseDroppedTIC"
        assert len(lines) == 1 + result.n_acquisitions

    def test_mask_column_is_integral(self, tmp_path):
        result = _sample_result()
        path = tmp_path / "out.vectors.csv"
        write_vectors_csv(result, path)
        for line in path.read_text().splitlines()[1:]:
            assert line.split(",")[4] in {"0", "1"}


class TestWriteMasked:
    def test_round_trips_masked_matrix(self, tmp_path):
        result = _sample_result(with_axes=True)
        path = tmp_path / "out.noisedropped.csv"
        write_masked_csv(result, path)
        layout = CsvLayout(has_header=True, has_time_column=True)
        back = read_chromatogram(str(path), layout)
        np.testing.assert_array_equal(back.intensities, result.intensities_in_rois)
        np.testing.assert_array_equal(back.retention_times, result.retention_times)
        np.testing.assert_array_equal(back.mz_axis, result.mz_axis)

    def test_plain_layout_round_trip(self, tmp_path):
        result = _sample_result()
        path = tmp_path / "out.noisedropped.csv"
        write_masked_csv(result, path)
        back = read_chromatogram(str(path))
        np.testing.assert_array_equal(back.intensities, result.intensities_in_rois)


class TestWriteRois:
    def test_empty_list(self, tmp_path):
        path = tmp_path / "out.rois.json"
        write_rois_json([], path)
        assert json.loads(path.read_text()) == []

    def test_entries_and_schema(self, tmp_path):
        result = _sample_result(with_axes=True)
        assert result.rois, "sample should flag something at cutoff 0.4"
        path = tmp_path / "out.rois.json"
        write_rois_json(result.rois, path)
        payload = json.loads(path.read_text())
        with open(SCHEMA_PATH, encoding="utf-8") as handle:
            schema = json.load(handle)
        jsonschema.validate(payload, schema)
        assert payload[0]["start_index"] == result.rois[0].start_index
        assert payload[0]["peak_probability"] == result.rois[0].peak_probability
        assert isinstance(payload[0]["start_time"], float)

    def test_null_times_validate(self, tmp_path):
        result = _sample_result()
        path = tmp_path / "out.rois.json"
        write_rois_json(result.rois, path)
        payload = json.loads(path.read_text())
        with open(SCHEMA_PATH, encoding="utf-8") as handle:
            schema = json.load(handle)
        jsonschema.validate(payload, schema)
        assert all(r["start_time"] is None for r in payload)


class TestWriteReport:
    def test_counts_and_echo(self, tmp_path):
        result = _sample_result()
        path = tmp_path / "out.report.json"
        write_report_json(result, path)
        payload = json.loads(path.read_text())
        assert payload["config"] == {
            "window": 10,
            "cutoff": 0.4,
            "epsilon": 0.0,
            "p_clamp": 1.0 - 1e-12,
            "min_roi_len": 0,
        }
        assert payload["n_acquisitions"] == 30
        assert payload["n_channels"] == 5
        assert payload["n_rois"] == len(result.rois)
        assert payload["n_flagged"] == int(result.roi_mask.sum())


class TestWriteResult:
    def test_writes_four_files(self, tmp_path):
        result = _sample_result()
        paths = write_result(result, tmp_path / "run")
        assert set(paths) == {"vectors", "noisedropped", "rois", "report"}
        for path in paths.values():
            assert os.path.exists(path)

    def test_deterministic_bytes(self, tmp_path):
        result = _sample_result()
        first = write_result(result, tmp_path / "a")
        second = write_result(result, tmp_path / "b")
        for key in first:
            with open(first[key], "rb") as fa, open(second[key], "rb") as fb:
                assert fa.read() == fb.read()


class TestSweepWriters:
    def _report(self):
        template = SyntheticSpec(
            rows=60,
            cols=6,
            peaks=(GaussianPeak(apex=30.0, sigma=3.0, amplitude=1.0),),
            noise_sigma=1.0,
            seed=0,
        )
        return sweep(template, [0.0, 50.0], [0, 1, 2], config=RoiConfig(window=5))

    def test_csv_rows(self, tmp_path):
        report = self._report()
        path = tmp_path / "sweep.csv"
        write_sweep_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "amplitude,seed,peak_id,detected"
        assert len(lines) == 1 + len(report.cells)
        assert lines[1].split(",")[3] in {"0", "1"}

    def test_json_summary(self, tmp_path):
        report = self._report()
        path = tmp_path / "sweep.json"
        write_sweep_json(report, path)
        payload = json.loads(path.read_text())
        assert payload["config"]["window"] == 5
        assert payload["amplitudes"] == [0.0, 50.0]
        assert payload["seeds"] == [0, 1, 2]
        assert payload["n_seeds"] == 3
        assert payload["rates"]["50"] == report.rate(50.0)


class TestSynthTruth:
    def test_single_peak_truth(self, tmp_path):
        spec = SyntheticSpec(
            rows=300,
            cols=40,
            peaks=(GaussianPeak(apex=100.0, sigma=3.0, amplitude=50.0),),
            noise_sigma=1.0,
            seed=7,
        )
        path = tmp_path / "truth.json"
        write_synth_truth_json(spec, path)
        payload = json.loads(path.read_text())
        assert payload["rows"] == 300
        assert payload["seed"] == 7
        assert payload["peaks"] == [
            {"apex": 100.0, "sigma": 3.0, "amplitude": 50.0, "support": [94, 106]}
        ]


class TestAtomicWrites:
    def test_failed_rename_leaves_no_partial_output(self, tmp_path):
        result = _sample_result()
        target = tmp_path / "blocked.vectors.csv"
        target.mkdir()  # rename onto a directory must fail
        with pytest.raises(OSError):
            write_vectors_csv(result, target)
        leftovers = [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]
        assert leftovers == []

    def test_write_into_missing_directory_raises(self, tmp_path):
        result = _sample_result()
        with pytest.raises(OSError):
            write_vectors_csv(result, tmp_path / "absent" / "out.csv")
