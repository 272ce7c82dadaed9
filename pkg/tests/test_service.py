"""Tests for the HTTP service endpoints."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from frmv.detect import Chromatogram, RoiConfig, detect_rois
from frmv.service.app import app, create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as test_client:
        yield test_client


def _matrix(seed=0, rows=30, cols=5):
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, 1.0, (rows, cols)).tolist()


class TestHealth:
    def test_ok(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestDetectEndpoint:
    def test_matches_direct_call(self, client):
        intensities = _matrix()
        response = client.post(
            "/detect",
            json={"intensities": intensities, "config": {"cutoff": 0.4}},
        )
        assert response.status_code == 200
        payload = response.json()
        direct = detect_rois(
            Chromatogram(np.array(intensities)), RoiConfig(cutoff=0.4)
        )
        assert payload["acquisition_probs"] == direct.acquisition_probs.tolist()
        assert payload["roi_mask"] == [int(v) for v in direct.roi_mask]
        assert len(payload["rois"]) == len(direct.rois)
        for got, expected in zip(payload["rois"], direct.rois):
            assert got["start_index"] == expected.start_index
            assert got["end_index"] == expected.end_index
            assert got["peak_probability"] == expected.peak_probability

    def test_retention_times_round_trip(self, client):
        times = np.linspace(1.0, 2.0, 30).tolist()
        response = client.post(
            "/detect",
            json={
                "intensities": _matrix(),
                "retention_times": times,
                "config": {"cutoff": 0.4},
            },
        )
        assert response.status_code == 200
        assert response.json()["retention_times"] == times

    def test_domain_error_is_400(self, client):
        response = client.post(
            "/detect",
            json={"intensities": _matrix(), "config": {"window": 2}},
        )
        assert response.status_code == 400
        assert "window" in response.json()["detail"]

    def test_window_exceeding_rows_is_400(self, client):
        response = client.post(
            "/detect",
            json={"intensities": _matrix(rows=5), "config": {"window": 9}},
        )
        assert response.status_code == 400

    def test_malformed_payload_is_422(self, client):
        response = client.post("/detect", json={"intensities": "nonsense"})
        assert response.status_code == 422

    def test_unknown_field_rejected(self, client):
        response = client.post(
            "/detect", json={"intensities": _matrix(), "bogus": 1}
        )
        assert response.status_code == 422


class TestSynthEndpoint:
    def test_deterministic(self, client):
        request = {
            "rows": 20,
            "cols": 4,
            "peaks": [{"apex": 10.0, "sigma": 2.0, "amplitude": 30.0}],
            "seed": 5,
        }
        first = client.post("/synth", json=request)
        second = client.post("/synth", json=request)
        assert first.status_code == 200
        assert first.json() == second.json()

    def test_truth_support_included(self, client):
        response = client.post(
            "/synth",
            json={
                "rows": 300,
                "cols": 4,
                "peaks": [{"apex": 100.0, "sigma": 3.0, "amplitude": 50.0}],
            },
        )
        assert response.status_code == 200
        payload = response.json()
        assert payload["peaks"][0]["support"] == [94, 106]
        assert len(payload["intensities"]) == 300

    def test_bad_spec_is_400(self, client):
        response = client.post(
            "/synth",
            json={
                "rows": 10,
                "cols": 4,
                "peaks": [{"apex": 99.0, "sigma": 1.0, "amplitude": 1.0}],
            },
        )
        assert response.status_code == 400


class TestSweepEndpoint:
    def test_small_sweep(self, client):
        response = client.post(
            "/sweep",
            json={
                "template": {
                    "rows": 60,
                    "cols": 6,
                    "peaks": [{"apex": 30.0, "sigma": 3.0, "amplitude": 1.0}],
                },
                "amplitudes": [0.0, 50.0],
                "seeds": [0, 1],
                "config": {"window": 5},
            },
        )
        assert response.status_code == 200
        payload = response.json()
        assert len(payload["cells"]) == 4
        assert set(payload["rates"]) == {"0", "50"}
        assert payload["config"]["window"] == 5

    def test_empty_amplitudes_is_400(self, client):
        response = client.post(
            "/sweep",
            json={
                "template": {
                    "rows": 60,
                    "cols": 6,
                    "peaks": [{"apex": 30.0, "sigma": 3.0, "amplitude": 1.0}],
                },
                "amplitudes": [],
                "seeds": [0],
            },
        )
        assert response.status_code == 400


class TestMatchEndpoint:
    def test_ranking_order(self, client):
        response = client.post(
            "/match",
            json={
                "queries": [[1.0, 2.0, 3.0]],
                "library": [[3.0, 2.0, 1.0], [1.0, 2.0, 3.0], [0.5, 1.0, 1.5]],
            },
        )
        assert response.status_code == 200
        ranking = response.json()["rankings"][0]
        assert [entry["library_index"] for entry in ranking] == [2, 3, 1]
        assert ranking[0]["match_factor"] == 100.0

    def test_empty_library(self, client):
        response = client.post("/match", json={"queries": [[1.0, 2.0]]})
        assert response.status_code == 200
        assert response.json() == {"rankings": [[]]}

    def test_zero_vector_is_400(self, client):
        response = client.post(
            "/match",
            json={"queries": [[0.0, 0.0]], "library": [[1.0, 2.0]]},
        )
        assert response.status_code == 400


class TestAppFactory:
    def test_create_app_builds_fresh_instances(self):
        assert create_app() is not app
