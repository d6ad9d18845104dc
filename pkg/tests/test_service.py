import json
import math

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

import meltmap as mm
from conftest import ENVELOPE
from meltmap import model_zoo, service
from meltmap.cli import main
from meltmap.dataset import write_csv


@pytest.fixture(scope="module")
def client():
    return TestClient(service.create_app())


@pytest.fixture(scope="module")
def depth_csv_bytes(depth_synth, tmp_path_factory):
    path = tmp_path_factory.mktemp("svc") / "depth.csv"
    write_csv(depth_synth, path)
    return path.read_bytes()


class TestModelsEndpoint:
    def test_lists_nine_models_with_envelope(self, client):
        r = client.get("/models")
        assert r.status_code == 200
        body = r.json()
        assert len(body["models"]) == 9
        assert body["envelope"] == {"power": [50.0, 500.0], "velocity": [100.0, 2000.0]}
        depth = next(m for m in body["models"] if m["id"] == "depth_pv")
        assert depth["target"] == "depth"
        assert depth["inputs"] == ["Power", "Velocity"]
        assert depth["reported_r2_train"] == 0.99


class TestPredictEndpoint:
    def test_single_model(self, client):
        r = client.post(
            "/predict", json={"model_id": "depth_pv", "inputs": {"power": 200, "velocity": 800}}
        )
        assert r.status_code == 200
        body = r.json()
        assert body["value"] == model_zoo.predict("depth_pv", {"power": 200, "velocity": 800})
        assert body["target"] == "depth"
        assert body["out_of_envelope"] is False

    def test_multi_model(self, client):
        ids = list(service.DEFAULT_MODEL_IDS)
        r = client.post(
            "/predict", json={"model_ids": ids, "inputs": {"power": 300, "velocity": 1200}}
        )
        assert r.status_code == 200
        preds = r.json()["predictions"]
        assert set(preds) == set(ids)
        mp = model_zoo.predict_melt_pool(300.0, 1200.0)
        assert preds["depth_pv"]["value"] == mp.depth
        assert preds["length_pv"]["value"] == mp.length

    def test_out_of_envelope_flag(self, client):
        r = client.post(
            "/predict", json={"model_id": "depth_pv", "inputs": {"power": 10, "velocity": 800}}
        )
        assert r.json()["out_of_envelope"] is True

    def test_inline_equation(self, client, depth_synth):
        eq = mm.fit_polynomial(depth_synth, mm.FeatureSpec.of("power", "velocity"), "depth", 2)
        r = client.post(
            "/predict",
            json={"equation": mm.equation_to_json(eq), "inputs": {"power": 200, "velocity": 800}},
        )
        assert r.status_code == 200
        expected = eq.evaluate({"Power": 200.0, "Velocity": 800.0})
        assert r.json()["value"] == expected

    def test_unknown_model_is_404(self, client):
        r = client.post("/predict", json={"model_id": "nope", "inputs": {"power": 1, "velocity": 1}})
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "unknown_model"

    def test_wrong_content_type_is_400(self, client):
        r = client.post("/predict", content=b"power=1", headers={"content-type": "text/plain"})
        assert r.status_code == 400
        assert "error" in r.json()

    def test_invalid_json_is_400(self, client):
        r = client.post(
            "/predict", content=b"{not json", headers={"content-type": "application/json"}
        )
        assert r.status_code == 400

    def test_missing_inputs_is_400(self, client):
        r = client.post("/predict", json={"model_id": "depth_pv"})
        assert r.status_code == 400

    def test_missing_feature_value_is_400(self, client):
        r = client.post("/predict", json={"model_id": "depth_pv", "inputs": {"power": 100}})
        assert r.status_code == 400


class TestSweepEndpoint:
    BODY = {
        "power_range": [100, 200],
        "velocity_range": [500, 700],
        "resolution": 4,
        "models": ["depth_pv", "spatter_pv"],
    }

    def test_matches_cli_byte_for_byte(self, client, tmp_path):
        r = client.post("/sweep", json=self.BODY)
        assert r.status_code == 200
        out = tmp_path / "sweep.json"
        result = CliRunner().invoke(
            main,
            [
                "sweep",
                "--model", "depth_pv",
                "--model", "spatter_pv",
                "--power", "100:200",
                "--velocity", "500:700",
                "--resolution", "4",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert r.content == out.read_bytes()

    def test_cells_match_individual_predictions(self, client):
        r = client.post("/sweep", json=self.BODY)
        body = r.json()
        n_p = len(body["power_axis"])
        for idx in (0, 5, 15):
            p = body["power_axis"][idx % n_p]
            v = body["velocity_axis"][idx // n_p]
            cell = body["cells"][idx]
            assert cell["values"][0] == model_zoo.predict("depth_pv", {"power": p, "velocity": v})
            assert cell["values"][1] == model_zoo.predict("spatter_pv", {"power": p, "velocity": v})

    def test_default_models(self, client):
        r = client.post(
            "/sweep", json={"power_range": [50, 500], "velocity_range": [100, 2000], "resolution": 2}
        )
        ids = [m["id"] for m in r.json()["models"]]
        assert ids == list(service.DEFAULT_MODEL_IDS)

    def test_repeated_requests_identical(self, client):
        a = client.post("/sweep", json=self.BODY).content
        b = client.post("/sweep", json=self.BODY).content
        assert a == b

    def test_oversized_resolution_is_413(self, client):
        r = client.post(
            "/sweep",
            json={"power_range": [50, 500], "velocity_range": [100, 2000], "resolution": 513},
        )
        assert r.status_code == 413
        assert r.json()["error"]["code"] == "too_large"

    def test_undersized_resolution_is_400(self, client):
        r = client.post(
            "/sweep",
            json={"power_range": [50, 500], "velocity_range": [100, 2000], "resolution": 1},
        )
        assert r.status_code == 400

    def test_missing_field_is_400(self, client):
        r = client.post("/sweep", json={"power_range": [50, 500]})
        assert r.status_code == 400

    def test_dims_model_rejected(self, client):
        r = client.post(
            "/sweep",
            json={
                "power_range": [50, 500],
                "velocity_range": [100, 2000],
                "resolution": 2,
                "models": ["spatter_dims"],
            },
        )
        assert r.status_code == 400


class TestEquationsEndpoint:
    def test_zoo_equation(self, client):
        r = client.get("/equations/depth_pv")
        assert r.status_code == 200
        body = r.json()
        assert body["intercept"] == 53.7694
        assert body["base_features"] == ["Power", "Velocity"]
        eq = mm.equation_from_json(body)
        assert eq.evaluate({"Power": 0.0, "Velocity": 0.0}) == 53.7694

    def test_unknown_equation_is_404(self, client):
        r = client.get("/equations/missing")
        assert r.status_code == 404


class TestFitEndpoint:
    def test_multipart_fit_and_fetch(self, client, depth_csv_bytes):
        r = client.post(
            "/fit",
            files={"csv": ("depth.csv", depth_csv_bytes, "text/csv")},
            data={"target": "depth", "degree": "2"},
        )
        assert r.status_code == 200
        body = r.json()
        assert body["degree"] == 2
        assert abs(body["report"]["r2_train"] - 1.0) <= 1e-9
        eq_id = body["id"]
        fetched = client.get(f"/equations/{eq_id}")
        assert fetched.status_code == 200
        assert fetched.json() == body["equation"]

    def test_degree_auto(self, client, depth_csv_bytes):
        r = client.post(
            "/fit",
            files={"csv": ("depth.csv", depth_csv_bytes, "text/csv")},
            data={"target": "depth", "degree": "auto"},
        )
        assert r.status_code == 200
        assert r.json()["degree"] == 2

    def test_bad_csv_is_400(self, client):
        r = client.post(
            "/fit",
            files={"csv": ("bad.csv", b"Power,Speed\n1,2\n", "text/csv")},
            data={"target": "depth"},
        )
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "schema_error"

    def test_oversized_csv_is_413(self, client):
        blob = b"0" * (service.MAX_CSV_BYTES + 1)
        r = client.post(
            "/fit", files={"csv": ("big.csv", blob, "text/csv")}, data={"target": "depth"}
        )
        assert r.status_code == 413

    def test_log_input_fit(self, client, depth_csv_bytes):
        r = client.post(
            "/fit",
            files={"csv": ("depth.csv", depth_csv_bytes, "text/csv")},
            data={"target": "depth", "degree": "2", "input": "power,velocity,log_velocity"},
        )
        assert r.status_code == 200
        assert r.json()["equation"]["base_features"] == ["Power", "Velocity", "log_Velocity"]
