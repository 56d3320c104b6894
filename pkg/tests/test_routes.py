import logging
import math

import pytest

from src.models.run import ExperimentRun
from src.services import registry
from src.services.registry import record_run


def make_summary(scenario, passed):
    return {'scenario': scenario, 'digest': 'f' * 64, 'pass': passed, 'exponent': None,
            'max_residual': 1e-5, 'checks': [], 'metrics': {}, 'files': ['summary.json']}


def test_health(client):
    """Health endpoint responds with status ok."""
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json["status"] == "ok"


def test_cone(client):
    """Cone coordinates for a point inside the light cone."""
    response = client.get("/api/lab/cone?t=5&x=3")
    assert response.status_code == 200
    assert response.json["tau"] == pytest.approx(4.0)
    assert response.json["w0"] == pytest.approx(2.0)
    assert response.json["z0"] == pytest.approx(0.5)
    assert response.json["scale"] == pytest.approx(0.5)


def test_cone_outside_light_cone(client):
    """Points outside the light cone and missing x are client errors."""
    assert client.get("/api/lab/cone?t=1&x=2").status_code == 400
    assert client.get("/api/lab/cone?t=1").status_code == 400


def test_soliton(client):
    """One-soliton fields and parameters at unit modulus."""
    response = client.post("/api/lab/soliton", json={"lambda": [-math.sqrt(0.5), math.sqrt(0.5)],
                                                     "C": [1, 0], "t": 0, "x": [0.0, 1.0]})
    assert response.status_code == 200
    assert response.json["parameters"]["nu"] == pytest.approx(0.0, abs=1e-14)
    re_u, im_u = response.json["u"][0]
    assert math.hypot(re_u, im_u) == pytest.approx(math.sqrt(2.0))


def test_soliton_bad_input(client):
    """An eigenvalue outside the second quadrant is rejected."""
    response = client.post("/api/lab/soliton", json={"lambda": [0.5, 0.5], "C": [1, 0], "x": [0.0]})
    assert response.status_code == 400
    assert "error" in response.json


def test_predict(client):
    """Radiation predictions for analytic reflection data."""
    response = client.post("/api/lab/predict", json={"amplitude": 0.2, "points": [[50, 10], [100, 20]]})
    assert response.status_code == 200
    assert len(response.json["predictions"]) == 2
    assert client.post("/api/lab/predict", json={"points": []}).status_code == 400


def test_runs_registry(client, db):
    """Registered runs are listed, filtered and fetched by id."""
    record_run(make_summary("roundtrip", True), "runs/run-a")
    record_run(make_summary("b_equality", False), "runs/run-b")
    assert db.session.query(ExperimentRun).count() == 2

    response = client.get("/api/lab/runs")
    assert response.status_code == 200
    assert response.json["total"] == 2

    response = client.get("/api/lab/runs?scenario=roundtrip")
    assert [r["run_dir"] for r in response.json["runs"]] == ["runs/run-a"]

    response = client.get("/api/lab/runs?passed=false")
    assert [r["scenario"] for r in response.json["runs"]] == ["b_equality"]

    run_id = response.json["runs"][0]["id"]
    detail = client.get(f"/api/lab/runs/{run_id}")
    assert detail.status_code == 200
    assert detail.json["run"]["summary"]["pass"] is False
    assert client.get("/api/lab/runs/9999").status_code == 404


def test_runs_registry_failure_is_logged(client, monkeypatch, caplog):
    """A registry error becomes a 500 and is logged."""
    def broken(*args, **kwargs):
        raise RuntimeError("registry offline")

    monkeypatch.setattr(registry, "list_runs", broken)
    monkeypatch.setattr(registry, "get_run", broken)
    with caplog.at_level(logging.ERROR, logger="src.routes.lab"):
        assert client.get("/api/lab/runs").status_code == 500
        response = client.get("/api/lab/runs/1")
    assert response.status_code == 500
    assert response.json["error"] == "registry offline"
    messages = [r.getMessage() for r in caplog.records if r.levelno == logging.ERROR]
    assert "Run listing failed: registry offline" in messages
    assert "Run lookup failed: registry offline" in messages
