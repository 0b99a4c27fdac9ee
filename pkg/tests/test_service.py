import pytest
from fastapi.testclient import TestClient

from outlierlab.service import app

client = TestClient(app)

GAUSS = [0, 0, 0.5]


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_analyze_supercritical():
    resp = client.post("/analyze", json={"potential": GAUSS, "a": 2.0})
    assert resp.status_code == 200
    res = resp.json()["result"]
    assert res["regime"] == "Supercritical"
    assert res["a_star"] == pytest.approx(2.5, abs=1e-8)
    assert res["a_c"] == pytest.approx(1.0, abs=1e-8)
    assert resp.json()["schema_version"] == 1
    assert resp.json()["config"]["potential"] == [0.0, 0.0, 0.5]


def test_analyze_quartic_convex_subcritical():
    resp = client.post("/analyze", json={"potential": [0, 0, 0, 0, 0.25], "a": 0.1})
    assert resp.status_code == 200
    assert resp.json()["result"]["regime"] == "Subcritical"


def test_analyze_sweep():
    resp = client.post("/analyze", json={"potential": GAUSS,
                                         "sweep": [0.5, 2.0]})
    assert resp.status_code == 200
    sweep = resp.json()["result"]["sweep"]
    assert [s["regime"] for s in sweep] == ["Subcritical", "Supercritical"]


def test_analyze_rejects_both_a_and_sweep():
    resp = client.post("/analyze", json={"potential": GAUSS, "a": 1.0,
                                         "sweep": [1.0]})
    assert resp.status_code == 422


def test_analyze_bad_potential():
    resp = client.post("/analyze", json={"potential": [0, 1], "a": 1.0})
    assert resp.status_code == 400


def test_predict_supercritical_grid_mass():
    resp = client.post("/predict", json={
        "potential": GAUSS, "a": 2.0, "n": 400, "r": 1,
        "grid": {"x_min": 2.2, "x_max": 2.8, "points": 201}})
    assert resp.status_code == 200
    res = resp.json()["result"]
    assert res["regime"] == "Supercritical"
    assert res["grid_mass_times_n"] == pytest.approx(1.0, abs=0.1)


def test_predict_subcritical_returns_statement():
    resp = client.post("/predict", json={
        "potential": GAUSS, "a": 0.5, "n": 400, "r": 1})
    assert resp.status_code == 200
    res = resp.json()["result"]
    assert res["regime"] == "Subcritical"
    assert res["suppression"]["center"] == pytest.approx(2.5, abs=1e-8)


def test_predict_critical_refused():
    resp = client.post("/predict", json={
        "potential": GAUSS, "a": 1.0, "n": 400, "r": 1})
    assert resp.status_code == 409


def test_predict_kappa_guard():
    resp = client.post("/predict", json={
        "potential": GAUSS, "a": 2.0, "n": 8, "r": 2})
    assert resp.status_code == 400


def test_oracle_endpoint():
    resp = client.post("/oracle", json={
        "potential": GAUSS, "a": 2.0, "n": 12, "r": 1,
        "intervals": [[2.2, 2.8]]})
    assert resp.status_code == 200
    res = resp.json()["result"]
    assert res["trace"] == pytest.approx(12.0, abs=1e-10)
    assert 0.3 < res["expected_counts"][0]["count"] < 1.2


def test_oracle_precision_guard():
    resp = client.post("/oracle", json={
        "potential": GAUSS, "a": 2.0, "n": 12, "r": 1, "precision_bits": 64})
    assert resp.status_code == 400


def test_mc_endpoint_deterministic():
    body = {"potential": GAUSS, "a": 2.0, "n": 100, "r": 1,
            "trials": 30, "seed": 5}
    r1 = client.post("/mc", json=body)
    r2 = client.post("/mc", json=body)
    assert r1.status_code == 200
    assert r1.content == r2.content
    assert "wall_time" not in r1.json()["result"]


def test_mc_non_gaussian_refused():
    resp = client.post("/mc", json={"potential": [0, 0, 0, 0, 0.25], "a": 2.0,
                                    "n": 100, "r": 1, "trials": 10, "seed": 1})
    assert resp.status_code == 400
    assert "Gaussian" in resp.json()["detail"]


def test_mc_escape_mode():
    resp = client.post("/mc", json={"potential": GAUSS, "a": 0.5, "n": 100,
                                    "r": 1, "trials": 40, "seed": 2,
                                    "mode": "escape"})
    assert resp.status_code == 200
    assert resp.json()["result"]["escape_rate"] <= 0.05


def test_compare_oracle_subcritical_passes():
    resp = client.post("/compare", json={
        "potential": GAUSS, "a": 0.5, "n": 20, "r": 1, "method": "oracle"})
    assert resp.status_code == 200
    assert resp.json()["result"]["pass"] is True


def test_compare_regime_mismatch():
    resp = client.post("/compare", json={
        "potential": GAUSS, "a": 0.5, "n": 20, "r": 1, "method": "oracle",
        "expect_regime": "Supercritical"})
    assert resp.status_code == 400
