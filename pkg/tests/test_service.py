import math

import numpy as np
import pytest
from starlette.testclient import TestClient

from gatelab.serialize import dumps_report
from gatelab.service import app

client = TestClient(app)


def post(path, payload):
    return client.post(path, json=payload)


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["name"] == "gatelab"
    assert body["schema_version"] == "gatelab.report/1"


def test_recipes_endpoint_lists_catalog():
    body = client.get("/recipes").json()
    names = {e["name"] for e in body["entries"]}
    assert {"fig2b", "fig3b", "path7", "grid3x3"} <= names
    flags = {e["name"]: e["reconstructed"] for e in body["entries"]}
    assert flags["fig5"] and not flags["fig2b"]


# ---------------------------------------------------------------------------
# regime


def test_regime_squid_passes():
    body = post("/regime", {"preset": "squid"}).json()
    assert body["passed"] is True
    values = {r["name"]: r["value"] for r in body["ratios"]}
    assert values["delta1/g"] == pytest.approx(20.0)
    assert body["schema_version"] == "gatelab.report/1"


def test_regime_threshold_25_reports_failure():
    body = post("/regime", {"preset": "squid", "min_ratio": 25}).json()
    assert body["passed"] is False
    assert any(not r["passes"] for r in body["ratios"])


def test_regime_custom_params():
    payload = {
        "preset": "custom",
        "custom": {"omega": 1.05, "delta1": 2.0, "delta2": 3.0},
    }
    body = post("/regime", payload).json()
    assert body["passed"] is False


def test_custom_requires_parameters():
    resp = post("/regime", {"preset": "custom"})
    assert resp.status_code == 422  # request-model validation


def test_unknown_preset_is_404():
    assert post("/regime", {"preset": "warpcore"}).status_code == 404


# ---------------------------------------------------------------------------
# cz


def test_cz_diagonal_model_report():
    body = post("/cz", {"preset": "squid", "model": "eff_diag",
                        "n_samples": 4}).json()
    assert body["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert body["pair_rate"] == pytest.approx(5.2531e-3, rel=1e-4)
    assert body["gate_time_seconds"] == pytest.approx(3.3224e-6, rel=1e-4)
    assert len(body["timeseries"]) == 4
    assert body["timeseries"][-1]["t"] == pytest.approx(body["gate_time"])
    assert body["regime_passed"] is True


def test_cz_ion_reports_both_rate_readings():
    body = post("/cz", {"preset": "ion"}).json()
    assert body["model"] is None
    assert body["gate_time_seconds"] == pytest.approx(math.pi / 1e4)
    assert body["gate_time_seconds_cyclic_rate"] == pytest.approx(5e-5)
    assert body["notes"]


def test_cz_excessive_leakage_is_physics_422():
    payload = {
        "preset": "custom",
        "custom": {"omega": 2.0, "delta1": 4.0, "delta2": 2.0},
        "model": "full", "n_atoms": 1, "n_max": 2, "t": 40.0,
        "n_samples": 2,
    }
    with pytest.warns(UserWarning):
        resp = post("/cz", payload)
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "physics"


# ---------------------------------------------------------------------------
# budget


def test_budget_nominal_squid():
    body = post("/budget", {"preset": "squid",
                            "include_measured": False}).json()
    nominal = body["nominal"]
    assert nominal["t_relax_eff_seconds"] == pytest.approx(7.6e-5, rel=1e-12)
    assert nominal["t_cavity_eff_seconds"] == pytest.approx(7.6e-5, rel=1e-12)
    assert nominal["headroom"] == pytest.approx(7.6e-5 / 3.3224e-6, rel=1e-4)
    assert body["measured"] is None


def test_budget_ion_headroom():
    body = post("/budget", {"preset": "ion"}).json()
    assert body["nominal"]["headroom"] == pytest.approx(100 / math.pi, rel=1e-12)
    assert body["gate_time_seconds_cyclic_rate"] == pytest.approx(5e-5)


# ---------------------------------------------------------------------------
# fuse


def test_fuse_named_recipe():
    body = post("/fuse", {"recipe": "fig2b"}).json()
    assert body["status"] == "equivalent"
    assert body["witness"] == [3]
    assert body["statevector_verified"] is True
    assert "graph final {" in body["final_dot"]
    assert body["final_adjacency"].startswith("7\n")


def test_fuse_plan_text():
    plan = "n_qubits = 3\nstep = entangle 0 1 2\ntarget = 0-1 1-2\n"
    body = post("/fuse", {"plan_text": plan}).json()
    assert body["status"] == "equivalent"
    assert len(body["witness"]) == 1


def test_fuse_cap_reached_status():
    body = post("/fuse", {"recipe": "fig3b", "orbit_cap": 2}).json()
    assert body["status"] == "cap_reached"
    assert body["witness"] is None


def test_fuse_unknown_recipe_is_usage_error():
    resp = post("/fuse", {"recipe": "fig99"})
    assert resp.status_code == 400
    assert resp.json()["detail"]["code"] == "usage"


def test_fuse_requires_exactly_one_source():
    assert post("/fuse", {}).status_code == 422
    plan = "n_qubits = 2\nstep = cz 0 1\ntarget = 0-1\n"
    assert post("/fuse", {"recipe": "fig2a", "plan_text": plan}).status_code == 422


def test_fuse_malformed_plan_text_is_usage_error():
    resp = post("/fuse", {"plan_text": "n_qubits = 3\nstep = warp 1\ntarget = 0-1"})
    assert resp.status_code == 400


# ---------------------------------------------------------------------------
# sweep


def test_sweep_time_grid_slope_matches_pair_rate():
    t_gate = math.pi / 0.005253125
    values = [k / 16 * t_gate for k in range(1, 17)]
    body = post("/sweep", {"preset": "squid", "param": "t",
                           "values": values, "metric": "phase",
                           "model": "eff_diag"}).json()
    xs = np.array([r["value"] for r in body["rows"]])
    ys = np.unwrap([r["metric_value"] for r in body["rows"]])
    slope = np.polyfit(xs, ys, 1)[0]
    assert slope == pytest.approx(0.005253125, rel=0.05)


def test_sweep_detuning_scale_deviation_is_monotone():
    # micromotion-averaged horizon makes the three-point sweep cheap
    body = post("/sweep", {"preset": "squid", "param": "delta-scale",
                           "values": [1, 2, 4], "metric": "phase-deviation",
                           "model": "full"}).json()
    col = [r["metric_value"] for r in body["rows"]]
    assert col[0] > col[1] > col[2]


def test_sweep_rejects_empty_grid():
    resp = post("/sweep", {"preset": "squid", "param": "t", "values": [],
                           "metric": "phase"})
    assert resp.status_code == 422  # length enforced by the request model


def test_sweep_rejects_rate_only_preset():
    resp = post("/sweep", {"preset": "ion", "param": "t", "values": [1.0],
                           "metric": "phase"})
    assert resp.status_code == 400


# ---------------------------------------------------------------------------
# determinism


def test_identical_requests_give_byte_identical_reports():
    payload = {"preset": "squid", "model": "eff_diag", "n_samples": 3}
    a = post("/cz", payload).json()
    b = post("/cz", payload).json()
    assert dumps_report(a) == dumps_report(b)
