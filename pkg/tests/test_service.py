"""HTTP trajectory service: endpoints, error mapping, determinism."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from activelr.service import DEFAULT_MAX_ITERS, create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def run_body(**overrides):
    body = {"objective": "saddle", "optimizer": "adamw", "active": True,
            "alpha0": 1e-3, "iterations": 100, "seed": 0}
    body.update(overrides)
    return body


def test_healthz_says_ok(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_objectives_lists_exactly_the_five(client):
    resp = client.get("/api/objectives")
    assert resp.status_code == 200
    entries = resp.json()["objectives"]
    assert [e["name"] for e in entries] == [
        "cubic", "multimodal", "saddle", "quadratic", "mse_line"]
    for e in entries:
        assert len(e["default_init"]) == e["dim"]
        assert len(e["suggested_bounds"]) == e["dim"]
        for lo, hi in e["suggested_bounds"]:
            assert lo < hi


def test_objectives_response_is_stable(client):
    assert (client.get("/api/objectives").content
            == client.get("/api/objectives").content)


def test_saddle_run_approaches_a_global_minimum(client):
    resp = client.post("/api/run", json=run_body(init_point=[0.5, 0.1]))
    assert resp.status_code == 200
    body = resp.json()
    assert body["objective"] == "saddle"
    assert not body["diverged"]
    dists = [min(np.hypot(p["params"][0], p["params"][1] - 1.0),
                 np.hypot(p["params"][0], p["params"][1] + 1.0))
             for p in body["points"]]
    assert min(dists) < 0.1


def test_point_count_is_bounded_by_iterations_plus_one(client):
    for iters in (1, 7, 100):
        body = client.post("/api/run", json=run_body(iterations=iters)).json()
        assert len(body["points"]) <= iters + 1
        assert body["points"][0]["iter"] == 0


def test_zero_iterations_returns_the_initial_point_only(client):
    resp = client.post("/api/run",
                       json=run_body(iterations=0, init_point=[0.5, 0.1]))
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["points"]) == 1
    point = body["points"][0]
    assert point["iter"] == 0
    assert point["params"] == [0.5, 0.1]
    assert np.isfinite(point["loss"])


def test_identical_requests_give_byte_identical_bodies(client):
    payload = run_body(init_point=[0.4, 0.2], seed=11)
    first = client.post("/api/run", json=payload).content
    other = client.post("/api/run", json=run_body(objective="quadratic",
                                                  seed=5)).content
    again = client.post("/api/run", json=payload).content
    assert first == again
    assert first != other


def test_divergence_is_a_flag_not_a_500(client):
    resp = client.post("/api/run", json=run_body(
        objective="quadratic", optimizer="sgd_momentum", active=False,
        alpha0=100.0, iterations=50))
    assert resp.status_code == 200
    body = resp.json()
    assert body["diverged"] is True
    assert len(body["points"]) < 51
    for p in body["points"]:
        assert np.isfinite(p["loss"])


def test_two_dimensional_objectives_carry_a_contour(client):
    body = client.post("/api/run", json=run_body(iterations=1)).json()
    assert body["curve"] is None
    contour = body["contour"]
    assert contour["resolution"] == 101
    assert len(contour["values"]) == 101
    assert len(contour["values"][0]) == 101
    (x_lo, x_hi), (y_lo, y_hi) = contour["bounds"]
    assert x_lo < x_hi and y_lo < y_hi


def test_one_dimensional_objectives_carry_a_curve(client):
    body = client.post("/api/run", json=run_body(
        objective="cubic", iterations=1, init_point=[5.0])).json()
    assert body["contour"] is None
    curve = body["curve"]
    assert curve["resolution"] == 101
    assert len(curve["values"]) == 101
    lo, hi = curve["bounds"]
    assert lo < hi


def test_vanilla_alpha_history_is_flat(client):
    body = client.post("/api/run", json=run_body(
        active=False, iterations=20)).json()
    means = [p["alpha_mean"] for p in body["points"]]
    assert all(m == means[0] for m in means)


def test_active_alpha_history_grows_while_signs_hold(client):
    # Quadratic descent far from the optimum keeps every cumulative
    # gradient sign stable, so each boundary grows the step size.
    body = client.post("/api/run", json=run_body(
        objective="quadratic", optimizer="sgd_momentum", active=True,
        alpha0=1e-4, iterations=8, init_point=[12.0, -9.0])).json()
    means = [p["alpha_mean"] for p in body["points"]]
    tail = means[2:]  # the first boundary may shrink on the zero product
    assert all(b >= a for a, b in zip(tail, tail[1:]))
    assert tail[-1] > means[0]


@pytest.mark.parametrize("field,value", [
    ("objective", "ackley"),
    ("optimizer", "lbfgs"),
    ("mode", "turbo"),
    ("alpha0", 0.0),
    ("alpha0", -1.0),
    ("alpha0", 101.0),
    ("alpha_low", 0.0),
    ("alpha_low", 1.0),
    ("alpha_high", 0.0),
    ("alpha_high", 11.0),
    ("iterations", -1),
    ("iterations", DEFAULT_MAX_ITERS + 1),
    ("seed", -1),
    ("seed", 2 ** 31),
    ("init_point", ["a", "b"]),
    ("init_point", [1e7, 0.0]),
])
def test_out_of_range_fields_give_400_naming_the_field(client, field, value):
    resp = client.post("/api/run", json=run_body(**{field: value}))
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert any(field in err["loc"] for err in detail)


def test_malformed_json_types_give_400(client):
    resp = client.post("/api/run", json=run_body(iterations="many"))
    assert resp.status_code == 400
    assert resp.json()["detail"]


def test_unknown_fields_are_rejected(client):
    resp = client.post("/api/run", json=run_body(learning_rate=0.1))
    assert resp.status_code == 400


def test_missing_objective_gives_400(client):
    resp = client.post("/api/run", json={"optimizer": "adamw"})
    assert resp.status_code == 400


def test_dimension_mismatch_gives_422(client):
    resp = client.post("/api/run", json=run_body(init_point=[1.0, 2.0, 3.0]))
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert any("init_point" in err["loc"] for err in detail)


def test_iteration_cap_is_configurable():
    capped = TestClient(create_app(max_iters=50))
    assert capped.post("/api/run", json=run_body(iterations=50)).status_code == 200
    assert capped.post("/api/run", json=run_body(iterations=51)).status_code == 400


def test_localhost_origins_pass_cors(client):
    resp = client.options("/api/run", headers={
        "Origin": "http://localhost:5173",
        "Access-Control-Request-Method": "POST",
    })
    assert resp.status_code == 200
    assert resp.headers["access-control-allow-origin"] == "http://localhost:5173"


def test_static_dir_is_served_when_configured(tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>playground</title>")
    app = create_app(static_dir=str(tmp_path))
    client = TestClient(app)
    resp = client.get("/")
    assert resp.status_code == 200
    assert "playground" in resp.text
    # API routes must keep priority over the static mount
    assert client.get("/healthz").text == "ok"
