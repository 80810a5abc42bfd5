"""HTTP layer: routes, schemas, and the error-to-status mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from jcgaudin.service.app import create_app

MODEL3 = {"n": 3, "s": 1.0, "omega": 0.0,
          "epsilon": [-1.0, 0.0, 1.0], "signs": [1, -1, 1]}
SOL = {"x0": [{"re": 0.5}, {"re": 0.5}]}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_bethe_endpoint(client):
    r = client.post("/bethe", json={"model": MODEL3})
    assert r.status_code == 200
    d = r.json()
    assert d["williamson"] == {"me": 0, "mff": 2}
    z = d["roots"][0]
    assert z["re"] == pytest.approx(-0.69177553483, abs=1e-9)
    assert z["im"] == pytest.approx(0.47807257879, abs=1e-9)
    assert d["pairing"] == [2, 3, 0, 1]


def test_bethe_signs_default_to_up(client):
    cfg = {k: v for k, v in MODEL3.items() if k != "signs"}
    r = client.post("/bethe", json={"model": cfg})
    assert r.status_code == 200
    assert r.json()["signs"] == [1, 1, 1]


def test_soliton_and_normal_round_trip(client):
    r = client.post("/soliton", json={"model": MODEL3, "soliton": SOL,
                                      "times": [0.1, 0.2, 0.3, 0.4]})
    assert r.status_code == 200
    state = r.json()["state"]
    # the reconstructed point carries the critical energies exactly
    from jcgaudin import bethe as bethe_mod
    from jcgaudin import model as model_mod
    p = model_mod.make_params(3, 1.0, 0.0, MODEL3["epsilon"])
    ce = bethe_mod.critical_energies(p, tuple(MODEL3["signs"]))
    assert np.allclose(r.json()["hamiltonians"], ce, atol=1e-9)
    r2 = client.post("/normal", json={"model": MODEL3, "state": state})
    assert r2.status_code == 200
    d = r2.json()
    assert len(d["z"]) == 2 and len(d["K"]) == 2
    # transport agrees with the in-process computation
    from jcgaudin import normal_form
    st = model_mod.make_state(
        p, complex(state["b"]["re"], state["b"]["im"]), state["spins"])
    bd = bethe_mod.solve_bethe(p, tuple(MODEL3["signs"]))
    K, L = normal_form.kl_quadratic(p, st, bd)
    assert np.allclose(d["K"], K, rtol=1e-12, atol=1e-12)
    assert np.allclose(d["L"], L, rtol=1e-12, atol=1e-12)


def test_evolve_endpoint_conserves_energies(client):
    state = {"b": {"re": 0.3, "im": -0.1},
             "spins": [[0.6, 0.0, 0.8], [0.0, 0.6, -0.8], [0.8, 0.0, 0.6]]}
    r = client.post("/evolve", json={"model": MODEL3, "state": state,
                                     "duration": 2.0, "samples": 5})
    assert r.status_code == 200
    d = r.json()
    assert len(d["times"]) == 5
    H = np.array(d["hamiltonians"])
    assert H.shape == (5, 4)
    assert np.max(np.abs(H - H[0])) < 1e-8


def test_divisor_endpoint(client):
    r = client.post("/divisor", json={"model": MODEL3, "soliton": SOL,
                                      "samples": 5})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert len(rows) == 5
    assert all(len(row["lambdas"]) == 3 for row in rows if not row["gap"])


def _near_critical_state():
    """Serialized state on a fiber close to the pinch (c_1 about 1e-3)."""
    from jcgaudin import bethe as bethe_mod
    from jcgaudin import model as model_mod
    from jcgaudin import normal_form
    p = model_mod.make_params(3, 1.0, 0.0, MODEL3["epsilon"])
    bd = bethe_mod.solve_bethe(p, tuple(MODEL3["signs"]))
    amp = np.sqrt(1e-3)
    st = normal_form.synthesize_from_normal(
        p, bd, [amp, 1e-5], [amp, 1e-5])
    return {"b": {"re": st.b.real, "im": st.b.imag},
            "spins": st.spins.tolist()}


def test_actions_endpoint_on_a_near_critical_fiber(client):
    r = client.post("/actions", json={"model": MODEL3,
                                      "state": _near_critical_state(),
                                      "cycle": "A", "pair": 1})
    assert r.status_code == 200
    d = r.json()
    assert d["converged"] is True
    got = complex(d["value"]["re"], d["value"]["im"])
    assert got == pytest.approx(1e-3 + 0j, rel=0.05)


def test_invariants_endpoint_frozen_values(client):
    r = client.post("/invariants", json={"model": MODEL3})
    assert r.status_code == 200
    d = r.json()
    assert d["j"] == 1
    assert d["rho"] == pytest.approx(19.350253849933175, rel=1e-12)
    assert d["gamma"] == pytest.approx(-2.4188584057763776, rel=1e-12)
    assert d["rho_z"][0]["re"] == pytest.approx(0.239276695296, abs=1e-10)


def test_monodromy_endpoint(client):
    r = client.post("/monodromy", json={"model": MODEL3, "focus": 1,
                                        "loop": 2, "samples": 1025})
    assert r.status_code == 200
    assert abs(r.json()["value"]) < 1e-8


def test_inout_endpoint(client):
    r = client.post("/inout", json={"model": MODEL3, "delta": 1e-2,
                                    "c1": {"re": 1e-4}})
    assert r.status_code == 200
    d = r.json()
    got = complex(d["rho_z"][0]["re"], d["rho_z"][0]["im"])
    want = complex(d["rho_z_exact"][0]["re"], d["rho_z_exact"][0]["im"])
    assert abs(got - want) < 0.05 * abs(want)


def test_reproduce_targets(client):
    r = client.post("/reproduce", json={"target": "one-spin"})
    assert r.status_code == 200
    d = r.json()
    assert d["passed"] is True
    assert len(d["checks"]) == 6
    r = client.post("/reproduce", json={"target": "unknown"})
    assert r.status_code == 400


def test_validation_errors_map_to_422(client):
    bad = dict(MODEL3, signs=[1, 1])
    assert client.post("/bethe", json={"model": bad}).status_code == 422
    # schema violations (unknown keys) are rejected the same way
    assert client.post(
        "/bethe", json={"model": MODEL3, "extra": 1}).status_code == 422


def test_usage_errors_map_to_400(client):
    state = {"b": {"re": 0.3}, "spins": [[0, 0, 1], [0, 0, -1], [0, 0, 1]]}
    r = client.post("/actions", json={"model": MODEL3, "state": state,
                                      "cycle": "Z"})
    assert r.status_code == 400
    assert r.json()["error"] == "UsageError"


def test_numeric_errors_map_to_500(client):
    state = {"b": {"re": 0.3, "im": -0.1},
             "spins": [[0.6, 0.0, 0.8], [0.0, 0.6, -0.8], [0.8, 0.0, 0.6]]}
    # a two-point "polygon" cannot clear the contour checks
    r = client.post("/actions", json={"model": MODEL3, "state": state,
                                      "cycle": "B",
                                      "waypoints": [{"re": 9.0}, {"re": 9.1},
                                                    {"re": 9.05, "im": 0.1}]})
    assert r.status_code in (200, 500)
    r = client.post("/actions", json={"model": MODEL3, "state": state,
                                      "cycle": "B",
                                      "waypoints": [{"re": 0.0}, {"re": 0.1}]})
    assert r.status_code == 500
    assert r.json()["error"] == "ContourCollision"
