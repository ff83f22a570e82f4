"""HTTP service: endpoint behavior, determinism, and error mapping."""

import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

import oeocim
from oeocim import (
    Constant,
    IterationKind,
    IterationMode,
    NoiseModel,
    RunConfig,
    build_bound_report,
    ensemble_run,
    relaxed_optimum,
    run,
    zero_state,
)
from oeocim.io import config_to_dict, problem_to_dict
from oeocim.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


FERRO = {"n": 2, "J": [[0.0, -2.0], [-2.0, 0.0]], "h": [0.0, 0.0], "label": "ferro"}
ZERO2 = {"n": 2, "J": [[0.0, 0.0], [0.0, 0.0]], "h": [0.0, 0.0], "label": None}


def _config_body(mode, beta, sigma2, K, seed):
    return {
        "mode": mode,
        "alpha": 1.0,
        "schedule": {"kind": "constant", "beta": beta},
        "sigma2": sigma2,
        "K": K,
        "seed": seed,
    }


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": oeocim.__version__}


def test_generate_matches_library_and_is_deterministic(client):
    body = {"n": 3, "kind": "positive_definite", "field_scale": 0.5, "seed": 9}
    r1 = client.post("/generate", json=body)
    r2 = client.post("/generate", json=body)
    assert r1.status_code == 200
    assert r1.json() == r2.json()
    from oeocim import GeneratorKind, GeneratorSpec, generate

    p = generate(GeneratorSpec(n=3, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=0.5, seed=9))
    assert r1.json() == problem_to_dict(p)


def test_solve_noise_free_stationary_origin(client):
    body = {
        "problem": FERRO,
        "config": _config_body("transfer_extended", 0.2, 0.0, 5, 0),
    }
    r = client.post("/solve", json=body)
    assert r.status_code == 200
    out = r.json()
    assert out["energies"] == [0.0] * 6
    assert out["final_state"] == [0.0, 0.0]
    assert out["final_energy"] == 0.0
    assert out["discrete_spins"] == [1, 1]
    assert out["discrete_energy"] == -2.0
    assert out["clamp_events"] == 0
    assert out["seed_used"] == 0


def test_solve_matches_library_run(client):
    body = {
        "problem": FERRO,
        "config": _config_body("linearized", 0.1, 0.02, 40, 13),
    }
    r1 = client.post("/solve", json=body)
    r2 = client.post("/solve", json=body)
    assert r1.json() == r2.json()

    from oeocim.io import problem_from_dict

    p = problem_from_dict(FERRO)
    config = RunConfig(
        mode=IterationMode(IterationKind.LINEARIZED),
        schedule=Constant(0.1),
        noise=NoiseModel(0.02, 13),
        K=40,
    )
    traj = run(p, zero_state(2), config)
    assert r1.json()["energies"] == [float(e) for e in traj.energies]
    assert r1.json()["final_state"] == [float(x) for x in traj.final_state]
    assert r1.json()["clamp_events"] == traj.clamp_events


def test_oracle_ferro(client):
    r = client.post("/oracle", json={"problem": FERRO})
    assert r.status_code == 200
    out = r.json()
    assert out["e_star"] == -0.5
    assert out["method"] == "GridRefine"
    assert out["certified"] is True
    assert out["mu_hat"] is not None and out["mu_hat"] > 0
    assert out["mu_sample_count"] == 4096
    assert out["definiteness"] == "indefinite"
    assert out["noise_required"] is True
    assert abs(out["lambda_max"] - 2.0) < 1e-12
    assert abs(out["lambda_min"] + 2.0) < 1e-12
    assert out["c_squared"] == 2.0
    assert out["c_squared_exact"] is True


def test_oracle_flat_problem_reports_null_mu(client):
    r = client.post("/oracle", json={"problem": ZERO2})
    assert r.status_code == 200
    out = r.json()
    assert out["e_star"] == 0.0
    assert out["mu_hat"] is None
    assert out["mu_sample_count"] is None
    assert out["definiteness"] == "zero"
    assert out["noise_required"] is False


def test_oracle_seed_changes_mu_estimate_stream(client):
    a = client.post("/oracle", json={"problem": FERRO, "seed": 0}).json()
    b = client.post("/oracle", json={"problem": FERRO, "seed": 1}).json()
    assert a["e_star"] == b["e_star"]
    assert a["mu_hat"] != b["mu_hat"]


def test_ensemble_computes_reference_energy_when_omitted(client, pd_problem, pd_optimum):
    body = {
        "problem": problem_to_dict(pd_problem),
        "config": _config_body("linearized", 0.05, 0.01, 50, 0),
        "M": 5,
        "seed": 21,
    }
    r = client.post("/ensemble", json=body)
    assert r.status_code == 200
    out = r.json()
    assert len(out["mean_gap"]) == 51
    assert len(out["ci_halfwidth"]) == 51
    assert out["e_star_used"] == pd_optimum.e_star

    config = RunConfig(
        mode=IterationMode(IterationKind.LINEARIZED),
        schedule=Constant(0.05),
        noise=NoiseModel(0.01, 0),
        K=50,
    )
    stats = ensemble_run(pd_problem, zero_state(8), config, 5, 21, pd_optimum.e_star)
    assert out["mean_gap"] == [float(x) for x in stats.mean_gap]
    assert out["clamp_events"] == stats.clamp_events


def test_ensemble_rejects_single_run(client):
    body = {"problem": FERRO, "config": _config_body("linearized", 0.1, 0.0, 5, 0), "M": 1, "seed": 0}
    r = client.post("/ensemble", json=body)
    assert r.status_code == 400
    assert r.json()["error"] == "ParameterError"


def test_bounds_endpoint_matches_library(client, pd_problem, pd_optimum, pd_pl):
    config_body = _config_body("linearized_noise_scaled", 0.05, 0.01, 100, 0)
    body = {
        "problem": problem_to_dict(pd_problem),
        "config": config_body,
        "oracle": {"e_star": pd_optimum.e_star, "mu_hat": pd_pl.mu_hat},
    }
    r = client.post("/bounds", json=body)
    assert r.status_code == 200
    out = r.json()
    assert out["kappa"] is None
    assert out["epsilon"] is None
    assert out["mu_source"] == "Estimated"
    assert out["assumption_verified"] is True

    from oeocim.io import config_from_dict

    report = build_bound_report(
        pd_problem,
        config_from_dict(config_body),
        e_star=pd_optimum.e_star,
        mu_hat=pd_pl.mu_hat,
    )
    assert out["liminf_bound_modified"] == report.liminf_bound_modified
    assert out["liminf_bound_original"] == report.liminf_bound_original
    assert out["initial_gap"] == report.initial_gap

    body["epsilon"] = 0.05
    body["mu"] = 1.5
    out2 = client.post("/bounds", json=body).json()
    assert isinstance(out2["kappa"], int) and out2["kappa"] >= 1
    assert out2["mu_source"] == "UserSupplied"
    assert out2["mu_used"] == 1.5


def _bounds_payload(**overrides):
    base = {
        "lambda_max": 2.0,
        "mu_used": 0.5,
        "mu_source": "UserSupplied",
        "c_squared": 1.0,
        "liminf_bound_original": 0.5,
        "liminf_bound_modified": 0.2,
        "kappa": None,
        "epsilon": None,
        "n": 2,
        "sigma_squared": 0.01,
        "beta": 0.1,
        "mode": "linearized_noise_scaled",
        "assumption_verified": True,
        "initial_gap": 1.0,
        "e_star": 0.0,
    }
    base.update(overrides)
    return base


def test_verify_pass_fail_unverified_exit_codes(client):
    series = {"mean_gap": [1.0, 0.5, 0.1, 0.05], "ci_halfwidth": [0.0] * 4}

    ok = client.post("/verify", json=dict(series, bounds=_bounds_payload()))
    assert ok.status_code == 200
    out = ok.json()
    assert out["exit_code"] == 0
    assert len(out["verdicts"]) == 1
    assert out["verdicts"][0]["check"] == "gap_bound"
    assert out["verdicts"][0]["verdict"] == "PASS"
    assert out["verdicts"][0]["bound"] == 0.2
    assert out["verdicts"][0]["observed"] == 0.05
    assert out["rate_fit"] is not None
    assert out["rate_fit"]["exponent"] < 0

    bad = client.post(
        "/verify", json=dict(series, bounds=_bounds_payload(liminf_bound_modified=0.01))
    ).json()
    assert bad["exit_code"] == 1
    assert bad["verdicts"][0]["verdict"] == "FAIL"

    unver = client.post(
        "/verify", json=dict(series, bounds=_bounds_payload(assumption_verified=False))
    ).json()
    assert unver["exit_code"] == 2
    assert unver["verdicts"][0]["verdict"] == "ASSUMPTION_UNVERIFIED"


def test_verify_includes_kappa_verdict_when_present(client):
    series = {"mean_gap": [1.0, 0.5, 0.1, 0.05], "ci_halfwidth": [0.0] * 4}
    body = dict(series, bounds=_bounds_payload(kappa=2, epsilon=0.1))
    out = client.post("/verify", json=body).json()
    assert [v["check"] for v in out["verdicts"]] == ["gap_bound", "kappa"]
    kv = out["verdicts"][1]
    assert kv["verdict"] == "PASS"
    assert kv["bound"] == pytest.approx(0.2 + 0.1)
    assert kv["observed"] == 0.1
    assert out["exit_code"] == 0


def test_verify_short_series_has_null_rate_fit(client):
    body = {"mean_gap": [1.0, 0.1], "ci_halfwidth": [0.0, 0.0], "bounds": _bounds_payload()}
    out = client.post("/verify", json=body).json()
    assert out["rate_fit"] is None
    assert out["exit_code"] == 0


def test_verify_rejects_mismatched_series(client):
    body = {"mean_gap": [1.0, 0.5], "ci_halfwidth": [0.0], "bounds": _bounds_payload()}
    r = client.post("/verify", json=body)
    assert r.status_code == 400
    assert r.json()["error"] == "FormatError"
    assert r.json()["field"] == "mean_gap"


def test_format_errors_report_the_field(client):
    ragged = {"n": 2, "J": [[0.0, 1.0], [1.0]], "h": [0.0, 0.0], "label": None}
    r = client.post("/oracle", json={"problem": ragged})
    assert r.status_code == 400
    body = r.json()
    assert body["error"] == "FormatError"
    assert body["field"] == "J"
    assert "message" in body


def test_parameter_errors_surface_as_400(client):
    config = _config_body("linearized", 0.1, 0.0, 5, 0)
    config["schedule"] = {"kind": "poly", "beta0": 0.5, "r": 0.3}
    r = client.post("/solve", json={"problem": FERRO, "config": config})
    assert r.status_code == 400
    assert r.json()["error"] == "ParameterError"
    assert "field" not in r.json()


def test_missing_body_keys_are_422(client):
    assert client.post("/solve", json={}).status_code == 422
    assert client.post("/generate", json={"n": 2}).status_code == 422
    assert client.post("/verify", json={"mean_gap": [1.0]}).status_code == 422


def test_solve_energies_match_relaxed_energy_definition(client, pd_problem):
    body = {
        "problem": problem_to_dict(pd_problem),
        "config": _config_body("transfer_noise_scaled", 0.1, 0.01, 30, 5),
    }
    out = client.post("/solve", json=body).json()
    s = np.array(out["final_state"])
    from oeocim import relaxed_energy

    # batched einsum energies may differ from the scalar path by ULPs
    assert abs(out["final_energy"] - relaxed_energy(pd_problem, s)) < 1e-12
    assert out["energies"][-1] == out["final_energy"]
