"""File formats: problem / run-config / oracle / bounds / verdict JSON and
trajectory / ensemble CSV.

Readers validate every field and raise FormatError naming the offending
one; writers emit a fixed key order and shortest round-trip float reprs so
equal inputs produce byte-identical files.  All writes go through a
temporary file in the destination directory followed by an atomic rename.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .analysis import BoundReport, EnsembleStats, Verdict
from .dynamics import (
    Constant,
    IterationKind,
    IterationMode,
    NoiseModel,
    PolyDecay,
    RunConfig,
    StepSchedule,
)
from .exceptions import FormatError, OeocimError
from .generate import GeneratorKind, GeneratorSpec
from .model import CouplingProblem
from .oracle import DefinitenessCall, PLEstimate, RelaxedOptimum

ENSEMBLE_HEADER = "k,mean_gap,ci_halfwidth"
TRAJECTORY_HEADER = "k,energy"


def atomic_write(path: str, text: str) -> None:
    """Write text to path via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _load_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise FormatError("(document)", f"not valid JSON: {exc}") from exc


def _require(d: dict, field: str, prefix: str = ""):
    if field not in d:
        raise FormatError(prefix + field, "missing")
    return d[field]


def _as_finite_float(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(field, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise FormatError(field, "must be finite")
    return value


def _as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(field, f"expected an integer, got {value!r}")
    return value


def _as_bool(value, field: str) -> bool:
    if not isinstance(value, bool):
        raise FormatError(field, f"expected a boolean, got {value!r}")
    return value


def _float_list(values, field: str, length: int | None = None) -> list[float]:
    if not isinstance(values, list):
        raise FormatError(field, f"expected a list, got {type(values).__name__}")
    if length is not None and len(values) != length:
        raise FormatError(field, f"expected length {length}, got {len(values)}")
    return [_as_finite_float(v, field) for v in values]


# -- problem ---------------------------------------------------------------


def problem_to_dict(p: CouplingProblem) -> dict:
    return {
        "n": p.n,
        "J": [[float(x) for x in row] for row in p.J],
        "h": [float(x) for x in p.h],
        "label": p.label,
    }


def problem_from_dict(d: dict) -> CouplingProblem:
    if not isinstance(d, dict):
        raise FormatError("(document)", "expected a JSON object")
    n = _as_int(_require(d, "n"), "n")
    if n < 1:
        raise FormatError("n", f"must be >= 1, got {n}")
    J = _require(d, "J")
    if not isinstance(J, list) or len(J) != n:
        raise FormatError("J", f"expected {n} rows")
    rows = []
    for i, row in enumerate(J):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError("J", f"row {i} is ragged: expected {n} entries")
        rows.append([_as_finite_float(x, "J") for x in row])
    h = _float_list(_require(d, "h"), "h", n)
    label = d.get("label")
    if label is not None and not isinstance(label, str):
        raise FormatError("label", "expected a string or null")
    return CouplingProblem(J=np.array(rows), h=np.array(h), label=label)


def write_problem(path: str, p: CouplingProblem) -> None:
    atomic_write(path, _dump_json(problem_to_dict(p)))


def read_problem(path: str) -> CouplingProblem:
    return problem_from_dict(_load_json(path))


# -- generator spec --------------------------------------------------------


def generator_spec_to_dict(spec: GeneratorSpec) -> dict:
    return {
        "n": spec.n,
        "kind": spec.kind.value,
        "field_scale": spec.field_scale,
        "seed": spec.seed,
    }


def generator_spec_from_dict(d: dict) -> GeneratorSpec:
    if not isinstance(d, dict):
        raise FormatError("(document)", "expected a JSON object")
    kind_name = _require(d, "kind")
    try:
        kind = GeneratorKind(kind_name)
    except ValueError:
        raise FormatError(
            "kind",
            f"unknown generator kind {kind_name!r}; expected one of "
            f"{sorted(k.value for k in GeneratorKind)}",
        ) from None
    return GeneratorSpec(
        n=_as_int(_require(d, "n"), "n"),
        kind=kind,
        field_scale=_as_finite_float(d.get("field_scale", 0.0), "field_scale"),
        seed=_as_int(d.get("seed", 0), "seed"),
    )


def read_generator_spec(path: str) -> GeneratorSpec:
    return generator_spec_from_dict(_load_json(path))


# -- run config ------------------------------------------------------------


def schedule_to_dict(sched: StepSchedule) -> dict:
    if isinstance(sched, Constant):
        return {"kind": "constant", "beta": sched.beta}
    return {"kind": "poly", "beta0": sched.beta0, "r": sched.r}


def schedule_from_dict(d, prefix: str = "schedule") -> StepSchedule:
    if not isinstance(d, dict):
        raise FormatError(prefix, "expected an object")
    kind = _require(d, "kind", prefix + ".")
    if kind == "constant":
        return Constant(beta=_as_finite_float(_require(d, "beta", prefix + "."), prefix + ".beta"))
    if kind == "poly":
        return PolyDecay(
            beta0=_as_finite_float(_require(d, "beta0", prefix + "."), prefix + ".beta0"),
            r=_as_finite_float(_require(d, "r", prefix + "."), prefix + ".r"),
        )
    raise FormatError(prefix + ".kind", f"expected 'constant' or 'poly', got {kind!r}")


def config_to_dict(config: RunConfig) -> dict:
    return {
        "mode": config.mode.kind.value,
        "alpha": config.mode.alpha,
        "schedule": schedule_to_dict(config.schedule),
        "sigma2": config.noise.sigma_squared,
        "K": config.K,
        "seed": config.noise.seed,
        "record_states": config.record_states,
    }


def config_from_dict(d: dict) -> RunConfig:
    """Parse a run config; every physics parameter must be explicit."""
    if not isinstance(d, dict):
        raise FormatError("(document)", "expected a JSON object")
    mode_name = _require(d, "mode")
    try:
        kind = IterationKind(mode_name)
    except ValueError:
        raise FormatError(
            "mode",
            f"unknown mode {mode_name!r}; expected one of "
            f"{sorted(k.value for k in IterationKind)}",
        ) from None
    alpha = _as_finite_float(_require(d, "alpha"), "alpha")
    schedule = schedule_from_dict(_require(d, "schedule"))
    sigma2 = _as_finite_float(_require(d, "sigma2"), "sigma2")
    K = _as_int(_require(d, "K"), "K")
    seed = _as_int(_require(d, "seed"), "seed")
    record = _as_bool(d.get("record_states", False), "record_states")
    try:
        return RunConfig(
            mode=IterationMode(kind=kind, alpha=alpha),
            schedule=schedule,
            noise=NoiseModel(sigma_squared=sigma2, seed=seed),
            K=K,
            record_states=record,
        )
    except OeocimError as exc:
        raise FormatError("(config)", str(exc)) from exc


def write_config(path: str, config: RunConfig) -> None:
    atomic_write(path, _dump_json(config_to_dict(config)))


def read_config(path: str) -> RunConfig:
    return config_from_dict(_load_json(path))


def default_config(K: int = 10000, seed: int = 0) -> RunConfig:
    """The analyzed reference regime: noise-scaled transfer dynamics with
    decaying steps beta_k = 0.5 / (k+1)^0.75 and sigma^2 = 0.01."""
    return RunConfig(
        mode=IterationMode(kind=IterationKind.TRANSFER_NOISE_SCALED),
        schedule=PolyDecay(beta0=0.5, r=0.75),
        noise=NoiseModel(sigma_squared=0.01, seed=seed),
        K=K,
    )


# -- oracle report ---------------------------------------------------------


def oracle_report_dict(
    opt: RelaxedOptimum,
    pl: PLEstimate | None,
    call: DefinitenessCall | None = None,
    lambda_max: float | None = None,
    lambda_min: float | None = None,
    c_squared: float | None = None,
    c_squared_exact: bool | None = None,
) -> dict:
    d = {
        "e_star": float(opt.e_star),
        "s_star": [float(x) for x in opt.s_star],
        "method": opt.method.value,
        "certified": bool(opt.certified),
        "mu_hat": None if pl is None else float(pl.mu_hat),
    }
    if pl is not None:
        d["mu_sample_count"] = pl.sample_count
    if call is not None:
        d["definiteness"] = call.label.value
        d["noise_required"] = call.noise_required
    if lambda_max is not None:
        d["lambda_max"] = float(lambda_max)
    if lambda_min is not None:
        d["lambda_min"] = float(lambda_min)
    if c_squared is not None:
        d["c_squared"] = float(c_squared)
    if c_squared_exact is not None:
        d["c_squared_exact"] = bool(c_squared_exact)
    return d


def oracle_fields_from_dict(d: dict) -> dict:
    """Validate the oracle keys downstream stages rely on."""
    if not isinstance(d, dict):
        raise FormatError("(document)", "expected a JSON object")
    out = {
        "e_star": _as_finite_float(_require(d, "e_star"), "e_star"),
        "s_star": _float_list(_require(d, "s_star"), "s_star"),
        "method": _require(d, "method"),
        "certified": _as_bool(_require(d, "certified"), "certified"),
    }
    mu = _require(d, "mu_hat")
    out["mu_hat"] = None if mu is None else _as_finite_float(mu, "mu_hat")
    out["definiteness"] = d.get("definiteness")
    return out


def write_oracle_report(path: str, report: dict) -> None:
    atomic_write(path, _dump_json(report))


def read_oracle_report(path: str) -> dict:
    return oracle_fields_from_dict(_load_json(path))


# -- bounds ----------------------------------------------------------------


def bounds_to_dict(report: BoundReport) -> dict:
    return {
        "lambda_max": report.lambda_max,
        "mu_used": report.mu_used,
        "mu_source": report.mu_source,
        "c_squared": report.c_squared,
        "liminf_bound_original": report.liminf_bound_original,
        "liminf_bound_modified": report.liminf_bound_modified,
        "kappa": report.kappa,
        "epsilon": report.epsilon,
        "n": report.n,
        "sigma_squared": report.sigma_squared,
        "beta": report.beta,
        "mode": report.mode,
        "assumption_verified": report.assumption_verified,
        "initial_gap": report.initial_gap,
        "e_star": report.e_star,
    }


def bounds_from_dict(d: dict) -> BoundReport:
    if not isinstance(d, dict):
        raise FormatError("(document)", "expected a JSON object")
    kappa = _require(d, "kappa")
    if kappa is not None:
        kappa = _as_int(kappa, "kappa")
    epsilon = _require(d, "epsilon")
    if epsilon is not None:
        epsilon = _as_finite_float(epsilon, "epsilon")
    mode = _require(d, "mode")
    if not isinstance(mode, str):
        raise FormatError("mode", "expected a string")
    mu_source = _require(d, "mu_source")
    if not isinstance(mu_source, str):
        raise FormatError("mu_source", "expected a string")
    return BoundReport(
        lambda_max=_as_finite_float(_require(d, "lambda_max"), "lambda_max"),
        mu_used=_as_finite_float(_require(d, "mu_used"), "mu_used"),
        mu_source=mu_source,
        c_squared=_as_finite_float(_require(d, "c_squared"), "c_squared"),
        liminf_bound_original=_as_finite_float(
            _require(d, "liminf_bound_original"), "liminf_bound_original"
        ),
        liminf_bound_modified=_as_finite_float(
            _require(d, "liminf_bound_modified"), "liminf_bound_modified"
        ),
        kappa=kappa,
        epsilon=epsilon,
        n=_as_int(d.get("n", 0), "n"),
        sigma_squared=_as_finite_float(d.get("sigma_squared", 0.0), "sigma_squared"),
        beta=_as_finite_float(d.get("beta", 0.0), "beta"),
        mode=mode,
        assumption_verified=_as_bool(_require(d, "assumption_verified"), "assumption_verified"),
        initial_gap=_as_finite_float(d.get("initial_gap", 0.0), "initial_gap"),
        e_star=_as_finite_float(d.get("e_star", 0.0), "e_star"),
    )


def write_bounds(path: str, report: BoundReport) -> None:
    atomic_write(path, _dump_json(bounds_to_dict(report)))


def read_bounds(path: str) -> BoundReport:
    return bounds_from_dict(_load_json(path))


# -- verdicts --------------------------------------------------------------


def verdict_to_dict(v: Verdict) -> dict:
    return {
        "check": v.check,
        "bound": v.bound,
        "observed": v.observed,
        "margin": v.margin,
        "verdict": v.verdict,
        "mu_source": v.mu_source,
    }


def verdict_report_dict(verdicts: list[Verdict], rate: dict | None) -> dict:
    return {
        "verdicts": [verdict_to_dict(v) for v in verdicts],
        "rate_fit": rate,
    }


def write_verdicts(path: str, verdicts: list[Verdict], rate: dict | None) -> None:
    atomic_write(path, _dump_json(verdict_report_dict(verdicts, rate)))


# -- CSV -------------------------------------------------------------------


def trajectory_csv(energies) -> str:
    lines = [TRAJECTORY_HEADER]
    lines.extend(f"{k},{float(e)!r}" for k, e in enumerate(energies))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(path: str, energies) -> None:
    atomic_write(path, trajectory_csv(energies))


def ensemble_csv(stats: EnsembleStats) -> str:
    lines = [ENSEMBLE_HEADER]
    lines.extend(
        f"{k},{float(m)!r},{float(c)!r}"
        for k, (m, c) in enumerate(zip(stats.mean_gap, stats.ci_halfwidth))
    )
    return "\n".join(lines) + "\n"


def write_ensemble_csv(path: str, stats: EnsembleStats) -> None:
    atomic_write(path, ensemble_csv(stats))


def read_ensemble_csv(path: str) -> EnsembleStats:
    """Load mean-gap statistics back; run count and clamp counts are not
    stored in the CSV, so those fields come back as None."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != ENSEMBLE_HEADER:
        raise FormatError("header", f"expected '{ENSEMBLE_HEADER}'")
    mean_gap = []
    ci = []
    for row, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatError("row", f"line {row + 2}: expected 3 columns")
        try:
            k = int(parts[0])
            m = float(parts[1])
            c = float(parts[2])
        except ValueError:
            raise FormatError("row", f"line {row + 2}: unparsable numbers") from None
        if k != row:
            raise FormatError("k", f"line {row + 2}: expected k={row}, got {k}")
        if not (math.isfinite(m) and math.isfinite(c)):
            raise FormatError("row", f"line {row + 2}: non-finite value")
        mean_gap.append(m)
        ci.append(c)
    if not mean_gap:
        raise FormatError("(document)", "no data rows")
    return EnsembleStats(
        K=len(mean_gap) - 1,
        mean_gap=np.array(mean_gap),
        ci_halfwidth=np.array(ci),
    )
