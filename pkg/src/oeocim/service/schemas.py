"""Request and response bodies of the HTTP service.

These mirror the on-disk JSON schemas one-to-one so the CLI can pass file
contents through unchanged; deep validation (raggedness, finiteness,
dimension agreement) stays in the core readers.
"""

from __future__ import annotations

from pydantic import BaseModel


class ProblemModel(BaseModel):
    n: int
    J: list[list[float]]
    h: list[float]
    label: str | None = None


class ScheduleModel(BaseModel):
    kind: str
    beta: float | None = None
    beta0: float | None = None
    r: float | None = None


class ConfigModel(BaseModel):
    mode: str
    alpha: float
    schedule: ScheduleModel
    sigma2: float
    K: int
    seed: int
    record_states: bool = False


class GeneratorSpecModel(BaseModel):
    n: int
    kind: str
    field_scale: float = 0.0
    seed: int = 0


class SolveRequest(BaseModel):
    problem: ProblemModel
    config: ConfigModel


class SolveResponse(BaseModel):
    energies: list[float]
    final_state: list[float]
    final_energy: float
    discrete_spins: list[int]
    discrete_energy: float
    clamp_events: int
    seed_used: int


class OracleRequest(BaseModel):
    problem: ProblemModel
    sample_count: int = 4096
    seed: int = 0


class OracleResponse(BaseModel):
    e_star: float
    s_star: list[float]
    method: str
    certified: bool
    mu_hat: float | None
    mu_sample_count: int | None = None
    definiteness: str
    noise_required: bool
    lambda_max: float
    lambda_min: float
    c_squared: float
    c_squared_exact: bool


class EnsembleRequest(BaseModel):
    problem: ProblemModel
    config: ConfigModel
    M: int
    seed: int
    e_star: float | None = None


class EnsembleResponse(BaseModel):
    mean_gap: list[float]
    ci_halfwidth: list[float]
    clamp_events: int
    e_star_used: float


class OracleFieldsModel(BaseModel):
    """The oracle outputs consumed by the bounds stage."""

    e_star: float
    mu_hat: float | None = None


class BoundsRequest(BaseModel):
    problem: ProblemModel
    config: ConfigModel
    oracle: OracleFieldsModel
    mu: float | None = None
    epsilon: float | None = None


class BoundsModel(BaseModel):
    lambda_max: float
    mu_used: float
    mu_source: str
    c_squared: float
    liminf_bound_original: float
    liminf_bound_modified: float
    kappa: int | None
    epsilon: float | None
    n: int
    sigma_squared: float
    beta: float
    mode: str
    assumption_verified: bool
    initial_gap: float
    e_star: float


class VerdictModel(BaseModel):
    check: str
    bound: float
    observed: float
    margin: float
    verdict: str
    mu_source: str | None


class RateFitModel(BaseModel):
    exponent: float
    r_squared: float
    window: tuple[int, int]


class VerifyRequest(BaseModel):
    mean_gap: list[float]
    ci_halfwidth: list[float]
    bounds: BoundsModel
    tail_fraction: float = 0.2
    rate_window: tuple[int, int] | None = None


class VerifyResponse(BaseModel):
    verdicts: list[VerdictModel]
    rate_fit: RateFitModel | None
    exit_code: int


class HealthResponse(BaseModel):
    status: str
    version: str
