"""FastAPI application exposing the simulator pipeline.

Every endpoint is a stateless wrapper over the core package: requests
carry whole problem/config payloads (the same JSON that lives on disk),
responses carry whole results, and all randomness is derived from seeds
in the request, so identical requests give identical responses.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import (
    ASSUMPTION_UNVERIFIED,
    FAIL,
    BoundReport,
    EnsembleStats,
    bound_for_mode,
    build_bound_report,
    ensemble_run,
    rate_fit,
    verify_gap_bound,
    verify_kappa,
)
from ..dynamics import make_rng, run, zero_state
from ..exceptions import FlatObjectiveError, FormatError, OeocimError, WindowError
from ..generate import generate
from ..io import (
    bounds_to_dict,
    config_from_dict,
    generator_spec_from_dict,
    problem_from_dict,
    problem_to_dict,
)
from ..model import discrete_energy, round_to_spins, spectral_summary
from ..oracle import classify_definiteness, pl_constant_estimate, relaxed_optimum
from .schemas import (
    BoundsModel,
    BoundsRequest,
    EnsembleRequest,
    EnsembleResponse,
    GeneratorSpecModel,
    HealthResponse,
    OracleRequest,
    OracleResponse,
    ProblemModel,
    RateFitModel,
    SolveRequest,
    SolveResponse,
    VerdictModel,
    VerifyRequest,
    VerifyResponse,
)


def _problem(model: ProblemModel):
    return problem_from_dict(model.model_dump())


def _config(model) -> object:
    return config_from_dict(model.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(title="oeocim", version=__version__)

    @app.exception_handler(OeocimError)
    async def _domain_error(request, exc: OeocimError):
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, FormatError):
            payload["field"] = exc.field
        return JSONResponse(status_code=400, content=payload)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/generate", response_model=ProblemModel)
    def generate_endpoint(spec: GeneratorSpecModel) -> ProblemModel:
        problem = generate(generator_spec_from_dict(spec.model_dump()))
        return ProblemModel(**problem_to_dict(problem))

    @app.post("/solve", response_model=SolveResponse)
    def solve(req: SolveRequest) -> SolveResponse:
        p = _problem(req.problem)
        config = _config(req.config)
        traj = run(p, zero_state(p.n), config)
        sigma = round_to_spins(traj.final_state)
        return SolveResponse(
            energies=[float(e) for e in traj.energies],
            final_state=[float(x) for x in traj.final_state],
            final_energy=float(traj.energies[-1]),
            discrete_spins=[int(x) for x in sigma],
            discrete_energy=discrete_energy(p, sigma),
            clamp_events=traj.clamp_events,
            seed_used=traj.seed_used,
        )

    @app.post("/oracle", response_model=OracleResponse)
    def oracle(req: OracleRequest) -> OracleResponse:
        p = _problem(req.problem)
        summary = spectral_summary(p)
        call = classify_definiteness(summary)
        opt = relaxed_optimum(p, seed=req.seed)
        try:
            pl = pl_constant_estimate(
                p, opt.e_star, req.sample_count, rng=make_rng(req.seed)
            )
        except FlatObjectiveError:
            pl = None
        return OracleResponse(
            e_star=float(opt.e_star),
            s_star=[float(x) for x in opt.s_star],
            method=opt.method.value,
            certified=opt.certified,
            mu_hat=None if pl is None else float(pl.mu_hat),
            mu_sample_count=None if pl is None else pl.sample_count,
            definiteness=call.label.value,
            noise_required=call.noise_required,
            lambda_max=summary.lambda_max,
            lambda_min=summary.lambda_min,
            c_squared=summary.c_squared,
            c_squared_exact=summary.c_squared_exact,
        )

    @app.post("/ensemble", response_model=EnsembleResponse)
    def ensemble(req: EnsembleRequest) -> EnsembleResponse:
        p = _problem(req.problem)
        config = _config(req.config)
        e_star = req.e_star
        if e_star is None:
            e_star = relaxed_optimum(p).e_star
        stats = ensemble_run(p, zero_state(p.n), config, req.M, req.seed, e_star)
        return EnsembleResponse(
            mean_gap=[float(x) for x in stats.mean_gap],
            ci_halfwidth=[float(x) for x in stats.ci_halfwidth],
            clamp_events=stats.clamp_events,
            e_star_used=float(e_star),
        )

    @app.post("/bounds", response_model=BoundsModel)
    def bounds(req: BoundsRequest) -> BoundsModel:
        p = _problem(req.problem)
        config = _config(req.config)
        report = build_bound_report(
            p,
            config,
            e_star=req.oracle.e_star,
            mu_hat=req.oracle.mu_hat,
            mu_override=req.mu,
            epsilon=req.epsilon,
        )
        return BoundsModel(**bounds_to_dict(report))

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        if len(req.mean_gap) != len(req.ci_halfwidth) or not req.mean_gap:
            raise FormatError("mean_gap", "mean_gap and ci_halfwidth must be equal-length and nonempty")
        stats = EnsembleStats(
            K=len(req.mean_gap) - 1,
            mean_gap=np.array(req.mean_gap),
            ci_halfwidth=np.array(req.ci_halfwidth),
        )
        report = BoundReport(**req.bounds.model_dump())
        verdicts = [
            verify_gap_bound(
                stats,
                bound_for_mode(report),
                tail_fraction=req.tail_fraction,
                mu_source=report.mu_source,
                assumption_verified=report.assumption_verified,
            )
        ]
        if report.kappa is not None and report.epsilon is not None:
            verdicts.append(
                verify_kappa(
                    stats,
                    report.liminf_bound_modified,
                    report.kappa,
                    report.epsilon,
                    mu_source=report.mu_source,
                    assumption_verified=report.assumption_verified,
                )
            )
        window = req.rate_window
        if window is None:
            window = (max(1, stats.K // 10), stats.K)
        try:
            exponent, r_squared = rate_fit(stats, window)
            rate = RateFitModel(exponent=exponent, r_squared=r_squared, window=window)
        except WindowError:
            rate = None
        labels = [v.verdict for v in verdicts]
        if FAIL in labels:
            exit_code = 1
        elif ASSUMPTION_UNVERIFIED in labels:
            exit_code = 2
        else:
            exit_code = 0
        return VerifyResponse(
            verdicts=[
                VerdictModel(
                    check=v.check,
                    bound=v.bound,
                    observed=v.observed,
                    margin=v.margin,
                    verdict=v.verdict,
                    mu_source=v.mu_source,
                )
                for v in verdicts
            ],
            rate_fit=rate,
            exit_code=exit_code,
        )

    return app
