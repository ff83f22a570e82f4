"""Convergence bounds and their empirical verification.

Computes the theoretical gap bounds (asymptotic floor for the original
dynamics, constant-step bound and iteration count for the noise-scaled
dynamics), estimates E[E(s^(k)) - E*] by seeded Monte Carlo ensembles,
and issues PASS / FAIL / ASSUMPTION_UNVERIFIED verdicts.

The asymptotic floor is a liminf statement, which is not observable in a
finite run; the standard surrogate used throughout is the minimum of the
ensemble mean gap over a trailing window (default: the last 20% of
iterations).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    Constant,
    RunConfig,
    StepSchedule,
    schedule_values,
    simulate_batch,
    substream_seed,
)
from .exceptions import (
    InsufficientHorizonError,
    ParameterError,
    WindowError,
)
from .model import (
    CouplingProblem,
    Definiteness,
    relaxed_energy,
    spectral_summary,
    validate_spin_state,
)

PASS = "PASS"
FAIL = "FAIL"
ASSUMPTION_UNVERIFIED = "ASSUMPTION_UNVERIFIED"

MU_USER_SUPPLIED = "UserSupplied"
MU_ESTIMATED = "Estimated"

# 95% two-sided normal quantile for ensemble confidence half-widths.
Z_95 = 1.96


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    """Per-iteration mean optimality gap across M seeded runs.

    mean_gap[k] and ci_halfwidth[k] describe E(s^(k)) - E* at iteration k
    (normal-approximation 95% half-widths).  M, clamp_events and final_gaps
    are None when the stats were loaded from a CSV that does not carry them.
    """

    K: int
    mean_gap: np.ndarray
    ci_halfwidth: np.ndarray
    M: int | None = None
    clamp_events: int | None = None
    final_gaps: np.ndarray | None = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of one bound check.

    margin = observed - bound, so positive margins quantify failures.
    verdict is ASSUMPTION_UNVERIFIED when the PL premise behind the bound
    could not be established for the instance (the numbers are still
    reported).
    """

    check: str
    bound: float
    observed: float
    margin: float
    verdict: str
    mu_source: str | None = None


@dataclass(frozen=True)
class BoundReport:
    """Every theoretical constant and bound for one (problem, run) pair."""

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


def ensemble_run(
    p: CouplingProblem,
    s0,
    config: RunConfig,
    M: int,
    base_seed: int,
    e_star: float,
) -> EnsembleStats:
    """Estimate the expected gap trajectory over M independent runs.

    Run i uses noise substream base_seed XOR i, so the ensemble is
    reproducible and independent of execution order; config.noise.seed is
    ignored here.  Statistics are reduced in fixed index order.
    """
    if M < 2:
        raise ParameterError(f"an ensemble needs M >= 2 runs, got {M}")
    s0 = validate_spin_state(s0, p.n)
    seeds = [substream_seed(base_seed, i) for i in range(M)]
    S0 = np.tile(s0, (M, 1))
    energies, _, clamps, _ = simulate_batch(
        p, S0, config.mode, config.schedule, config.noise.sigma_squared, seeds, config.K
    )
    gaps = energies - e_star
    mean_gap = gaps.mean(axis=1)
    ci = Z_95 * gaps.std(axis=1, ddof=1) / np.sqrt(M)
    return EnsembleStats(
        K=config.K,
        mean_gap=mean_gap,
        ci_halfwidth=ci,
        M=M,
        clamp_events=clamps,
        final_gaps=gaps[-1].copy(),
    )


def liminf_bound_original(
    lambda_max: float,
    mu: float,
    beta: float,
    c_squared: float,
    n: int,
    sigma_squared: float,
) -> float:
    """Asymptotic floor of the expected gap for the original dynamics:
    (lambda_max / 2 mu) * (beta c^2 + n sigma^2 / beta)."""
    if not mu > 0:
        raise ParameterError(f"PL constant must be positive, got {mu}")
    if not beta > 0:
        raise ParameterError(f"step size must be positive, got {beta}")
    return (lambda_max / (2.0 * mu)) * (beta * c_squared + n * sigma_squared / beta)


def liminf_bound_modified(
    lambda_max: float,
    mu: float,
    beta: float,
    c_squared: float,
    n: int,
    sigma_squared: float,
) -> float:
    """Constant-step floor for the noise-scaled dynamics:
    (lambda_max / 2 mu) * beta * (c^2 + n sigma^2).

    Monotone increasing in beta, so the floor can be driven arbitrarily
    low by shrinking the step.
    """
    if not mu > 0:
        raise ParameterError(f"PL constant must be positive, got {mu}")
    if not beta > 0:
        raise ParameterError(f"step size must be positive, got {beta}")
    return (lambda_max / (2.0 * mu)) * beta * (c_squared + n * sigma_squared)


def iteration_bound_kappa(initial_gap: float, beta: float, mu: float, epsilon: float) -> int:
    """Iterations needed for the running-minimum expected gap to come
    within epsilon of the constant-step floor: floor(gap0 / (2 beta mu eps)).

    The floor is taken after a one-ulp-scale upward nudge so that ratios
    that are mathematically integral do not round down.
    """
    if initial_gap < 0:
        raise ParameterError(f"initial gap must be >= 0, got {initial_gap}")
    for name, value in (("beta", beta), ("mu", mu), ("epsilon", epsilon)):
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value}")
    ratio = initial_gap / (2.0 * beta * mu * epsilon)
    return int(np.floor(ratio * (1.0 + 4.0 * np.finfo(np.float64).eps)))


def _tail_start(length: int, tail_fraction: float) -> int:
    if not 0 < tail_fraction <= 1:
        raise ParameterError(f"tail fraction must be in (0, 1], got {tail_fraction}")
    return length - max(1, int(tail_fraction * length))


def verify_gap_bound(
    stats: EnsembleStats,
    bound: float,
    tail_fraction: float = 0.2,
    mu_source: str | None = None,
    assumption_verified: bool = True,
) -> Verdict:
    """Check the asymptotic floor against the tail of the mean gap.

    The observed value is min over the trailing window of
    (mean_gap - ci_halfwidth); the check passes when it does not exceed
    the bound.
    """
    start = _tail_start(stats.K + 1, tail_fraction)
    observed = float(np.min(stats.mean_gap[start:] - stats.ci_halfwidth[start:]))
    margin = observed - bound
    if not assumption_verified:
        verdict = ASSUMPTION_UNVERIFIED
    else:
        verdict = PASS if observed <= bound else FAIL
    return Verdict(
        check="gap_bound",
        bound=float(bound),
        observed=observed,
        margin=margin,
        verdict=verdict,
        mu_source=mu_source,
    )


def verify_kappa(
    stats: EnsembleStats,
    bound_value: float,
    kappa: int,
    epsilon: float,
    mu_source: str | None = None,
    assumption_verified: bool = True,
) -> Verdict:
    """Check that the running-minimum gap reaches bound + epsilon by
    iteration kappa, allowing the Monte Carlo half-width at the argmin."""
    if kappa > stats.K:
        raise InsufficientHorizonError(
            f"kappa={kappa} exceeds the recorded horizon K={stats.K}"
        )
    head = stats.mean_gap[: kappa + 1]
    i = int(np.argmin(head))
    observed = float(head[i])
    threshold = float(bound_value + epsilon + stats.ci_halfwidth[i])
    margin = observed - threshold
    if not assumption_verified:
        verdict = ASSUMPTION_UNVERIFIED
    else:
        verdict = PASS if observed <= threshold else FAIL
    return Verdict(
        check="kappa",
        bound=threshold,
        observed=observed,
        margin=margin,
        verdict=verdict,
        mu_source=mu_source,
    )


def rate_fit(
    stats: EnsembleStats, window: tuple[int, int] | None = None
) -> tuple[float, float]:
    """Least-squares slope of log(mean_gap) against log(k).

    window is an inclusive (start, stop) iteration range; the default is
    the last decade (K // 10 .. K).  Returns (exponent, r_squared); a gap
    decaying like k^-r fits exponent -r.
    """
    if window is None:
        window = (max(1, stats.K // 10), stats.K)
    lo, hi = window
    if lo < 1 or hi > stats.K or hi - lo < 1:
        raise WindowError(f"window {window} is not a valid range within 1..{stats.K}")
    gaps = stats.mean_gap[lo : hi + 1]
    if np.any(gaps <= 0):
        raise WindowError("mean gap must be positive over the fit window")
    x = np.log(np.arange(lo, hi + 1, dtype=np.float64))
    y = np.log(gaps)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(residuals**2))
    r_squared = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return float(slope), float(r_squared)


def descent_recursion_fraction(
    stats: EnsembleStats,
    lambda_max: float,
    mu: float,
    schedule: StepSchedule,
    c_squared: float,
    n: int,
    sigma_squared: float,
) -> float:
    """Fraction of iterations satisfying the one-step descent recursion

        mean_gap[k+1] <= (1 - 2 beta_k mu) mean_gap[k]
                         + lambda_max beta_k^2 (c^2 + n sigma^2)
                         + 3 ci_halfwidth[k+1]

    The 3x half-width slack absorbs Monte Carlo error; a strict per-step
    inequality on sample means would fail spuriously at finite M.
    Meaningful when beta_k mu < 1/2 for the recorded schedule.
    """
    if stats.K < 1:
        raise InsufficientHorizonError("need at least one iteration to check descent")
    betas = schedule_values(schedule, stats.K)
    lhs = stats.mean_gap[1:]
    rhs = (
        (1.0 - 2.0 * betas * mu) * stats.mean_gap[:-1]
        + lambda_max * betas**2 * (c_squared + n * sigma_squared)
        + 3.0 * stats.ci_halfwidth[1:]
    )
    return float(np.mean(lhs <= rhs))


def build_bound_report(
    p: CouplingProblem,
    config: RunConfig,
    e_star: float,
    mu_hat: float | None,
    mu_override: float | None = None,
    epsilon: float | None = None,
    s0=None,
) -> BoundReport:
    """Assemble every bound for a constant-step run configuration.

    mu_override takes precedence over the estimated mu_hat.  kappa is
    reported when epsilon is given.  assumption_verified records whether
    the PL premise is established (convex instances); bounds for other
    instances are still computed but should be labeled accordingly.
    """
    if not isinstance(config.schedule, Constant):
        raise ParameterError(
            "bound formulas apply to constant step schedules; got a decaying one"
        )
    beta = config.schedule.beta
    if mu_override is not None:
        if not mu_override > 0:
            raise ParameterError(f"mu must be positive, got {mu_override}")
        mu_used, mu_source = float(mu_override), MU_USER_SUPPLIED
    elif mu_hat is not None:
        mu_used, mu_source = float(mu_hat), MU_ESTIMATED
    else:
        raise ParameterError("no PL constant available: supply mu or an estimate")
    summary = spectral_summary(p)
    s0 = np.zeros(p.n) if s0 is None else validate_spin_state(s0, p.n)
    initial_gap = relaxed_energy(p, s0) - e_star
    sigma2 = config.noise.sigma_squared
    kappa = (
        iteration_bound_kappa(initial_gap, beta, mu_used, epsilon)
        if epsilon is not None
        else None
    )
    return BoundReport(
        lambda_max=summary.lambda_max,
        mu_used=mu_used,
        mu_source=mu_source,
        c_squared=summary.c_squared,
        liminf_bound_original=liminf_bound_original(
            summary.lambda_max, mu_used, beta, summary.c_squared, p.n, sigma2
        ),
        liminf_bound_modified=liminf_bound_modified(
            summary.lambda_max, mu_used, beta, summary.c_squared, p.n, sigma2
        ),
        kappa=kappa,
        epsilon=epsilon,
        n=p.n,
        sigma_squared=sigma2,
        beta=beta,
        mode=config.mode.kind.value,
        assumption_verified=summary.definiteness
        in (Definiteness.POSITIVE_DEFINITE, Definiteness.POSITIVE_SEMIDEFINITE),
        initial_gap=initial_gap,
        e_star=e_star,
    )


def bound_for_mode(report: BoundReport) -> float:
    """The floor that applies to the report's iteration mode: the original
    bound for the unscaled dynamics, the modified bound for noise-scaled
    modes."""
    if report.mode in ("transfer_noise_scaled", "linearized_noise_scaled"):
        return report.liminf_bound_modified
    return report.liminf_bound_original
