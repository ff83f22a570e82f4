"""Simulator and analysis harness for an opto-electronic-oscillator
coherent Ising machine: iteration dynamics, convergence bounds, oracles,
and seeded Monte Carlo verification."""

from .analysis import (
    ASSUMPTION_UNVERIFIED,
    FAIL,
    PASS,
    BoundReport,
    EnsembleStats,
    Verdict,
    bound_for_mode,
    build_bound_report,
    descent_recursion_fraction,
    ensemble_run,
    iteration_bound_kappa,
    liminf_bound_modified,
    liminf_bound_original,
    rate_fit,
    verify_gap_bound,
    verify_kappa,
)
from .dynamics import (
    Constant,
    IterationKind,
    IterationMode,
    NoiseModel,
    PolyDecay,
    RunConfig,
    StepSchedule,
    Trajectory,
    feedback,
    make_rng,
    run,
    schedule_value,
    schedule_values,
    simulate_batch,
    step,
    substream_seed,
    transfer,
    zero_state,
)
from .exceptions import (
    DimensionError,
    FlatObjectiveError,
    FormatError,
    InsufficientHorizonError,
    OeocimError,
    ParameterError,
    SpinDomainError,
    UnsupportedSizeError,
    WindowError,
)
from .generate import GeneratorKind, GeneratorSpec, generate
from .model import (
    BOX_HALF,
    CouplingProblem,
    Definiteness,
    SpectralSummary,
    discrete_energy,
    gradient,
    relaxed_energy,
    round_to_spins,
    spectral_summary,
    validate_discrete_spins,
    validate_spin_state,
)
from .oracle import (
    DefinitenessCall,
    OracleMethod,
    PLEstimate,
    RelaxedOptimum,
    SearchBudget,
    classify_definiteness,
    discrete_optimum,
    pl_constant_estimate,
    pl_ratio,
    relaxed_optimum,
)

__version__ = "0.1.0"

__all__ = [
    "ASSUMPTION_UNVERIFIED",
    "BOX_HALF",
    "BoundReport",
    "Constant",
    "CouplingProblem",
    "Definiteness",
    "DefinitenessCall",
    "DimensionError",
    "EnsembleStats",
    "FAIL",
    "FlatObjectiveError",
    "FormatError",
    "GeneratorKind",
    "GeneratorSpec",
    "InsufficientHorizonError",
    "IterationKind",
    "IterationMode",
    "NoiseModel",
    "OeocimError",
    "OracleMethod",
    "PASS",
    "PLEstimate",
    "ParameterError",
    "PolyDecay",
    "RelaxedOptimum",
    "RunConfig",
    "SearchBudget",
    "SpectralSummary",
    "SpinDomainError",
    "StepSchedule",
    "Trajectory",
    "UnsupportedSizeError",
    "Verdict",
    "WindowError",
    "bound_for_mode",
    "build_bound_report",
    "classify_definiteness",
    "descent_recursion_fraction",
    "discrete_energy",
    "discrete_optimum",
    "ensemble_run",
    "feedback",
    "generate",
    "gradient",
    "iteration_bound_kappa",
    "liminf_bound_modified",
    "liminf_bound_original",
    "make_rng",
    "pl_constant_estimate",
    "pl_ratio",
    "rate_fit",
    "relaxed_energy",
    "relaxed_optimum",
    "round_to_spins",
    "run",
    "schedule_value",
    "schedule_values",
    "simulate_batch",
    "spectral_summary",
    "step",
    "substream_seed",
    "transfer",
    "validate_discrete_spins",
    "validate_spin_state",
    "verify_gap_bound",
    "verify_kappa",
    "zero_state",
]
