"""Iteration rules of the opto-electronic Ising machine.

Five update modes share one engine:

* ``transfer_original``    f = alpha*s - beta*J s;   s' = T(f + zeta)
* ``transfer_extended``    f = alpha*s - beta*(Q s + h);   s' = T(f + zeta)
* ``transfer_noise_scaled`` f = alpha*s - beta_k*(Q s + h - zeta);   s' = T(f)
* ``linearized``           s' = clip(s - beta_k*(Q s + h) + zeta)
* ``linearized_noise_scaled`` s' = clip(s - beta_k*(Q s + h - zeta))

where T is the modulator transfer cos^2(x - pi/4) - 1/2, evaluated in the
algebraically identical half-angle form sin(2x)/2 so that the origin fixed
point and the extreme points +-pi/4 -> +-1/2 are exact in floating point.
zeta is i.i.d. Gaussian noise, N(0, sigma^2 I), drawn once per iteration.

The linearized modes have no nonlinearity to confine them, so iterates are
clamped back to the box coordinatewise; clamp events are counted and
reported rather than hidden.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, ParameterError
from .model import BOX_HALF, CouplingProblem, energies_of_rows, validate_spin_state

MASK64 = (1 << 64) - 1

# Iterations per block of pre-drawn Gaussian variates in the engine.
NOISE_CHUNK = 512


class IterationKind(enum.Enum):
    TRANSFER_ORIGINAL = "transfer_original"
    TRANSFER_EXTENDED = "transfer_extended"
    LINEARIZED = "linearized"
    TRANSFER_NOISE_SCALED = "transfer_noise_scaled"
    LINEARIZED_NOISE_SCALED = "linearized_noise_scaled"


_TRANSFER_KINDS = frozenset(
    {
        IterationKind.TRANSFER_ORIGINAL,
        IterationKind.TRANSFER_EXTENDED,
        IterationKind.TRANSFER_NOISE_SCALED,
    }
)


@dataclass(frozen=True)
class IterationMode:
    """Update rule plus the feedback gain alpha (the analysis fixes alpha=1)."""

    kind: IterationKind
    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha != 1.0 and self.kind in _TRANSFER_KINDS:
            warnings.warn(
                "alpha != 1 is outside the analyzed regime; bound computations "
                "assume alpha = 1",
                stacklevel=2,
            )


@dataclass(frozen=True)
class Constant:
    """Fixed step size beta > 0."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError(f"constant step size must be positive, got {self.beta}")


@dataclass(frozen=True)
class PolyDecay:
    """Diminishing steps beta_k = beta0 / (k+1)^r with r in (0.5, 1].

    The exponent range makes sum(beta_k) diverge while sum(beta_k^2) converges.
    """

    beta0: float
    r: float

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ParameterError(f"beta0 must be positive, got {self.beta0}")
        if not (0.5 < self.r <= 1.0):
            raise ParameterError(f"decay exponent must lie in (0.5, 1], got {self.r}")


StepSchedule = Constant | PolyDecay


def schedule_value(sched: StepSchedule, k: int) -> float:
    """Step size at iteration k (k >= 0)."""
    if k < 0:
        raise ParameterError(f"iteration index must be >= 0, got {k}")
    if isinstance(sched, Constant):
        return sched.beta
    return sched.beta0 / (k + 1) ** sched.r


def schedule_values(sched: StepSchedule, count: int) -> np.ndarray:
    """Step sizes for iterations 0..count-1 as one array."""
    if isinstance(sched, Constant):
        return np.full(count, sched.beta)
    k = np.arange(count, dtype=np.float64)
    return sched.beta0 / (k + 1.0) ** sched.r


@dataclass(frozen=True)
class NoiseModel:
    """Per-coordinate Gaussian noise variance and the stream seed."""

    sigma_squared: float
    seed: int

    def __post_init__(self):
        if self.sigma_squared < 0:
            raise ParameterError(f"noise variance must be >= 0, got {self.sigma_squared}")
        if not 0 <= self.seed <= MASK64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class RunConfig:
    mode: IterationMode
    schedule: StepSchedule
    noise: NoiseModel
    K: int
    record_states: bool = False

    def __post_init__(self):
        if self.K < 0:
            raise ParameterError(f"iteration count must be >= 0, got {self.K}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One run: E(s^(k)) for k = 0..K, the final state, optional states."""

    energies: np.ndarray
    final_state: np.ndarray
    seed_used: int
    clamp_events: int
    states: np.ndarray | None = None


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream keyed directly by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & MASK64))


def substream_seed(base_seed: int, index: int) -> int:
    """Seed of run `index` inside an ensemble: base XOR index."""
    return (base_seed ^ index) & MASK64


def transfer(x) -> np.ndarray:
    """Modulator transfer cos^2(x - pi/4) - 1/2 == sin(2x)/2, elementwise."""
    return 0.5 * np.sin(2.0 * np.asarray(x, dtype=np.float64))


def feedback(p: CouplingProblem, s, beta_k: float, mode: IterationMode, zeta) -> np.ndarray:
    """Feedback vector driving the modulator for the transfer modes.

    For the noise-scaled rule the noise enters here, scaled by the step
    size; for the other two it is added inside the transfer argument
    instead.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (p.n,):
        raise DimensionError(f"state has shape {s.shape}, expected ({p.n},)")
    if mode.kind is IterationKind.TRANSFER_ORIGINAL:
        return mode.alpha * s - beta_k * (p.J @ s)
    if mode.kind is IterationKind.TRANSFER_EXTENDED:
        return mode.alpha * s - beta_k * (p.Q @ s + p.h)
    if mode.kind is IterationKind.TRANSFER_NOISE_SCALED:
        zeta = np.asarray(zeta, dtype=np.float64)
        return mode.alpha * s - beta_k * (p.Q @ s + p.h - zeta)
    raise ParameterError(f"{mode.kind.value} has no feedback vector")


def _apply(p, S, beta_k, mode, zeta):
    """Advance a (runs, n) state block one iteration; returns (S', clamps)."""
    kind = mode.kind
    if kind is IterationKind.TRANSFER_ORIGINAL:
        F = mode.alpha * S - beta_k * (S @ p.J.T)
        return transfer(F + zeta), 0
    G = S @ p.Q + p.h
    if kind is IterationKind.TRANSFER_EXTENDED:
        return transfer(mode.alpha * S - beta_k * G + zeta), 0
    if kind is IterationKind.TRANSFER_NOISE_SCALED:
        return transfer(mode.alpha * S - beta_k * (G - zeta)), 0
    if kind is IterationKind.LINEARIZED:
        raw = S - beta_k * G + zeta
    elif kind is IterationKind.LINEARIZED_NOISE_SCALED:
        raw = S - beta_k * (G - zeta)
    else:
        raise ParameterError(f"unknown iteration kind {kind}")
    clipped = np.clip(raw, -BOX_HALF, BOX_HALF)
    clamps = int(np.count_nonzero(raw != clipped))
    return clipped, clamps


def step(
    p: CouplingProblem,
    s,
    k: int,
    sched: StepSchedule,
    mode: IterationMode,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> np.ndarray:
    """One iteration from state s, drawing exactly n Gaussian variates."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (p.n,):
        raise DimensionError(f"state has shape {s.shape}, expected ({p.n},)")
    zeta = np.sqrt(noise.sigma_squared) * rng.standard_normal(p.n)
    S, _ = _apply(p, s[None, :], schedule_value(sched, k), mode, zeta[None, :])
    return S[0]


def simulate_batch(
    p: CouplingProblem,
    S0: np.ndarray,
    mode: IterationMode,
    sched: StepSchedule,
    sigma_squared: float,
    seeds,
    K: int,
    record_states: bool = False,
):
    """Run len(seeds) trajectories in lockstep from the rows of S0.

    Each row owns its own Philox substream and consumes n variates per
    iteration, so row i reproduces the noise stream of a standalone run
    seeded with seeds[i].  Returns (energies, final_states, clamp_events,
    states) with energies of shape (K+1, runs); energies[k] is evaluated
    before step k.
    """
    M = len(seeds)
    n = p.n
    S = np.array(S0, dtype=np.float64)
    if S.shape != (M, n):
        raise DimensionError(f"state block has shape {S.shape}, expected ({M}, {n})")
    gens = [make_rng(s) for s in seeds]
    sigma = float(np.sqrt(sigma_squared))
    betas = schedule_values(sched, K)
    energies = np.empty((K + 1, M))
    states = np.empty((K + 1, M, n)) if record_states else None
    clamp_events = 0
    zeta_block = None
    for k in range(K):
        j = k % NOISE_CHUNK
        if j == 0:
            span = min(NOISE_CHUNK, K - k)
            zeta_block = np.stack(
                [g.standard_normal((span, n)) for g in gens], axis=1
            )
            if sigma != 1.0:
                zeta_block *= sigma
        energies[k] = energies_of_rows(p, S)
        if record_states:
            states[k] = S
        S, c = _apply(p, S, betas[k], mode, zeta_block[j])
        clamp_events += c
    energies[K] = energies_of_rows(p, S)
    if record_states:
        states[K] = S
    return energies, S, clamp_events, states


def run(p: CouplingProblem, s0, config: RunConfig) -> Trajectory:
    """Iterate one trajectory for config.K steps, logging E(s^(k)).

    Deterministic given (problem, s0, config): the noise stream is fully
    determined by config.noise.seed.
    """
    s0 = validate_spin_state(s0, p.n)
    energies, S, clamps, states = simulate_batch(
        p,
        s0[None, :],
        config.mode,
        config.schedule,
        config.noise.sigma_squared,
        [config.noise.seed],
        config.K,
        record_states=config.record_states,
    )
    return Trajectory(
        energies=energies[:, 0],
        final_state=S[0],
        seed_used=config.noise.seed,
        clamp_events=clamps,
        states=states[:, 0, :] if states is not None else None,
    )


def zero_state(n: int) -> np.ndarray:
    """The machine's cold-start state (all spins undecided)."""
    return np.zeros(n)
