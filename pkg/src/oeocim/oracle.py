"""Ground-truth references: box-constrained optimum E*, discrete optimum,
PL-constant estimation, and the definiteness taxonomy driving noise guidance.

Every convergence verdict in the analysis layer is measured against the
values produced here, so the solvers are deliberately redundant: a dense
grid plus exact stationary-face enumeration for tiny instances, an exact
vertex sweep for concave objectives, and multi-start projected gradient
descent (explicitly uncertified) for everything else.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .dynamics import make_rng, substream_seed
from .exceptions import (
    FlatObjectiveError,
    ParameterError,
    UnsupportedSizeError,
)
from .model import (
    BOX_HALF,
    VERTEX_ENUM_MAX,
    CouplingProblem,
    Definiteness,
    SpectralSummary,
    energies_of_rows,
    gradient,
    relaxed_energy,
    round_to_spins,
    sign_vector_blocks,
    spectral_summary,
)

DISCRETE_ENUM_MAX = 24

# Minimum gap E - E* below which a sample is excluded from PL ratios.
PL_GAP_FLOOR = 1e-12


class OracleMethod(enum.Enum):
    VERTEX_SCAN = "VertexScan"
    GRID_REFINE = "GridRefine"
    MULTI_START_PROJ_GRAD = "MultiStartProjGrad"


@dataclass(frozen=True)
class SearchBudget:
    """Effort knobs for the uncertified multi-start search."""

    starts: int = 64
    max_iters: int = 20000
    tol: float = 1e-9

    def __post_init__(self):
        if self.starts < 1:
            raise ParameterError(f"need at least one start, got {self.starts}")
        if self.max_iters < 1:
            raise ParameterError(f"need at least one iteration, got {self.max_iters}")
        if not self.tol > 0:
            raise ParameterError(f"tolerance must be positive, got {self.tol}")


@dataclass(frozen=True, eq=False)
class RelaxedOptimum:
    """Claimed minimizer of E over the box.

    certified=True only for methods that provably cover the global minimum
    (grid + stationary-face enumeration, concave vertex sweep).  The
    multi-start search also records the final energy of every start in
    probe_energies so its merge can be audited.
    """

    s_star: np.ndarray
    e_star: float
    method: OracleMethod
    certified: bool
    probe_energies: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class PLEstimate:
    """Empirical Polyak-Lojasiewicz constant over the box.

    mu_hat is the minimum over box-uniform samples of
    (1/2)||grad E(s)||^2 / (E(s) - E*), excluding samples whose gap is
    below PL_GAP_FLOOR.
    """

    mu_hat: float
    sample_count: int
    min_ratio_location: np.ndarray

    def __post_init__(self):
        if not self.mu_hat > 0:
            raise ParameterError(f"PL constant must be positive, got {self.mu_hat}")


@dataclass(frozen=True)
class DefinitenessCall:
    """Definiteness class of Q plus whether noise is needed to leave s0=0."""

    label: Definiteness
    noise_required: bool


def _zero_tol(summary: SpectralSummary) -> float:
    return 1e-10 * max(1.0, abs(summary.lambda_max), abs(summary.lambda_min))


def classify_definiteness(summary: SpectralSummary) -> DefinitenessCall:
    """Map the spectrum of Q to the fixed-point taxonomy.

    Positive (semi)definite objectives are convex, so plain descent works
    and noise is optional.  Negative (semi)definite and indefinite ones
    leave the origin an unstable or saddle fixed point that noiseless
    dynamics never leave, hence noise_required.  An identically-zero Q has
    nothing to escape.
    """
    label = summary.definiteness
    noise = label in (
        Definiteness.NEGATIVE_DEFINITE,
        Definiteness.NEGATIVE_SEMIDEFINITE,
        Definiteness.INDEFINITE,
    )
    return DefinitenessCall(label=label, noise_required=noise)


def _grid_axis(resolution: float) -> np.ndarray:
    count = int(round(1.0 / resolution)) + 1
    return np.linspace(-BOX_HALF, BOX_HALF, count)


def _grid_best(p: CouplingProblem) -> np.ndarray:
    """Best point of a dense axis-aligned grid over the box.

    Resolution is 1e-3 per axis for n <= 2 and is widened just enough at
    n = 3, 4 to keep the sweep around a few million points.
    """
    n = p.n
    resolution = {1: 1e-3, 2: 1e-3, 3: 0.01, 4: 0.025}[n]
    axis = _grid_axis(resolution)
    if n == 1:
        S = axis[:, None]
        return S[int(np.argmin(energies_of_rows(p, S)))]
    tail = np.stack(
        [g.ravel() for g in np.meshgrid(*([axis] * (n - 1)), indexing="ij")], axis=1
    )
    best_e = np.inf
    best_s = None
    block = np.empty((tail.shape[0], n))
    block[:, 1:] = tail
    for x0 in axis:
        block[:, 0] = x0
        e = energies_of_rows(p, block)
        i = int(np.argmin(e))
        if e[i] < best_e:
            best_e = float(e[i])
            best_s = block[i].copy()
    return best_s


def _polish(p: CouplingProblem, s: np.ndarray, step: float, max_iters: int = 20000) -> np.ndarray:
    """Projected gradient descent until the projected gradient stalls."""
    s = np.clip(np.asarray(s, dtype=np.float64), -BOX_HALF, BOX_HALF)
    for _ in range(max_iters):
        s_next = np.clip(s - step * (p.Q @ s + p.h), -BOX_HALF, BOX_HALF)
        if np.linalg.norm(s_next - s) / step < 1e-12:
            return s_next
        s = s_next
    return s


def _stationary_face_candidates(p: CouplingProblem) -> list[np.ndarray]:
    """Stationary points of E restricted to every face of the box.

    Each of the 3^n patterns pins coordinates at -1/2, +1/2, or leaves
    them free; the free block is solved for a zero restricted gradient.
    The global box minimum satisfies first-order conditions on its active
    face, so it is always among these candidates (or on a face whose
    reduced Hessian is singular, which the grid stage covers).
    """
    n = p.n
    Q, h = p.Q, p.h
    out = []
    for pattern in itertools.product((-1, 0, 1), repeat=n):
        pat = np.array(pattern)
        free = pat == 0
        s = BOX_HALF * pat.astype(np.float64)
        if free.any():
            rhs = -(h[free] + Q[np.ix_(free, ~free)] @ s[~free])
            Qff = Q[np.ix_(free, free)]
            try:
                x = np.linalg.solve(Qff, rhs)
            except np.linalg.LinAlgError:
                x, _, rank, _ = np.linalg.lstsq(Qff, rhs, rcond=None)
                if rank < Qff.shape[0] and np.linalg.norm(Qff @ x - rhs) > 1e-9 * (
                    1.0 + np.linalg.norm(rhs)
                ):
                    continue
            if np.any(np.abs(x) > BOX_HALF + 1e-12):
                continue
            s[free] = np.clip(x, -BOX_HALF, BOX_HALF)
        out.append(s)
    return out


def _grid_refine(p: CouplingProblem) -> RelaxedOptimum:
    if p.n > 4:
        raise UnsupportedSizeError(f"grid search is limited to n <= 4, got n={p.n}")
    summary = spectral_summary(p)
    step = 1.0 / summary.lambda_max if summary.lambda_max > 0 else 0.1
    candidates = [_polish(p, _grid_best(p), step)]
    candidates.extend(_stationary_face_candidates(p))
    C = np.array(candidates)
    energies = energies_of_rows(p, C)
    i = int(np.argmin(energies))
    return RelaxedOptimum(
        s_star=C[i],
        e_star=float(energies[i]),
        method=OracleMethod.GRID_REFINE,
        certified=True,
        probe_energies=energies,
    )


def _vertex_scan(p: CouplingProblem) -> RelaxedOptimum:
    if p.n > VERTEX_ENUM_MAX:
        raise UnsupportedSizeError(
            f"vertex sweep is limited to n <= {VERTEX_ENUM_MAX}, got n={p.n}"
        )
    summary = spectral_summary(p)
    if summary.lambda_max > _zero_tol(summary):
        raise ParameterError(
            "vertex sweep certifies the minimum only for concave objectives "
            "(Q negative semidefinite)"
        )
    best_e = np.inf
    best_s = None
    for _, S in sign_vector_blocks(p.n):
        V = BOX_HALF * S
        e = energies_of_rows(p, V)
        i = int(np.argmin(e))
        if e[i] < best_e:
            best_e = float(e[i])
            best_s = V[i].copy()
    return RelaxedOptimum(
        s_star=best_s,
        e_star=best_e,
        method=OracleMethod.VERTEX_SCAN,
        certified=True,
        probe_energies=None,
    )


def _start_points(p: CouplingProblem, starts: int, seed: int) -> np.ndarray:
    """Deterministic starts (origin, field-aligned vertices, all vertices
    for tiny n) padded with box-uniform substream draws."""
    n = p.n
    fixed = [np.zeros(n)]
    sgn_h = round_to_spins(p.h)
    fixed.append(-BOX_HALF * sgn_h)
    fixed.append(BOX_HALF * sgn_h)
    if (1 << n) + len(fixed) <= starts:
        for _, S in sign_vector_blocks(n):
            fixed.extend(BOX_HALF * S)
    points = fixed[:starts]
    for j in range(len(points), starts):
        rng = make_rng(substream_seed(seed, j))
        points.append(rng.uniform(-BOX_HALF, BOX_HALF, n))
    return np.array(points)


def _multistart_projected_gradient(
    p: CouplingProblem, budget: SearchBudget, seed: int
) -> RelaxedOptimum:
    summary = spectral_summary(p)
    step = 1.0 / summary.lambda_max if summary.lambda_max > 0 else 0.1
    S = _start_points(p, budget.starts, seed)
    active = np.ones(len(S), dtype=bool)
    for _ in range(budget.max_iters):
        A = S[active]
        A_next = np.clip(A - step * (A @ p.Q + p.h), -BOX_HALF, BOX_HALF)
        pg = np.linalg.norm(A - A_next, axis=1) / step
        S[active] = A_next
        still = pg >= budget.tol
        if not still.any():
            active[:] = False
            break
        active[np.flatnonzero(active)[~still]] = False
    energies = energies_of_rows(p, S)
    i = int(np.argmin(energies))
    return RelaxedOptimum(
        s_star=S[i],
        e_star=float(energies[i]),
        method=OracleMethod.MULTI_START_PROJ_GRAD,
        certified=False,
        probe_energies=energies,
    )


def relaxed_optimum(
    p: CouplingProblem,
    budget: SearchBudget | None = None,
    method: OracleMethod | None = None,
    seed: int = 0,
) -> RelaxedOptimum:
    """Minimize E over the box, certified where the structure allows it.

    Default dispatch: dense grid plus stationary-face enumeration for
    n <= 4; exact vertex sweep for concave objectives up to n = 20;
    multi-start projected gradient descent otherwise, flagged uncertified.
    A specific method can be forced for cross-validation.
    """
    budget = budget if budget is not None else SearchBudget()
    if method is None:
        if p.n <= 4:
            method = OracleMethod.GRID_REFINE
        else:
            summary = spectral_summary(p)
            if p.n <= VERTEX_ENUM_MAX and summary.lambda_max <= _zero_tol(summary):
                method = OracleMethod.VERTEX_SCAN
            else:
                method = OracleMethod.MULTI_START_PROJ_GRAD
    if method is OracleMethod.GRID_REFINE:
        return _grid_refine(p)
    if method is OracleMethod.VERTEX_SCAN:
        return _vertex_scan(p)
    return _multistart_projected_gradient(p, budget, seed)


def discrete_optimum(p: CouplingProblem) -> tuple[np.ndarray, float]:
    """Exact ground state of the discrete Hamiltonian by enumeration.

    Ties are broken toward the lexicographically smallest configuration
    (with -1 ordered before +1): blocks arrive in lexicographic order and
    only strictly better energies replace the incumbent.
    """
    if p.n > DISCRETE_ENUM_MAX:
        raise UnsupportedSizeError(
            f"discrete enumeration is limited to n <= {DISCRETE_ENUM_MAX}, got n={p.n}"
        )
    best_e = np.inf
    best_sigma = None
    for _, S in sign_vector_blocks(p.n):
        e = energies_of_rows(p, S)
        i = int(np.argmin(e))
        if e[i] < best_e:
            best_e = float(e[i])
            best_sigma = S[i].copy()
    return best_sigma, best_e


def pl_constant_estimate(
    p: CouplingProblem,
    e_star: float,
    sample_count: int = 4096,
    rng: np.random.Generator | None = None,
) -> PLEstimate:
    """Estimate the PL constant as the worst sampled curvature ratio.

    Draws box-uniform states and returns the minimum of
    (1/2)||grad E||^2 / (E - e_star) over samples with a resolvable gap.
    The estimate is an infimum over a finite sample, so it upper-bounds
    the true constant; determinism comes from the supplied generator
    (default: a fixed stream).
    """
    if sample_count < 1000:
        raise ParameterError(
            f"PL estimation needs at least 1000 samples, got {sample_count}"
        )
    rng = rng if rng is not None else make_rng(0)
    S = rng.uniform(-BOX_HALF, BOX_HALF, (sample_count, p.n))
    gaps = energies_of_rows(p, S) - e_star
    G = S @ p.Q + p.h
    usable = gaps >= PL_GAP_FLOOR
    if not usable.any():
        raise FlatObjectiveError(
            "all sampled energies sit at the optimum; the objective is flat"
        )
    ratios = 0.5 * np.einsum("ij,ij->i", G[usable], G[usable]) / gaps[usable]
    i = int(np.argmin(ratios))
    return PLEstimate(
        mu_hat=float(ratios[i]),
        sample_count=sample_count,
        min_ratio_location=S[usable][i],
    )


def pl_ratio(p: CouplingProblem, s, e_star: float) -> float:
    """The pointwise PL ratio (1/2)||grad E(s)||^2 / (E(s) - e_star)."""
    g = gradient(p, s)
    gap = relaxed_energy(p, s) - e_star
    if gap < PL_GAP_FLOOR:
        raise FlatObjectiveError("state is at the optimum; PL ratio undefined")
    return float(0.5 * (g @ g) / gap)
