"""Ising/QUBO instances: energies, gradients, spectral constants, rounding.

Spins sigma_i in {-1, +1} carry the discrete Hamiltonian
H(sigma) = 1/2 sigma^T J sigma + h^T sigma.  The machine relaxes them to
continuous s_i in [-1/2, 1/2]; the relaxed objective is
E(s) = 1/2 s^T J s + h^T s with gradient Q s + h, where Q = (J + J^T)/2
is the symmetrized coupling (the Hessian of E).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, SpinDomainError, UnsupportedSizeError

BOX_HALF = 0.5

# Above this size the 2^n vertex sweep for the gradient-norm bound is replaced
# by the analytic norm bound.
VERTEX_ENUM_MAX = 20

# Dense symmetric eigendecomposition cap (desk scale).
EIG_MAX = 512


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    NEGATIVE_DEFINITE = "negative_definite"
    NEGATIVE_SEMIDEFINITE = "negative_semidefinite"
    INDEFINITE = "indefinite"
    ZERO = "zero"


def _as_square_matrix(J) -> np.ndarray:
    J = np.asarray(J, dtype=np.float64)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise DimensionError(f"coupling matrix must be square, got shape {J.shape}")
    return J


@dataclass(frozen=True, eq=False)
class CouplingProblem:
    """An Ising instance: coupling matrix J (not required symmetric), field h.

    Immutable after construction; the symmetrized matrix Q is precomputed.
    """

    J: np.ndarray
    h: np.ndarray
    label: str | None = None

    def __post_init__(self):
        J = _as_square_matrix(self.J)
        h = np.asarray(self.h, dtype=np.float64)
        n = J.shape[0]
        if n < 1:
            raise DimensionError("problem needs at least one spin")
        if h.ndim != 1 or h.shape[0] != n:
            raise DimensionError(f"field has shape {h.shape}, expected ({n},)")
        if not np.all(np.isfinite(J)):
            raise DimensionError("coupling matrix contains non-finite entries")
        if not np.all(np.isfinite(h)):
            raise DimensionError("field contains non-finite entries")
        Q = (J + J.T) / 2.0
        for a in (J, h, Q):
            a.setflags(write=False)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.J.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Spectrum-derived constants of the symmetrized coupling Q.

    lambda_max is the smoothness constant of E; c_squared bounds
    ||grad E(s)||^2 over the box (exact vertex sweep when feasible).
    """

    Q: np.ndarray
    lambda_max: float
    lambda_min: float
    definiteness: Definiteness
    c_squared: float
    c_squared_exact: bool


def _check_state(p: CouplingProblem, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (p.n,):
        raise DimensionError(f"state has shape {s.shape}, expected ({p.n},)")
    return s


def validate_spin_state(s, n: int | None = None) -> np.ndarray:
    """Check a relaxed state: finite, right length, inside the box."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1 or (n is not None and s.shape[0] != n):
        raise DimensionError(f"state has shape {s.shape}, expected ({n},)")
    if not np.all(np.isfinite(s)):
        raise SpinDomainError("state contains non-finite entries")
    if np.any(np.abs(s) > BOX_HALF):
        raise SpinDomainError("state leaves the box [-1/2, 1/2]^n")
    return s


def validate_discrete_spins(sigma, n: int | None = None) -> np.ndarray:
    """Check a discrete configuration: every entry exactly -1 or +1."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 1 or (n is not None and sigma.shape[0] != n):
        raise DimensionError(f"spins have shape {sigma.shape}, expected ({n},)")
    if not np.all(np.abs(sigma) == 1.0):
        raise SpinDomainError("spins must be exactly -1 or +1")
    return sigma


def relaxed_energy(p: CouplingProblem, s) -> float:
    """E(s) = 1/2 s^T J s + h^T s."""
    s = _check_state(p, s)
    return float(0.5 * s @ (p.J @ s) + p.h @ s)


def discrete_energy(p: CouplingProblem, sigma) -> float:
    """Hamiltonian 1/2 sigma^T J sigma + h^T sigma for sigma in {-1, +1}^n."""
    sigma = _check_state(p, sigma)
    validate_discrete_spins(sigma, p.n)
    return float(0.5 * sigma @ (p.J @ sigma) + p.h @ sigma)


def gradient(p: CouplingProblem, s) -> np.ndarray:
    """grad E(s) = Q s + h with Q = (J + J^T)/2."""
    s = _check_state(p, s)
    return p.Q @ s + p.h


def round_to_spins(s) -> np.ndarray:
    """Round a relaxed state to discrete spins, sign(0) taken as +1."""
    s = np.asarray(s, dtype=np.float64)
    return np.where(s >= 0.0, 1.0, -1.0)


def sign_vector_blocks(n: int, block: int = 1 << 18):
    """Yield (start_index, S) blocks covering all 2^n vectors in {-1, +1}^n.

    Enumeration is lexicographic with -1 < +1 and the first coordinate most
    significant, so index 0 is all -1 and index 2^n - 1 is all +1.
    """
    total = 1 << n
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.uint64)
        bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
        yield start, 2.0 * bits.astype(np.float64) - 1.0


def energies_of_rows(p: CouplingProblem, S: np.ndarray) -> np.ndarray:
    """Relaxed energies of a batch of states, one per row of S."""
    return 0.5 * np.einsum("ij,ij->i", S @ p.J.T, S) + S @ p.h


def classify_eigenvalues(lambda_min: float, lambda_max: float) -> Definiteness:
    """Signature class of a symmetric matrix from its extreme eigenvalues.

    "Zero" eigenvalues are resolved at tolerance 1e-10 relative to the
    spectral scale.
    """
    tol = 1e-10 * max(1.0, abs(lambda_max), abs(lambda_min))
    if abs(lambda_max) <= tol and abs(lambda_min) <= tol:
        return Definiteness.ZERO
    if lambda_min > tol:
        return Definiteness.POSITIVE_DEFINITE
    if lambda_max < -tol:
        return Definiteness.NEGATIVE_DEFINITE
    if lambda_min >= -tol:
        return Definiteness.POSITIVE_SEMIDEFINITE
    if lambda_max <= tol:
        return Definiteness.NEGATIVE_SEMIDEFINITE
    return Definiteness.INDEFINITE


def gradient_norm_bound(p: CouplingProblem, spectral_norm: float) -> tuple[float, bool]:
    """sup over the box of ||Q s + h||^2, and whether it is exact.

    ||Q s + h||^2 is convex in s, so its maximum over the box sits at a
    vertex; for n <= 20 all 2^n vertices are swept.  Larger instances fall
    back to (sqrt(n)/2 * ||Q||_2 + ||h||_2)^2.
    """
    n = p.n
    if n <= VERTEX_ENUM_MAX:
        best = 0.0
        for _, S in sign_vector_blocks(n):
            G = (BOX_HALF * S) @ p.Q + p.h
            best = max(best, float(np.max(np.einsum("ij,ij->i", G, G))))
        return best, True
    bound = (0.5 * np.sqrt(n) * spectral_norm + float(np.linalg.norm(p.h))) ** 2
    return float(bound), False


def spectral_summary(p: CouplingProblem) -> SpectralSummary:
    """Eigen-extremes, definiteness class, and gradient-norm bound of Q."""
    if p.n > EIG_MAX:
        raise UnsupportedSizeError(
            f"dense eigendecomposition capped at n={EIG_MAX}, got n={p.n}"
        )
    eigs = np.linalg.eigvalsh(p.Q)
    lo, hi = float(eigs[0]), float(eigs[-1])
    c2, exact = gradient_norm_bound(p, max(abs(lo), abs(hi)))
    return SpectralSummary(
        Q=p.Q,
        lambda_max=hi,
        lambda_min=lo,
        definiteness=classify_eigenvalues(lo, hi),
        c_squared=c2,
        c_squared_exact=exact,
    )
