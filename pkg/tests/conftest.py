"""Shared fixtures: reference instances and their oracle values.

The positive-definite reference has an interior box minimizer, so plain
gradient descent converges to it without touching the walls; the
negative-definite reference has an unstable fixed point at the origin.
Both are deterministic constructions from fixed generator seeds.
"""

import numpy as np
import pytest

from oeocim import (
    CouplingProblem,
    GeneratorKind,
    GeneratorSpec,
    generate,
    pl_constant_estimate,
    relaxed_optimum,
)


@pytest.fixture(scope="session")
def pd_problem():
    return generate(
        GeneratorSpec(
            n=8, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=1.0, seed=8
        )
    )


@pytest.fixture(scope="session")
def pd_optimum(pd_problem):
    return relaxed_optimum(pd_problem)


@pytest.fixture(scope="session")
def pd_pl(pd_problem, pd_optimum):
    return pl_constant_estimate(pd_problem, pd_optimum.e_star)


@pytest.fixture(scope="session")
def nd_problem():
    return generate(
        GeneratorSpec(
            n=8, kind=GeneratorKind.NEGATIVE_DEFINITE, field_scale=0.0, seed=28
        )
    )


@pytest.fixture(scope="session")
def nd_optimum(nd_problem):
    return relaxed_optimum(nd_problem)


@pytest.fixture()
def ferro2():
    """Two ferromagnetically coupled spins: minima at the aligned vertices."""
    return CouplingProblem(J=np.array([[0.0, -2.0], [-2.0, 0.0]]), h=np.zeros(2))
