"""Seeded instance generator: determinism and definiteness guarantees."""

import numpy as np
import pytest

from oeocim import (
    Definiteness,
    GeneratorKind,
    GeneratorSpec,
    ParameterError,
    generate,
    spectral_summary,
)


def test_same_spec_gives_identical_instances():
    spec = GeneratorSpec(n=6, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=0.8, seed=4)
    a = generate(spec)
    b = generate(spec)
    assert np.array_equal(a.J, b.J)
    assert np.array_equal(a.h, b.h)
    assert a.label == b.label


def test_seed_changes_instance():
    a = generate(GeneratorSpec(n=6, kind=GeneratorKind.SYMMETRIC_GAUSSIAN, seed=1))
    b = generate(GeneratorSpec(n=6, kind=GeneratorKind.SYMMETRIC_GAUSSIAN, seed=2))
    assert not np.array_equal(a.J, b.J)


def test_positive_definite_construction():
    p = generate(GeneratorSpec(n=8, kind=GeneratorKind.POSITIVE_DEFINITE, seed=7))
    summary = spectral_summary(p)
    assert summary.definiteness is Definiteness.POSITIVE_DEFINITE
    eigs = np.linalg.eigvalsh(p.Q)
    assert np.all(eigs >= 0.5 - 1e-9)
    assert np.all(eigs <= 2.0 + 1e-9)


def test_negative_definite_construction():
    p = generate(GeneratorSpec(n=8, kind=GeneratorKind.NEGATIVE_DEFINITE, seed=7))
    summary = spectral_summary(p)
    assert summary.definiteness is Definiteness.NEGATIVE_DEFINITE
    eigs = np.linalg.eigvalsh(p.Q)
    assert np.all(eigs <= -0.5 + 1e-9)


def test_indefinite_construction_splits_spectrum():
    p = generate(GeneratorSpec(n=8, kind=GeneratorKind.INDEFINITE, seed=7))
    summary = spectral_summary(p)
    assert summary.definiteness is Definiteness.INDEFINITE
    eigs = np.linalg.eigvalsh(p.Q)
    assert np.sum(eigs > 0) == 4
    assert np.sum(eigs < 0) == 4


def test_symmetric_gaussian_is_symmetric():
    p = generate(GeneratorSpec(n=8, kind=GeneratorKind.SYMMETRIC_GAUSSIAN, seed=7))
    assert np.array_equal(p.J, p.J.T)


def test_asymmetric_gaussian_keeps_symmetrized_hessian():
    p = generate(GeneratorSpec(n=8, kind=GeneratorKind.ASYMMETRIC_GAUSSIAN, seed=7))
    assert not np.array_equal(p.J, p.J.T)
    assert np.array_equal(p.Q, p.Q.T)
    assert np.allclose(p.Q, 0.5 * (p.J + p.J.T), rtol=0, atol=0)


def test_field_scale_sets_norm():
    p0 = generate(GeneratorSpec(n=6, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=0.0, seed=3))
    assert np.array_equal(p0.h, np.zeros(6))
    p1 = generate(GeneratorSpec(n=6, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=1.5, seed=3))
    assert abs(np.linalg.norm(p1.h) - 1.5) < 1e-12
    # the coupling draw is unaffected by the field draw that follows it
    assert np.array_equal(p0.J, p1.J)


def test_label_identifies_the_recipe():
    p = generate(GeneratorSpec(n=5, kind=GeneratorKind.INDEFINITE, field_scale=0.2, seed=9))
    assert p.label == "indefinite-n5-seed9"


def test_spec_validation():
    with pytest.raises(ParameterError):
        GeneratorSpec(n=0, kind=GeneratorKind.POSITIVE_DEFINITE)
    with pytest.raises(ParameterError):
        GeneratorSpec(n=4, kind=GeneratorKind.POSITIVE_DEFINITE, field_scale=-0.1)
    with pytest.raises(ParameterError):
        GeneratorSpec(n=1, kind=GeneratorKind.INDEFINITE)
    with pytest.raises(ParameterError):
        GeneratorSpec(n=4, kind=GeneratorKind.POSITIVE_DEFINITE, seed=1 << 64)
