"""
Tests of types and strong typicality.
"""
import numpy as np
import pytest

from pyHTSecrecy.probcore import (
    JointPmf,
    empirical_pmf,
    is_typical,
    joint_type,
    pairwise_typical,
    type_counts,
)
from pyHTSecrecy.utility.exceptions import DimensionError, OperatingConditionError


def test_empirical_pmf():
    p = empirical_pmf([0, 1, 1, 2], 3)
    assert p.probs == pytest.approx([0.25, 0.5, 0.25])
    assert list(type_counts([2, 2], 3)) == [0, 0, 2]
    with pytest.raises(DimensionError):
        empirical_pmf([], 2)
    with pytest.raises(DimensionError):
        empirical_pmf([0, 3], 3)


def test_type_of_concatenation_mixes_part_types():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.integers(0, 4, size=rng.integers(1, 30))
        b = rng.integers(0, 4, size=rng.integers(1, 30))
        whole = type_counts(np.concatenate([a, b]), 4)
        assert np.array_equal(whole, type_counts(a, 4) + type_counts(b, 4))
        mixed = (a.size * empirical_pmf(a, 4).probs + b.size * empirical_pmf(b, 4).probs) / (
            a.size + b.size
        )
        assert np.allclose(empirical_pmf(np.concatenate([a, b]), 4).probs, mixed, atol=1e-14)


@pytest.mark.critical
def test_boundary_is_typical():
    ref = np.array([0.5, 0.5])
    assert is_typical(([0, 0, 0, 1],), ref, 0.25)
    assert not is_typical(([0, 0, 0, 1],), ref, 0.2)


@pytest.mark.critical
def test_support_violation_is_atypical():
    assert not is_typical(([0, 1],), np.array([1.0, 0.0]), 1.0)
    ref = JointPmf([[0.5, 0.0], [0.0, 0.5]], ["U", "X"])
    assert is_typical(([0, 1], [0, 1]), ref, 0.1)
    assert not is_typical(([0, 1], [1, 1]), ref, 1.0)


def test_typicality_argument_checks():
    ref = JointPmf(np.full((2, 2), 0.25), ["U", "X"])
    with pytest.raises(OperatingConditionError):
        is_typical(([0], [0]), ref, 0.0)
    with pytest.raises(OperatingConditionError):
        pairwise_typical([[0, 1]], [[1, 0]], ref, -0.1)
    with pytest.raises(DimensionError):
        is_typical(([0, 1], [0]), ref, 0.1)
    with pytest.raises(DimensionError):
        is_typical(([0, 1],), ref, 0.1)


def test_joint_type_batched():
    a = np.array([[0, 1], [1, 1]])
    b = np.array([[1, 1], [0, 0]])
    types = joint_type([a, b], (2, 2))
    assert types.shape == (2, 4)
    assert types[0] == pytest.approx([0, 0.5, 0, 0.5])
    assert types[1] == pytest.approx([0, 0, 1.0, 0])


@pytest.mark.critical
def test_pairwise_matches_is_typical():
    rng = np.random.default_rng(3)
    mass = rng.dirichlet(np.ones(6)).reshape(2, 3)
    mass[1, 2] = 0.0
    ref = JointPmf(mass / mass.sum(), ["U", "Y"])
    words = rng.integers(0, 2, size=(7, 6))
    seqs = rng.integers(0, 3, size=(11, 6))
    for mu in (0.1, 0.2, 0.5):
        out = pairwise_typical(words, seqs, ref, mu, chunk_elements=20)
        for i in range(words.shape[0]):
            for j in range(seqs.shape[0]):
                assert out[i, j] == is_typical((words[i], seqs[j]), ref, mu)


def test_enlarging_mu_never_shrinks_typical_set():
    rng = np.random.default_rng(11)
    ref = JointPmf(rng.dirichlet(np.ones(4)).reshape(2, 2), ["U", "X"])
    words = rng.integers(0, 2, size=(5, 8))
    seqs = rng.integers(0, 2, size=(20, 8))
    small = pairwise_typical(words, seqs, ref, 0.1)
    large = pairwise_typical(words, seqs, ref, 0.2)
    assert np.all(large[small])
