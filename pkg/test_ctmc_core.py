"""
Tests for generator validation, the semigroup and the stationary vector.
"""

import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruelle.core.ctmc_core import (
    KernelCache,
    is_irreducible,
    semigroup,
    stationary_power_iteration,
    stationary_vector,
    uniformization_semigroup,
    validate_generator,
)
from ruelle.evals.identity_cases import random_generator
from ruelle.utils.exceptions import (
    ColumnSumDefectError,
    NegativeOffDiagonalError,
    NegativeTimeError,
    NonSquareError,
    ReducibleError,
    ZeroDiagonalError,
)

THREE_STATE = [[-2.0, 1.0, 1.0], [1.0, -1.0, 0.0], [1.0, 0.0, -1.0]]


def test_k2_is_valid(k2):
    assert k2.n == 2
    np.testing.assert_array_equal(k2.entries, [[-1.0, 1.0], [1.0, -1.0]])


def test_three_state_example_is_valid():
    L = validate_generator(THREE_STATE)
    assert L.n == 3
    np.testing.assert_allclose(L.entries.sum(axis=0), 0.0, atol=0.0)


@pytest.mark.parametrize(
    "raw, error",
    [
        ([[-1.0, 0.0], [1.0, 0.0]], ZeroDiagonalError),
        ([[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]], NonSquareError),
        ([[-1.0]], NonSquareError),
        ([[-1.0, -0.5], [1.0, -1.0]], NegativeOffDiagonalError),
        ([[-1.0, 1.0], [1.0 + 1e-6, -1.0]], ColumnSumDefectError),
        ([[-1.0, 0.0, 0.0], [1.0, -1.0, 1.0], [0.0, 1.0, -1.0]], ReducibleError),
    ],
)
def test_invalid_generators(raw, error):
    with pytest.raises(error) as excinfo:
        validate_generator(raw)
    assert excinfo.value.exit_code == 2


def test_exit_rates():
    L = validate_generator(THREE_STATE)
    assert [L.exit_rate(state) for state in (1, 2, 3)] == [2.0, 1.0, 1.0]


def test_tiny_column_defect_is_repaired():
    L = validate_generator([[-1.0, 1.0], [1.0 + 5e-13, -1.0]])
    assert np.all(L.entries.sum(axis=0) == 0.0)


def test_irreducibility_graph():
    assert is_irreducible(np.array(THREE_STATE))
    assert not is_irreducible(np.array([[-1.0, 0.0], [1.0, 0.0]]))


def test_semigroup_at_zero_is_identity(k2):
    np.testing.assert_array_equal(semigroup(k2, 0).entries, np.eye(2))


def test_semigroup_k2_closed_form(k2):
    P = semigroup(k2, 0.5).entries
    assert P[1, 0] == pytest.approx((1 - np.exp(-1.0)) / 2, abs=1e-12)
    assert P[0, 0] == pytest.approx(0.6839397, abs=1e-6)


def test_negative_time_is_rejected(k2):
    with pytest.raises(NegativeTimeError):
        semigroup(k2, -0.1)
    with pytest.raises(NegativeTimeError):
        uniformization_semigroup(k2, -0.1)


@pytest.mark.parametrize("sparse", [False, True])
def test_random_semigroups_against_uniformization(sparse):
    rng = np.random.default_rng(7)
    for _ in range(200):
        L = random_generator(int(rng.integers(2, 7)), rng, sparse=sparse)
        for t in (0.1, 1.0, 10.0):
            P = semigroup(L, t).entries
            np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-10)
            assert P.min() >= -1e-14
        np.testing.assert_allclose(semigroup(L, 1.0).entries, uniformization_semigroup(L, 1.0), atol=1e-9)


def test_ring_generators_are_sparse_and_irreducible():
    rng = np.random.default_rng(19)
    for n in range(2, 8):
        L = random_generator(n, rng, sparse=True, edge_probability=0.0)
        off_diagonal = L.entries[~np.eye(n, dtype=bool)]
        assert np.count_nonzero(off_diagonal) == n
        assert is_irreducible(L.entries)


def test_broken_ring_is_reducible():
    # 1 -> 2 -> 3 <-> 4, nothing returns to 1
    broken = [[-1.0, 0.0, 0.0, 0.0], [1.0, -1.0, 0.0, 0.0], [0.0, 1.0, -1.0, 1.0], [0.0, 0.0, 1.0, -1.0]]
    assert not is_irreducible(np.array(broken))
    with pytest.raises(ReducibleError):
        validate_generator(broken)


def test_sparse_semigroups_are_strictly_positive():
    rng = np.random.default_rng(37)
    for _ in range(50):
        n = int(rng.integers(4, 7))
        L = random_generator(n, rng, sparse=True, edge_probability=0.2)
        assert np.any(L.entries == 0.0)
        for t in (0.5, 1.0, 5.0):
            assert semigroup(L, t).entries.min() > 0.0
        assert stationary_vector(L).p0.min() > 0.0


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    s=st.floats(min_value=0.01, max_value=5.0),
    t=st.floats(min_value=0.01, max_value=5.0),
)
def test_semigroup_property(seed, s, t):
    L = random_generator(3, np.random.default_rng(seed))
    product = semigroup(L, s).entries @ semigroup(L, t).entries
    np.testing.assert_allclose(product, semigroup(L, s + t).entries, atol=1e-9)


def test_stationary_vector_examples(k2):
    np.testing.assert_allclose(stationary_vector(k2).p0, [0.5, 0.5], atol=1e-12)
    L = validate_generator(THREE_STATE)
    np.testing.assert_allclose(stationary_vector(L).p0, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)


def test_stationary_vector_is_fixed_by_semigroup():
    rng = np.random.default_rng(11)
    for _ in range(50):
        L = random_generator(int(rng.integers(2, 7)), rng)
        p0 = stationary_vector(L).p0
        assert p0.min() >= 1e-15
        assert p0.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(p0, stationary_power_iteration(L), atol=1e-10)
        for t in (0.1, 1.0, 10.0):
            np.testing.assert_allclose(semigroup(L, t).entries @ p0, p0, atol=1e-10)


def test_kernel_cache_concurrent_equals_serial(k2):
    calls = []

    def factory(micros):
        calls.append(micros)
        return semigroup(k2, micros / 1_000_000).entries

    cache = KernelCache(factory)
    results = []
    threads = [threading.Thread(target=lambda: results.append(cache(500_000))) for _ in range(8)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert len(cache) == 1
    assert all(result is results[0] for result in results)
    assert not results[0].flags.writeable
