"""
Tests for the Perron triple, f_V and the asymptotic limit.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from ruelle.core.ctmc_core import stationary_vector, validate_generator
from ruelle.core.perron import (
    Potential,
    asymptotic_limit_residual,
    centered_exponential,
    density_fV,
    perron_power_iteration,
    perron_residuals,
    perron_triple,
    perturbed,
    spectral_gap,
)
from ruelle.evals.identity_cases import random_generator, random_potential
from ruelle.utils.exceptions import NonPositiveTimeError

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def test_free_triple(k2):
    triple = perron_triple(k2, Potential.zeros(2))
    assert triple.lam == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(triple.mu, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(triple.u, [1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(triple.fV, [1.0, 1.0], atol=1e-12)


def test_k2_with_potential(k2, k2_potential):
    triple = perron_triple(k2, k2_potential)
    assert triple.lam == pytest.approx(GOLDEN, abs=1e-10)
    np.testing.assert_allclose(triple.mu, [GOLDEN, 1 - GOLDEN], atol=1e-10)
    np.testing.assert_allclose(triple.u, [1.1708204, 0.7236068], atol=1e-7)
    np.testing.assert_allclose(density_fV(triple, stationary_vector(k2)), [1.2360680, 0.7639320], atol=1e-7)


def test_triple_against_dense_oracle(k2, k2_potential):
    oracle = np.max(np.linalg.eigvals(perturbed(k2, k2_potential)).real)
    assert perron_triple(k2, k2_potential).lam == pytest.approx(oracle, abs=1e-10)


def test_constant_shift_moves_lambda_only(k2, k2_potential):
    base = perron_triple(k2, k2_potential)
    shifted = perron_triple(k2, k2_potential.shifted(0.75))
    assert shifted.lam == pytest.approx(base.lam + 0.75, abs=1e-10)
    np.testing.assert_allclose(shifted.u, base.u, atol=1e-10)
    np.testing.assert_allclose(shifted.mu, base.mu, atol=1e-10)


def test_potential_validation(k2):
    with pytest.raises(ValueError):
        Potential([1.0, np.inf])
    with pytest.raises(ValueError):
        Potential.for_generator([1.0, 2.0, 3.0], k2)
    assert Potential.for_generator(None, k2).is_zero


@pytest.mark.parametrize("sparse", [False, True])
def test_random_triples_satisfy_invariants(sparse):
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        L, V = random_generator(n, rng, sparse=sparse), random_potential(n, rng)
        p0 = stationary_vector(L)
        triple = perron_triple(L, V, p0)
        residuals = perron_residuals(L, V, triple)
        assert residuals["left"] <= 1e-10
        assert residuals["right"] <= 1e-10
        assert residuals["mu_sum"] <= 1e-12
        assert residuals["u_mu_sum"] <= 1e-12
        assert triple.u.min() > 0 and triple.mu.min() > 0
        assert float(triple.fV @ p0.p0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_semigroup_eigen_relations(s):
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        L, V = random_generator(n, rng), random_potential(n, rng)
        triple = perron_triple(L, V)
        Q = expm(s * perturbed(L, V))
        np.testing.assert_allclose(triple.u @ Q, np.exp(s * triple.lam) * triple.u, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(Q @ triple.mu, np.exp(s * triple.lam) * triple.mu, rtol=1e-9, atol=1e-9)


def test_power_iteration_oracle():
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        L, V = random_generator(n, rng), random_potential(n, rng)
        triple = perron_triple(L, V)
        oracle = perron_power_iteration(L, V)
        assert oracle["lambda"] == pytest.approx(triple.lam, abs=1e-9)
        np.testing.assert_allclose(oracle["mu"], triple.mu, atol=1e-9)
        np.testing.assert_allclose(oracle["u"], triple.u, atol=1e-9)


def test_spectral_gap_k2(k2, k2_potential):
    assert spectral_gap(k2, k2_potential) == pytest.approx(np.sqrt(5.0), abs=1e-10)


def test_centered_exponential_fixes_mu(k2, k2_potential):
    triple = perron_triple(k2, k2_potential)
    E = centered_exponential(k2, k2_potential, triple.lam, 2.0)
    np.testing.assert_allclose(E @ triple.mu, triple.mu, atol=1e-12)


def test_asymptotic_limit_examples(k2, k2_potential):
    triple = perron_triple(k2, k2_potential)
    for t in (0.5, 2.0, 20.0):
        assert asymptotic_limit_residual(k2, k2_potential, triple.u, t, triple) <= 1e-12
    assert asymptotic_limit_residual(k2, k2_potential, [1.0, 0.0], 20.0, triple) <= 1e-10
    v = [0.3, 1.7]
    assert asymptotic_limit_residual(k2, k2_potential, v, 2.0) > asymptotic_limit_residual(k2, k2_potential, v, 4.0)


def test_asymptotic_limit_needs_positive_time(k2, k2_potential):
    with pytest.raises(NonPositiveTimeError):
        asymptotic_limit_residual(k2, k2_potential, [1.0, 0.0], 0.0)


def test_asymptotic_limit_on_gapped_models():
    """Random models whose spectral gap is at least 1.5 reach 1e-8 by t = 20."""
    rng = np.random.default_rng(29)
    checked = 0
    while checked < 10:
        n = int(rng.integers(2, 5))
        L, V = random_generator(n, rng), random_potential(n, rng)
        if spectral_gap(L, V) < 1.5:
            continue
        v = rng.uniform(0.0, 1.0, size=n)
        assert asymptotic_limit_residual(L, V, v, 20.0) <= 1e-8
        checked += 1


def test_three_state_model():
    L = validate_generator([[-3.0, 1.0, 2.0], [2.0, -2.5, 1.0], [1.0, 1.5, -3.0]])
    V = Potential([0.5, -0.25, 0.0])
    triple = perron_triple(L, V)
    assert max(perron_residuals(L, V, triple).values()) <= 1e-10
