"""
Tests for path simulation, the action integral and the Feynman–Kac estimates.
"""

import numpy as np
import pytest

from ruelle.core.ctmc_core import validate_generator
from ruelle.core.cylinder_algebra import CylinderSpec
from ruelle.core.feynman_kac import (
    PathSample,
    action_integral,
    bridge_cylinder_eval,
    cylinder_frequency,
    fk_estimate,
    fk_estimate_stationary,
    fk_oracle,
    path_rng,
    sample_path,
    simulate,
    stationary_fk_weight,
)
from ruelle.core.perron import Potential
from ruelle.evals.identity_cases import random_generator, random_potential
from ruelle.utils.exceptions import (
    AnchorMismatchError,
    InsufficientPathsError,
    NonPositiveTimeError,
    StateOutOfRangeError,
    TimeBeyondHorizonError,
)

THREE_STATE = [[-3.0, 1.0, 2.0], [2.0, -2.5, 1.0], [1.0, 1.5, -3.0]]
P_HALF_21 = (1 - np.exp(-1.0)) / 2


def spec(*pairs):
    return CylinderSpec.of(pairs)


def within(estimate, expected, k=4.0):
    return abs(estimate.value - expected) <= k * estimate.std_error


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

def test_sample_path_is_deterministic(k2):
    first = sample_path(k2, 1, 5.0, seed=11)
    second = sample_path(k2, 1, 5.0, seed=11)
    assert first == second
    assert sample_path(k2, 1, 5.0, seed=12) != first


def test_sample_path_shape(k2):
    path = sample_path(k2, 2, 3.0, seed=4)
    assert path.states[0] == 2
    assert all(a != b for a, b in zip(path.states, path.states[1:]))
    assert list(path.jump_times) == sorted(path.jump_times)
    assert all(0.0 < s < 3.0 for s in path.jump_times)
    assert path.state_at(3.0) == path.states[-1]


def test_sample_path_needs_positive_horizon(k2):
    with pytest.raises(NonPositiveTimeError):
        sample_path(k2, 1, 0.0, seed=1)


def test_state_at_is_right_continuous():
    path = PathSample(jump_times=(0.5,), states=(1, 2), horizon=1.0)
    assert path.state_at(0.49) == 1
    assert path.state_at(0.5) == 2
    with pytest.raises(TimeBeyondHorizonError):
        path.state_at(1.5)


@pytest.mark.slow
def test_mean_holding_time(k2):
    holding = []
    for k in range(100_000):
        path = simulate(k2, 1, 50.0, path_rng(3, k))
        holding.append(path.jump_times[0] if path.jump_times else 50.0)
    assert np.mean(holding) == pytest.approx(1.0, abs=0.01)


def test_transition_frequency_at_half(k2):
    estimate = cylinder_frequency(k2, 1, 0.5, spec(("0.5", 2)), n_paths=20_000, seed=7)
    assert estimate.n_paths == 20_000
    assert within(estimate, P_HALF_21)


# ---------------------------------------------------------------------------
# Action integral
# ---------------------------------------------------------------------------

def test_action_integral_examples():
    jumping = PathSample(jump_times=(0.5,), states=(1, 2), horizon=2.0)
    constant = PathSample(jump_times=(), states=(1,), horizon=2.0)
    assert action_integral(jumping, Potential.zeros(2), 1.0) == 0.0
    assert action_integral(constant, Potential([1.0, 0.0]), 2.0) == pytest.approx(2.0)
    assert action_integral(jumping, Potential([1.0, 0.0]), 1.0) == pytest.approx(0.5)


def test_action_integral_beyond_horizon():
    path = PathSample(jump_times=(), states=(1,), horizon=1.0)
    with pytest.raises(TimeBeyondHorizonError):
        action_integral(path, Potential([1.0, 0.0]), 1.5)


def test_action_integral_is_additive(k2):
    V = Potential([0.7, -1.3])
    for seed in range(20):
        path = sample_path(k2, 1, 3.0, seed=seed)
        whole = action_integral(path, V, 3.0)
        head = action_integral(path, V, 1.25)
        tail = sum(V(path.state_at(s)) * 0.0005 for s in np.arange(1.25, 3.0, 0.0005) + 0.00025)
        assert whole == pytest.approx(head + tail, abs=5e-3)


# ---------------------------------------------------------------------------
# Feynman–Kac
# ---------------------------------------------------------------------------

def test_fk_without_potential_is_a_transition_probability(k2):
    estimate = fk_estimate(k2, Potential.zeros(2), 1, 2, 0.5, n_paths=20_000, seed=5)
    assert within(estimate, P_HALF_21)
    assert fk_oracle(k2, Potential.zeros(2), 1, 2, 0.5) == pytest.approx(0.3160603, abs=1e-6)


def test_fk_with_potential(k2, k2_potential):
    oracle = fk_oracle(k2, k2_potential, 1, 2, 1.0)
    assert oracle == pytest.approx(0.741029, abs=1e-4)
    estimate = fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=20_000, seed=9)
    assert within(estimate, oracle)
    assert estimate.target == {"i0": 1, "j0": 2, "t": 1.0}


@pytest.mark.slow
def test_fk_with_potential_at_full_size(k2, k2_potential):
    estimate = fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=100_000, seed=2024)
    assert within(estimate, fk_oracle(k2, k2_potential, 1, 2, 1.0), k=3.0)


def test_weighted_column_sum(k2, k2_potential):
    estimates = [fk_estimate(k2, k2_potential, 1, j, 1.0, n_paths=10_000, seed=13) for j in (1, 2)]
    combined_se = np.sqrt(sum(e.std_error**2 for e in estimates))
    expected = sum(fk_oracle(k2, k2_potential, 1, j, 1.0) for j in (1, 2))
    assert abs(sum(e.value for e in estimates) - expected) <= 4 * combined_se


def test_estimate_is_independent_of_workers(k2, k2_potential):
    serial = fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=600, seed=21)
    chunked = fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=600, seed=21, chunk_size=64)
    parallel = fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=600, seed=21, workers=2, chunk_size=100)
    assert serial == chunked == parallel


def test_fk_errors(k2, k2_potential):
    with pytest.raises(InsufficientPathsError):
        fk_estimate(k2, k2_potential, 1, 2, 1.0, n_paths=99, seed=1)
    with pytest.raises(NonPositiveTimeError):
        fk_estimate(k2, k2_potential, 1, 2, 0.0, n_paths=100, seed=1)


@pytest.mark.parametrize("i0, j0", [(0, 1), (4, 1), (1, 0), (1, 7)])
def test_fk_rejects_states_outside_the_chain(i0, j0):
    L = validate_generator(THREE_STATE)
    V = Potential([0.5, 0.0, -0.5])
    with pytest.raises(StateOutOfRangeError):
        fk_estimate(L, V, i0, j0, 1.0, n_paths=200, seed=1)


@pytest.mark.parametrize("state", [0, 4])
def test_paths_reject_states_outside_the_chain(state):
    L = validate_generator(THREE_STATE)
    with pytest.raises(StateOutOfRangeError):
        sample_path(L, state, 2.0, seed=1)
    with pytest.raises(StateOutOfRangeError):
        fk_estimate_stationary(L, Potential.zeros(3), state, 1.0, n_paths=200, seed=1)
    with pytest.raises(StateOutOfRangeError):
        bridge_cylinder_eval(L, state, 1.0, spec(("1", 3)))
    with pytest.raises(StateOutOfRangeError):
        cylinder_frequency(L, state, 1.0, spec(("1", 3)), n_paths=200, seed=1)


def test_frequency_rejects_cylinder_states_outside_the_chain(k2):
    with pytest.raises(StateOutOfRangeError):
        cylinder_frequency(k2, 1, 1.0, spec(("1", 3)), n_paths=200, seed=1)


def test_stationary_fk(k2, k2_potential):
    expected = stationary_fk_weight(k2, k2_potential, 2, 1.0)
    assert expected == pytest.approx(
        0.5 * (fk_oracle(k2, k2_potential, 1, 2, 1.0) + fk_oracle(k2, k2_potential, 2, 2, 1.0)), abs=1e-12
    )
    estimate = fk_estimate_stationary(k2, k2_potential, 2, 1.0, n_paths=20_000, seed=31)
    assert within(estimate, expected)


@pytest.mark.slow
def test_random_targets_are_accepted():
    rng = np.random.default_rng(41)
    accepted = 0
    for k in range(20):
        n = int(rng.integers(2, 5))
        L, V = random_generator(n, rng), random_potential(n, rng, bound=1)
        i0, j0 = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
        t = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
        estimate = fk_estimate(L, V, i0, j0, t, n_paths=10_000, seed=k)
        accepted += within(estimate, fk_oracle(L, V, i0, j0, t), k=3.0)
    assert accepted >= 19


# ---------------------------------------------------------------------------
# Bridge measure
# ---------------------------------------------------------------------------

def test_bridge_examples(k2):
    assert bridge_cylinder_eval(k2, 1, 0.5, spec(("0", 1))) == pytest.approx(1.0, abs=1e-15)
    assert bridge_cylinder_eval(k2, 1, 0.5, spec(("0", 1), ("0.5", 2))) == pytest.approx(0.3160603, abs=1e-6)
    assert bridge_cylinder_eval(k2, 1, 0.5, spec(("0.5", 2))) == pytest.approx(P_HALF_21, abs=1e-12)


def test_bridge_errors(k2):
    with pytest.raises(TimeBeyondHorizonError):
        bridge_cylinder_eval(k2, 1, 0.5, spec(("0", 1), ("1", 2)))
    with pytest.raises(AnchorMismatchError):
        bridge_cylinder_eval(k2, 1, 0.5, spec(("0", 2)))


def test_bridge_matches_simulation():
    L = validate_generator(THREE_STATE)
    c = spec(("0", 2), ("0.25", 1), ("1", 3))
    estimate = cylinder_frequency(L, 2, 1.0, c, n_paths=20_000, seed=17)
    assert within(estimate, bridge_cylinder_eval(L, 2, 1.0, c))
