"""
Tests for ℒ^t, the disintegration μ^w_t, α_t and the conditional expectation.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruelle.core.ctmc_core import stationary_vector
from ruelle.core.cylinder_algebra import CylinderFunction, CylinderSpec, PathMeasureP, TimePoint, eval_fn
from ruelle.core.gibbs import state0_function
from ruelle.core.transfer_operator import (
    compose_shift,
    conditional_expectation,
    disintegration_eval,
    disintegration_identity_residual,
    future_cylinder_check,
    projection_defect,
    transfer_apply,
)
from ruelle.evals.identity_cases import (
    random_cylinder_function,
    random_future_spec,
    random_generator,
)
from ruelle.utils.exceptions import NonPositiveTimeError, UndecidableFutureError

P_HALF_21 = (1 - np.exp(-1.0)) / 2
TIMES = ["0.25", "0.5", "1", "1.75", "3"]


def spec(*pairs):
    return CylinderSpec.of(pairs)


def indicator(*pairs):
    return CylinderFunction.indicator(spec(*pairs))


def random_case(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    L = random_generator(n, rng)
    return PathMeasureP(L, stationary_vector(L)), n, rng


def test_transfer_of_start_indicator(k2_measure):
    image = transfer_apply(k2_measure, "0.5", indicator(("0", 1)))
    assert image.coefficient(spec(("0", 1))) == pytest.approx(0.6839397, abs=1e-6)
    assert image.coefficient(spec(("0", 2))) == pytest.approx(0.3160603, abs=1e-6)
    assert len(image) == 2


def test_constraint_at_t_pins_the_anchor(k2_measure):
    image = transfer_apply(k2_measure, "0.5", indicator(("0", 1), ("0.5", 2)))
    assert image.terms == [(pytest.approx(P_HALF_21, abs=1e-12), spec(("0", 2)))]


def test_future_constraints_are_shifted_back(k2_measure):
    image = transfer_apply(k2_measure, "0.5", indicator(("0", 1), ("1.5", 2)))
    assert {s for _, s in image.terms} == {spec(("0", 1), ("1", 2)), spec(("0", 2), ("1", 2))}


def test_non_positive_time_is_rejected(k2_measure):
    with pytest.raises(NonPositiveTimeError):
        transfer_apply(k2_measure, 0, indicator(("0", 1)))


@pytest.mark.parametrize("t", TIMES)
def test_transfer_of_one_is_one(k2_measure, t):
    image = transfer_apply(k2_measure, t, CylinderFunction.constant(1.0))
    assert image.is_close(state0_function(np.ones(2)), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), t=st.sampled_from(TIMES))
def test_dual_invariance(seed, t):
    P, n, rng = random_case(seed)
    f = random_cylinder_function(n, rng)
    assert eval_fn(P, transfer_apply(P, t, f)) == pytest.approx(eval_fn(P, f), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), t=st.sampled_from(TIMES))
def test_pull_out_and_duality(seed, t):
    P, n, rng = random_case(seed)
    f = random_cylinder_function(n, rng)
    g = random_cylinder_function(n, rng)
    shifted = compose_shift(g, t)
    image = transfer_apply(P, t, f)
    assert transfer_apply(P, t, f * shifted).is_close(g * image, atol=1e-12, rtol=1e-12)
    assert eval_fn(P, image * g) == pytest.approx(eval_fn(P, f * shifted), abs=1e-10)


def test_disintegration_examples(k2_measure):
    w = spec(("0", 2))
    assert disintegration_eval(k2_measure, w, "0.5", spec(("0", 1))) == pytest.approx(0.3160603, abs=1e-6)
    assert disintegration_eval(k2_measure, w, "0.5", spec(("0", 1), ("0.5", 1))) == 0.0
    assert disintegration_eval(k2_measure, w, "0.5", CylinderSpec()) == pytest.approx(1.0, abs=1e-12)


def test_disintegration_needs_the_future_coordinates(k2_measure):
    with pytest.raises(UndecidableFutureError):
        disintegration_eval(k2_measure, spec(("0", 2)), "0.5", spec(("0", 1), ("1", 2)))
    with pytest.raises(UndecidableFutureError):
        disintegration_eval(k2_measure, spec(("1", 2)), "0.5", spec(("0", 1)))


def test_disintegration_matches_transfer_coefficients(k2_measure):
    c = spec(("0", 1), ("0.25", 2))
    image = transfer_apply(k2_measure, "0.5", CylinderFunction.indicator(c))
    for b in (1, 2):
        w = spec(("0", b))
        assert disintegration_eval(k2_measure, w, "0.5", c) == pytest.approx(image.coefficient(w), abs=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_disintegration_integrates_to_P(seed):
    P, n, rng = random_case(seed)
    f = random_cylinder_function(n, rng)
    assert disintegration_identity_residual(P, TIMES[seed % len(TIMES)], f) <= 1e-10


def test_compose_shift_examples():
    assert compose_shift(indicator(("0", 1)), 1).terms == [(1.0, spec(("1", 1)))]
    f = indicator(("0", 1), ("0.5", 2))
    assert compose_shift(f, 0).is_close(f, atol=0.0)


def test_conditional_expectation_on_future_cylinder(k2_measure):
    check = future_cylinder_check(k2_measure, "0.5", indicator(("0", 1)), spec(("0.5", 2)))
    assert check.lhs == pytest.approx(0.1580301, abs=1e-6)
    assert check.rhs == pytest.approx(0.1580301, abs=1e-6)
    assert check.residual <= 1e-12


def test_conditional_expectation_rejects_past_cylinders(k2_measure):
    assert future_cylinder_check(k2_measure, "0.5", indicator(("0", 1)), spec(("0.25", 2))) is None


def test_conditional_expectation_of_one(k2_measure):
    image = conditional_expectation(k2_measure, "1", CylinderFunction.constant(1.0))
    assert eval_fn(k2_measure, image) == pytest.approx(1.0, abs=1e-12)
    assert image.is_close(
        CylinderFunction.from_terms([(1.0, spec(("1", 1))), (1.0, spec(("1", 2)))]), atol=1e-12
    )


def test_future_measurable_function_is_fixed(k2_measure):
    t = TimePoint.parse("0.5")
    f = indicator(("0.5", 2), ("1", 1))
    image = conditional_expectation(k2_measure, t, f)
    assert image.is_close(f, atol=1e-12)
    g = indicator(("1", 2))
    expected = eval_fn(k2_measure, g)
    assert eval_fn(k2_measure, conditional_expectation(k2_measure, t, g)) == pytest.approx(expected, abs=1e-10)
    for refinement in (indicator(("0.75", 1)), indicator(("0.75", 2), ("2", 1))):
        lhs = eval_fn(k2_measure, conditional_expectation(k2_measure, t, g) * refinement)
        assert lhs == pytest.approx(eval_fn(k2_measure, g * refinement), abs=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_conditional_expectation_and_projection(seed):
    P, n, rng = random_case(seed)
    t = TimePoint.parse(TIMES[seed % len(TIMES)])
    f = random_cylinder_function(n, rng)
    B = random_future_spec(n, t, rng)
    assert future_cylinder_check(P, t, f, B).residual <= 1e-10
    assert projection_defect(P, t, f) <= 1e-10
