"""
The transfer operator ℒ^t on cylinder functions, the disintegration μ^w_t and
the composition endomorphism α_t = (· ∘ Θ_t).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ruelle.core.cylinder_algebra import (
    CylinderFunction,
    CylinderSpec,
    Kernel,
    PathMeasureP,
    TimeLike,
    TimePoint,
    anchor_all,
    anchored,
    chain_product,
    eval_fn,
    eval_P,
)
from ruelle.utils.exceptions import NonPositiveTimeError, UndecidableFutureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of a numerical identity and their distance."""

    lhs: float
    rhs: float
    residual: float

    @classmethod
    def of(cls, lhs: float, rhs: float) -> "IdentityCheck":
        return cls(lhs=float(lhs), rhs=float(rhs), residual=float(abs(lhs - rhs)))


def positive_time(t: TimeLike) -> TimePoint:
    """Parse an operator time, which must be strictly positive."""
    point = TimePoint.parse(t)
    if point.micros == 0:
        raise NonPositiveTimeError(0)
    return point


def past_weights(past: CylinderSpec, t: TimePoint, kernel: Kernel, initial: np.ndarray) -> np.ndarray:
    """
    Weight vector over the state b at time t produced by the past of a cylinder.

    Entry b is ``kernel(t - t_last)[b, a_last] · chain_product(past)``; an empty past
    gives ``kernel(t) · initial``.
    """
    if not past.constraints:
        return kernel(t.micros) @ initial
    last_time, last_state = past.constraints[-1]
    return kernel(t.micros - last_time.micros)[:, last_state - 1] * chain_product(past, initial, kernel)


def apply_past_kernel(
    f: CylinderFunction,
    t: TimeLike,
    kernel: Kernel,
    initial: Sequence[float],
    out_scale: Sequence[float],
) -> CylinderFunction:
    """
    Average the past of every term over the kernel and restart the path at time t.

    With (P^Δ, p0, 1/p0) this is ℒ^t; with (e^{Δ(L+V)}, p0, 1/p0) it is ℒ^t_V and with
    (e^{Δ(L+V-λI)}, μ_V, 1/μ_V) the normalized operator.

    Args:
        f: cylinder function; anchorless terms are split over X_0 first
        t: operator time (> 0)
        kernel: gap in microseconds -> n×n kernel
        initial: weight on X_0
        out_scale: factor applied at the new anchor b

    Returns:
        Σ_b W(b)·I{X_0 = b, future shifted back by t}
    """
    t = positive_time(t)
    initial = np.asarray(initial, dtype=np.float64)
    out_scale = np.asarray(out_scale, dtype=np.float64)
    n = len(initial)
    f.check_states(n)

    def restart(coeff: float, spec: CylinderSpec):
        past, future = spec.split(t)
        future = future.unshift(t)
        weights = past_weights(past, t, kernel, initial) * out_scale
        pinned = future.anchor
        states = [pinned] if pinned is not None else range(1, n + 1)
        for b in states:
            spec_b = future.merge(anchored(b))
            if spec_b is not None:
                yield coeff * weights[b - 1], spec_b

    result = anchor_all(f, n).map_terms(restart)
    logger.debug(f"Transfer at t={t}: {len(f)} terms -> {len(result)} terms")
    return result


def transfer_apply(P: PathMeasureP, t: TimeLike, f: CylinderFunction) -> CylinderFunction:
    """ℒ^t(f)(z) = ∫ f dμ^z_t."""
    return apply_past_kernel(f, t, P.kernel, P.p0, 1.0 / P.p0)


def disintegration_eval(P: PathMeasureP, w_constraints: CylinderSpec, t: TimeLike, c: CylinderSpec) -> float:
    """
    μ^w_t(c) for a path w known through the constraints w_constraints.

    w must be anchored at time 0 and must fix w(s - t) for every constraint time s ≥ t of c.
    """
    t = positive_time(t)
    c.check_states(P.n)
    w_constraints.check_states(P.n)
    start = w_constraints.anchor
    if start is None:
        raise UndecidableFutureError(t)

    past, future = c.split(t)
    for time, state in future.constraints:
        observed = w_constraints.state_at(time - t)
        if observed is None:
            raise UndecidableFutureError(time)
        if observed != state:
            return 0.0
    weights = past_weights(past, t, P.kernel, P.p0)
    return float(weights[start - 1] / P.p0[start - 1])


def compose_shift(f: CylinderFunction, t: TimeLike) -> CylinderFunction:
    """α_t(f) = f ∘ Θ_t."""
    return f.map_terms(lambda coeff, spec: [(coeff, spec.shift(t))])


def conditional_expectation(P: PathMeasureP, t: TimeLike, f: CylinderFunction) -> CylinderFunction:
    """E(f | F_t^+) = ℒ^t(f) ∘ Θ_t."""
    return compose_shift(transfer_apply(P, t, f), t)


def disintegration_identity_check(P: PathMeasureP, t: TimeLike, f: CylinderFunction) -> IdentityCheck:
    """
    ∫ μ^w_t(f) dP(w) against ∫ f dP.

    The outer integral runs over the cylinders w that fix w(0) and the shifted
    future of each term, which is all μ^w_t depends on.
    """
    t = positive_time(t)
    total = 0.0
    for coeff, spec in f.terms:
        _, future = spec.split(t)
        future = future.unshift(t)
        for b in range(1, P.n + 1):
            w = future.merge(anchored(b))
            if w is None:
                continue
            total += coeff * disintegration_eval(P, w, t, spec) * eval_P(P, w)
    return IdentityCheck.of(total, eval_fn(P, f))


def disintegration_identity_residual(P: PathMeasureP, t: TimeLike, f: CylinderFunction) -> float:
    return disintegration_identity_check(P, t, f).residual


def projection_defect(P: PathMeasureP, t: TimeLike, f: CylinderFunction) -> float:
    """Largest coefficient difference between E_t(E_t f) and E_t f."""
    once = conditional_expectation(P, t, f)
    twice = conditional_expectation(P, t, once)
    return twice.max_abs_difference(once)


def future_cylinder_check(
    P: PathMeasureP, t: TimeLike, f: CylinderFunction, B: CylinderSpec
) -> Optional[IdentityCheck]:
    """
    ∫_B E(f|F_t^+) dP against ∫_B f dP for a future cylinder B (every time ≥ t).

    Returns None when B constrains a time before t.
    """
    t = positive_time(t)
    if B.constraints and B.constraints[0][0] < t:
        return None
    indicator = CylinderFunction.indicator(B)
    lhs = eval_fn(P, conditional_expectation(P, t, f) * indicator)
    rhs = eval_fn(P, f * indicator)
    return IdentityCheck.of(lhs, rhs)
