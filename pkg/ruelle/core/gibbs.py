"""
Weighted and normalized transfer operators, the Gibbs measure ν_V and the
equilibrium state ρ_V = f_V·ν_V on cylinder functions.

Two evaluators of ν_V are provided:

* ``GibbsMode.LITERAL`` evaluates the product
  ``E^{t_r-t_{r-1}}_{a_r a_{r-1}} ··· E^{t_1}_{a_1 a_0} μ_V(a_0)`` with
  ``E^s = e^{s(L+V-λI)}`` exactly as written for the given constraint list.
  Its columns do not sum to one unless u_V is constant, so it is a functional on
  written cylinders rather than a consistent set function.
* ``GibbsMode.H_TRANSFORM`` uses the kernels ``K^s_{ji} = u_j E^s_{ji} / u_i`` and
  the initial weight ``m = u_V μ_V``, a stationary Markov measure.

The LITERAL fixed point ∫ℒ̂^t_V g dν = ∫g dν holds for cylinder functions whose
terms all constrain some time ≥ t; H_TRANSFORM satisfies it for every g.
"""

import copy
import logging
from enum import Enum
from typing import Optional

import numpy as np

from ruelle.core.ctmc_core import KernelCache
from ruelle.core.cylinder_algebra import (
    TIME_RESOLUTION,
    CylinderFunction,
    CylinderSpec,
    PathMeasureP,
    TimeLike,
    TimePoint,
    anchor_all,
    chain_product,
    multiply_state0,
)
from ruelle.core.perron import Potential, PerronTriple, centered_exponential, perron_triple
from ruelle.core.transfer_operator import (
    IdentityCheck,
    apply_past_kernel,
    compose_shift,
    positive_time,
    transfer_apply,
)
from ruelle.utils.exceptions import AnchorRequiredError, SpectralOverflowError

logger = logging.getLogger(__name__)


class GibbsMode(Enum):
    LITERAL = "literal"
    H_TRANSFORM = "h_transform"


class GibbsEvaluator:
    """Evaluation context for ν_V, ρ_V and the operators ℒ^t_V, ℒ̂^t_V."""

    def __init__(
        self,
        path_measure: PathMeasureP,
        potential: Potential,
        triple: Optional[PerronTriple] = None,
        mode: GibbsMode = GibbsMode.LITERAL,
    ):
        self.P = path_measure
        self.V = potential
        self.n = path_measure.n
        self.triple = triple if triple is not None else perron_triple(path_measure.generator, potential, path_measure.stationary)
        self.mode = mode

        L, lam, u = path_measure.generator, self.triple.lam, self.triple.u
        self.centered = KernelCache(
            lambda micros: np.eye(self.n) if micros == 0 else centered_exponential(L, potential, lam, micros / TIME_RESOLUTION)
        )
        self.weighted = KernelCache(lambda micros: self._uncentered(micros))
        self.h_kernel = KernelCache(lambda micros: u[:, None] * self.centered(micros) / u[None, :])

    def _uncentered(self, micros: int) -> np.ndarray:
        s = micros / TIME_RESOLUTION
        with np.errstate(over="ignore", invalid="ignore"):
            result = np.exp(self.triple.lam * s) * self.centered(micros)
        if not np.all(np.isfinite(result)):
            raise SpectralOverflowError(f"e^{{s(L+V)}} overflows at s={s}")
        return result

    def with_mode(self, mode: GibbsMode) -> "GibbsEvaluator":
        """The same context in another mode; kernel caches are shared."""
        other = copy.copy(self)
        other.mode = mode
        return other

    @property
    def measure_kernel(self) -> KernelCache:
        return self.centered if self.mode is GibbsMode.LITERAL else self.h_kernel

    @property
    def initial_weight(self) -> np.ndarray:
        if self.mode is GibbsMode.LITERAL:
            return self.triple.mu
        return self.triple.u * self.triple.mu

    def eval_nu(self, c: CylinderSpec) -> float:
        c.check_states(self.n)
        if self.mode is GibbsMode.LITERAL and not c.is_anchored:
            raise AnchorRequiredError(details={"spec": c.to_json()})
        return chain_product(c, self.initial_weight, self.measure_kernel)

    def integrate(self, f: CylinderFunction) -> float:
        """∫ f dν_V; in LITERAL mode anchorless terms are split over X_0."""
        if self.mode is GibbsMode.LITERAL:
            f = anchor_all(f, self.n)
        return float(sum(coeff * self.eval_nu(spec) for coeff, spec in f.terms))


def weighted_transfer_apply(ctx: GibbsEvaluator, t: TimeLike, f: CylinderFunction) -> CylinderFunction:
    """ℒ^t_V(f) = ℒ^t(G_t·f): past factors P^Δ become e^{Δ(L+V)}."""
    return apply_past_kernel(f, t, ctx.weighted, ctx.P.p0, 1.0 / ctx.P.p0)


def normalized_transfer_apply(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> CylinderFunction:
    """ℒ̂^t_V(g) = (1/f_V)·ℒ^t(e^{∫(V-λ)}·g·f_V)."""
    return apply_past_kernel(g, t, ctx.centered, ctx.triple.mu, 1.0 / ctx.triple.mu)


def eval_nu(ctx: GibbsEvaluator, c: CylinderSpec) -> float:
    return ctx.eval_nu(c)


def eval_rho(ctx: GibbsEvaluator, c: CylinderSpec) -> float:
    """ρ_V(c) = ∫ f_V(w(0))·I_c dν_V."""
    return ctx.integrate(multiply_state0(CylinderFunction.indicator(c), ctx.triple.fV))


def state0_function(values: np.ndarray) -> CylinderFunction:
    """Σ_i values_i·I{X_0 = i}."""
    return multiply_state0(CylinderFunction.constant(1.0), values)


def eigenfunction_check(ctx: GibbsEvaluator, t: TimeLike) -> IdentityCheck:
    """
    ℒ^t_V f_V = e^{tλ} f_V, compared coefficientwise.

    lhs and rhs are the coefficient at the state where they differ most; the
    residual is relative to max(1, |e^{tλ} f_V|).
    """
    t = positive_time(t)
    fV = ctx.triple.fV
    image = weighted_transfer_apply(ctx, t, state0_function(fV))
    expected = np.exp(ctx.triple.lam * t.value) * fV
    got = np.array([image.coefficient(CylinderSpec(((TimePoint.zero(), b),))) for b in range(1, ctx.n + 1)])
    worst = int(np.argmax(np.abs(got - expected)))
    scale = max(1.0, float(np.max(np.abs(expected))))
    return IdentityCheck(lhs=float(got[worst]), rhs=float(expected[worst]), residual=float(np.max(np.abs(got - expected)) / scale))


def left_eigenvector_check(ctx: GibbsEvaluator, t: TimeLike) -> IdentityCheck:
    """e^{-tλ} u_V e^{t(L+V)} = u_V."""
    t = positive_time(t)
    u = ctx.triple.u
    image = u @ ctx.centered(t.micros)
    worst = int(np.argmax(np.abs(image - u)))
    return IdentityCheck.of(image[worst], u[worst])


def fixed_point_check(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> IdentityCheck:
    """∫ ℒ̂^t_V(g) dν_V against ∫ g dν_V in the evaluator's mode."""
    return IdentityCheck.of(ctx.integrate(normalized_transfer_apply(ctx, t, g)), ctx.integrate(g))


def fixed_point_residual(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> float:
    return fixed_point_check(ctx, t, g).residual


def gibbs_invariance_check(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> IdentityCheck:
    """
    ∫ e^{-∫_0^t V∘Θ_s}·[(1/f_V)ℒ^t(e^{∫_0^t V∘Θ_s}·g·f_V)]∘Θ_t dν_V against ∫ g dν_V.

    The weight e^{-∫(V-λ)} is moved across Θ_t with the pull-out identity, giving
    ∫ ℒ̂^t_V(e^{-∫(V-λ)})·ℒ̂^t_V(g) dν_V, and ℒ̂^t_V(e^{-∫(V-λ)}) = (1/f_V)ℒ^t(f_V)
    is replaced by 1. On cylinder functions that factor is (P^t μ_V)/μ_V, so the
    replacement is exact only when μ_V = p0; see paired_normalizer_defect.
    """
    t = positive_time(t)
    paired = state0_function(np.ones(ctx.n))
    lhs = ctx.integrate(paired * normalized_transfer_apply(ctx, t, g))
    return IdentityCheck.of(lhs, ctx.integrate(g))


def paired_normalizer(ctx: GibbsEvaluator, t: TimeLike) -> np.ndarray:
    """(1/f_V)·ℒ^t(f_V) as a function of X_0, computed from P."""
    t = positive_time(t)
    fV = ctx.triple.fV
    image = transfer_apply(ctx.P, t, state0_function(fV))
    return np.array([image.coefficient(CylinderSpec(((TimePoint.zero(), b),))) for b in range(1, ctx.n + 1)]) / fV


def paired_normalizer_defect(ctx: GibbsEvaluator, t: TimeLike) -> float:
    """max_b |(1/f_V)ℒ^t(f_V)(b) − 1|; zero when μ_V = p0."""
    return float(np.max(np.abs(paired_normalizer(ctx, t) - 1.0)))


def gibbs_invariance_residual(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> float:
    return gibbs_invariance_check(ctx, t, g).residual


def paired_invariance_check(ctx: GibbsEvaluator, t: TimeLike, g: CylinderFunction) -> IdentityCheck:
    """
    ∫ [(1/f_V)ℒ^t(f_V)]·ℒ̂^t_V(g) dν_V against ∫ g dν_V.

    The invariance chain before the paired factor is replaced by 1. Coincides
    with fixed_point_check when paired_normalizer_defect is zero.
    """
    t = positive_time(t)
    paired = state0_function(paired_normalizer(ctx, t))
    lhs = ctx.integrate(paired * normalized_transfer_apply(ctx, t, g))
    return IdentityCheck.of(lhs, ctx.integrate(g))


def gibbs_duality_check(
    ctx: GibbsEvaluator, t: TimeLike, f: CylinderFunction, g: CylinderFunction
) -> IdentityCheck:
    """
    ∫ ℒ̂^t_V(f)·g dν = ∫ ℒ̂^t_V(f·g∘Θ_t) dν = ∫ f·g∘Θ_t dν.

    g is split over X_0 first so that g∘Θ_t always constrains time t. lhs is the
    first integral, rhs the last; the residual is the larger of the two gaps.
    """
    t = positive_time(t)
    shifted = compose_shift(anchor_all(g, ctx.n), t)
    first = ctx.integrate(normalized_transfer_apply(ctx, t, f) * g)
    middle = ctx.integrate(normalized_transfer_apply(ctx, t, f * shifted))
    last = ctx.integrate(f * shifted)
    return IdentityCheck(lhs=first, rhs=last, residual=max(abs(first - middle), abs(middle - last)))


def gibbs_duality_residual(
    ctx: GibbsEvaluator, t: TimeLike, f: CylinderFunction, g: CylinderFunction
) -> float:
    return gibbs_duality_check(ctx, t, f, g).residual


def kolmogorov_defect(ctx: GibbsEvaluator, t: TimeLike) -> float:
    """max_a |Σ_c K^t_{c,a} − 1| for the evaluator's measure kernel."""
    t = positive_time(t)
    column_sums = ctx.measure_kernel(t.micros).sum(axis=0)
    return float(np.max(np.abs(column_sums - 1.0)))


def literal_past_defect(ctx: GibbsEvaluator, t: TimeLike, c: CylinderSpec) -> float:
    """
    Predicted LITERAL fixed-point residual for a cylinder lying entirely before t.

    Equals ν(c)·|Σ_b E^{t-t_r}_{b,a_r} − 1| with (t_r, a_r) the last constraint of c.
    """
    t = positive_time(t)
    last_time, last_state = c.constraints[-1]
    column_sum = ctx.centered(t.micros - last_time.micros)[:, last_state - 1].sum()
    return abs(ctx.with_mode(GibbsMode.LITERAL).eval_nu(c)) * abs(column_sum - 1.0)


def rho_total_mass(ctx: GibbsEvaluator) -> float:
    """Σ_i ρ_V{X_0 = i}; not 1 in general."""
    return float(sum(eval_rho(ctx, CylinderSpec(((TimePoint.zero(), i),))) for i in range(1, ctx.n + 1)))


def rho_shift_defect(ctx: GibbsEvaluator, c: CylinderSpec, s: TimeLike) -> float:
    """|ρ_V(Θ_s-pullback of c) − ρ_V(c)|."""
    return abs(eval_rho(ctx, c.shift(s)) - eval_rho(ctx, c))
