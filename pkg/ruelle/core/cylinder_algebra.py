"""
Cylinder sets, finite linear combinations of their indicators, and the path measure P.

A cylinder constrains a path at finitely many times, ``{X_{t_1} = a_1, ..., X_{t_r} = a_r}``.
Times are exact multiples of one microsecond so that the comparisons the
transfer operators pivot on (``t_{j-1} < t <= t_j``) and term merging are exact.
States are 1-based, as in model files; matrix indices are ``state - 1``.
"""

import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import total_ordering
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ruelle.core.ctmc_core import Generator, KernelCache, StationaryVector, semigroup
from ruelle.utils.exceptions import (
    InvalidCylinderError,
    InvalidTimeError,
    NegativeTimeError,
    StateOutOfRangeError,
)

logger = logging.getLogger(__name__)

TIME_RESOLUTION = 1_000_000

TimeLike = Union["TimePoint", str, int, float, Decimal]
Kernel = Callable[[int], np.ndarray]


@total_ordering
@dataclass(frozen=True)
class TimePoint:
    """A nonnegative time stored as an integer number of microseconds."""

    micros: int

    def __post_init__(self):
        if self.micros < 0:
            raise NegativeTimeError(self.micros / TIME_RESOLUTION)

    @classmethod
    def parse(cls, value: TimeLike) -> "TimePoint":
        """Parse a decimal string, int, float or TimePoint (at most 6 fractional digits)."""
        if isinstance(value, TimePoint):
            return value
        if isinstance(value, bool):
            raise InvalidTimeError(value)
        try:
            decimal = Decimal(repr(value)) if isinstance(value, float) else Decimal(value)
        except (InvalidOperation, TypeError, ValueError):
            raise InvalidTimeError(value)
        if not decimal.is_finite():
            raise InvalidTimeError(value)
        scaled = decimal * TIME_RESOLUTION
        if scaled != scaled.to_integral_value():
            raise InvalidTimeError(value)
        if scaled < 0:
            raise NegativeTimeError(float(decimal))
        return cls(int(scaled))

    @classmethod
    def zero(cls) -> "TimePoint":
        return cls(0)

    @property
    def value(self) -> float:
        return self.micros / TIME_RESOLUTION

    def __add__(self, other: "TimePoint") -> "TimePoint":
        return TimePoint(self.micros + TimePoint.parse(other).micros)

    def __sub__(self, other: "TimePoint") -> "TimePoint":
        return TimePoint(self.micros - TimePoint.parse(other).micros)

    def __lt__(self, other: "TimePoint") -> bool:
        return self.micros < other.micros

    def __str__(self) -> str:
        whole, frac = divmod(self.micros, TIME_RESOLUTION)
        if frac == 0:
            return str(whole)
        return f"{whole}.{frac:06d}".rstrip("0")

    def __repr__(self) -> str:
        return f"TimePoint({self})"


Constraint = Tuple[TimePoint, int]


def _integral_state(value) -> int:
    """Accept integers and integral floats such as 2.0; anything else is malformed."""
    if isinstance(value, (bool, np.bool_)):
        raise InvalidCylinderError(f"States are integers, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)) and float(value).is_integer():
        return int(value)
    raise InvalidCylinderError(f"States are integers, got {value!r}")


@dataclass(frozen=True)
class CylinderSpec:
    """
    A finite list of (time, state) constraints with strictly increasing times.

    The empty spec is the whole path space.
    """

    constraints: Tuple[Constraint, ...] = ()

    def __post_init__(self):
        for (t_prev, _), (t_next, _) in zip(self.constraints, self.constraints[1:]):
            if not t_prev < t_next:
                raise InvalidCylinderError(f"Constraint times must be strictly increasing: {t_prev} then {t_next}")
        for _, state in self.constraints:
            if not isinstance(state, (int, np.integer)) or isinstance(state, bool) or state < 1:
                raise InvalidCylinderError(f"States are integers >= 1, got {state!r}")

    @classmethod
    def of(cls, pairs: Iterable[Tuple[TimeLike, int]]) -> "CylinderSpec":
        """Build a spec from unordered (time, state) pairs; duplicate times must agree."""
        by_time: Dict[TimePoint, int] = {}
        for time, state in pairs:
            point = TimePoint.parse(time)
            state = _integral_state(state)
            if by_time.get(point, state) != state:
                raise InvalidCylinderError(f"Conflicting constraints at time {point}")
            by_time[point] = state
        return cls(tuple(sorted(by_time.items())))

    @classmethod
    def from_json(cls, data: Sequence[Sequence]) -> "CylinderSpec":
        """Parse ``[["0", 1], ["0.5", 2]]``."""
        try:
            return cls.of((time, state) for time, state in data)
        except (TypeError, ValueError) as e:
            raise InvalidCylinderError(f"Malformed cylinder JSON: {e}")

    def to_json(self) -> List[List]:
        return [[str(time), int(state)] for time, state in self.constraints]

    @property
    def times(self) -> List[TimePoint]:
        return [time for time, _ in self.constraints]

    @property
    def anchor(self) -> Optional[int]:
        """The state constrained at time 0, if any."""
        if self.constraints and self.constraints[0][0].micros == 0:
            return self.constraints[0][1]
        return None

    @property
    def is_anchored(self) -> bool:
        return self.anchor is not None

    @property
    def last_time(self) -> Optional[TimePoint]:
        return self.constraints[-1][0] if self.constraints else None

    def state_at(self, time: TimeLike) -> Optional[int]:
        point = TimePoint.parse(time)
        for t, state in self.constraints:
            if t == point:
                return state
        return None

    def check_states(self, n: int) -> None:
        for _, state in self.constraints:
            if not 1 <= state <= n:
                raise StateOutOfRangeError(state, n)

    def merge(self, other: "CylinderSpec") -> Optional["CylinderSpec"]:
        """Intersection of two cylinders, or None when they conflict."""
        by_time = dict(self.constraints)
        for time, state in other.constraints:
            if by_time.setdefault(time, state) != state:
                return None
        return CylinderSpec(tuple(sorted(by_time.items())))

    def refine(self, time: TimeLike, state: int) -> Optional["CylinderSpec"]:
        return self.merge(CylinderSpec(((TimePoint.parse(time), int(state)),)))

    def shift(self, s: TimeLike) -> "CylinderSpec":
        """Advance every constraint by s, so that I_{shift(c, s)} = I_c ∘ Θ_s."""
        s = TimePoint.parse(s)
        return CylinderSpec(tuple((time + s, state) for time, state in self.constraints))

    def unshift(self, s: TimeLike) -> "CylinderSpec":
        """Move every constraint back by s; all constraint times must be ≥ s."""
        s = TimePoint.parse(s)
        return CylinderSpec(tuple((time - s, state) for time, state in self.constraints))

    def split(self, t: TimeLike) -> Tuple["CylinderSpec", "CylinderSpec"]:
        """Past (times < t) and future (times ≥ t) parts."""
        t = TimePoint.parse(t)
        past = tuple(c for c in self.constraints if c[0] < t)
        future = tuple(c for c in self.constraints if not c[0] < t)
        return CylinderSpec(past), CylinderSpec(future)

    def sort_key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((time.micros, int(state)) for time, state in self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __str__(self) -> str:
        inner = ", ".join(f"X_{time}={state}" for time, state in self.constraints)
        return "{" + inner + "}"


def anchored(state: int) -> CylinderSpec:
    """The cylinder {X_0 = state}."""
    return CylinderSpec(((TimePoint.zero(), int(state)),))


@dataclass(frozen=True)
class CylinderFunction:
    """A finite linear combination of cylinder indicators; identical specs are merged."""

    coefficients: Dict[CylinderSpec, float] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[float, CylinderSpec]]) -> "CylinderFunction":
        merged: Dict[CylinderSpec, float] = {}
        for coeff, spec in terms:
            merged[spec] = merged.get(spec, 0.0) + float(coeff)
        return cls({spec: coeff for spec, coeff in merged.items() if coeff != 0.0})

    @classmethod
    def indicator(cls, spec: CylinderSpec) -> "CylinderFunction":
        return cls.from_terms([(1.0, spec)])

    @classmethod
    def constant(cls, value: float = 1.0) -> "CylinderFunction":
        return cls.from_terms([(value, CylinderSpec())])

    @classmethod
    def zero(cls) -> "CylinderFunction":
        return cls({})

    @classmethod
    def from_json(cls, data: Sequence[Dict]) -> "CylinderFunction":
        """Parse ``[{"coeff": 1.0, "spec": [["0", 1]]}, ...]``."""
        try:
            return cls.from_terms((float(term["coeff"]), CylinderSpec.from_json(term["spec"])) for term in data)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidCylinderError(f"Malformed cylinder function JSON: {e}")

    def to_json(self) -> List[Dict]:
        return [{"coeff": coeff, "spec": spec.to_json()} for coeff, spec in self.terms]

    @property
    def terms(self) -> List[Tuple[float, CylinderSpec]]:
        """Terms in canonical order."""
        return [(self.coefficients[spec], spec) for spec in sorted(self.coefficients, key=CylinderSpec.sort_key)]

    def coefficient(self, spec: CylinderSpec) -> float:
        return self.coefficients.get(spec, 0.0)

    def map_terms(self, fn: Callable[[float, CylinderSpec], Iterable[Tuple[float, CylinderSpec]]]) -> "CylinderFunction":
        return CylinderFunction.from_terms(out for coeff, spec in self.terms for out in fn(coeff, spec))

    def scale(self, factor: float) -> "CylinderFunction":
        return CylinderFunction.from_terms((factor * coeff, spec) for coeff, spec in self.terms)

    def __add__(self, other: "CylinderFunction") -> "CylinderFunction":
        return CylinderFunction.from_terms(self.terms + other.terms)

    def __sub__(self, other: "CylinderFunction") -> "CylinderFunction":
        return self + other.scale(-1.0)

    def __neg__(self) -> "CylinderFunction":
        return self.scale(-1.0)

    def __mul__(self, other: Union["CylinderFunction", float]) -> "CylinderFunction":
        if isinstance(other, CylinderFunction):
            return self.product(other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def product(self, other: "CylinderFunction") -> "CylinderFunction":
        """Pointwise product; conflicting constraint pairs contribute nothing."""
        terms = []
        for c1, s1 in self.terms:
            for c2, s2 in other.terms:
                merged = s1.merge(s2)
                if merged is not None:
                    terms.append((c1 * c2, merged))
        return CylinderFunction.from_terms(terms)

    def evaluate_at(self, path: Callable[[float], int]) -> float:
        """Value of the function on a concrete path given as ``time -> state``."""
        total = 0.0
        for coeff, spec in self.terms:
            if all(path(time.value) == state for time, state in spec.constraints):
                total += coeff
        return total

    def is_close(self, other: "CylinderFunction", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        """Termwise comparison, treating missing terms as zero."""
        for spec in set(self.coefficients) | set(other.coefficients):
            a, b = self.coefficient(spec), other.coefficient(spec)
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    def max_abs_difference(self, other: "CylinderFunction") -> float:
        specs = set(self.coefficients) | set(other.coefficients)
        return max((abs(self.coefficient(s) - other.coefficient(s)) for s in specs), default=0.0)

    def check_states(self, n: int) -> None:
        for spec in self.coefficients:
            spec.check_states(n)

    def __len__(self) -> int:
        return len(self.coefficients)


def multiply_state0(f: CylinderFunction, h: Sequence[float]) -> CylinderFunction:
    """
    The function w ↦ h(w(0))·f(w).

    Anchored terms are scaled by h at their anchor; anchorless terms are first split
    into one anchored term per state.
    """
    h = np.asarray(h, dtype=np.float64)
    n = len(h)

    def scaled(coeff: float, spec: CylinderSpec):
        anchor = spec.anchor
        if anchor is not None:
            spec.check_states(n)
            yield coeff * h[anchor - 1], spec
            return
        for state in range(1, n + 1):
            yield coeff * h[state - 1], spec.merge(anchored(state))

    return f.map_terms(scaled)


def anchor_all(f: CylinderFunction, n: int) -> CylinderFunction:
    """Rewrite f so that every term constrains time 0."""
    return multiply_state0(f, np.ones(n))


def shift_spec(c: CylinderSpec, s: TimeLike) -> CylinderSpec:
    """Pull-back along the shift: I_{shift_spec(c, s)} = I_c ∘ Θ_s."""
    return c.shift(s)


def chain_product(spec: CylinderSpec, initial: np.ndarray, kernel: Kernel) -> float:
    """
    The Markov product ``K^{Δ_r}_{a_r a_{r-1}} ··· K^{Δ_1}_{a_1 a_0} m_{a_0}``.

    When time 0 is unconstrained, the first factor is ``(K^{t_1} m)_{a_1}``, i.e.
    a_0 is summed out. The empty spec gives ``Σ m``.

    Args:
        spec: cylinder with states in range
        initial: initial weight m (length n)
        kernel: maps a gap in microseconds to the n×n kernel matrix
    """
    if not spec.constraints:
        return float(np.sum(initial))
    first_time, first_state = spec.constraints[0]
    if first_time.micros == 0:
        value = float(initial[first_state - 1])
    else:
        value = float((kernel(first_time.micros) @ initial)[first_state - 1])
    for (t_prev, a_prev), (t_next, a_next) in zip(spec.constraints, spec.constraints[1:]):
        if value == 0.0:
            break
        value *= kernel(t_next.micros - t_prev.micros)[a_next - 1, a_prev - 1]
    return value


class PathMeasureP:
    """The stationary path measure P of the chain started from p0."""

    def __init__(self, generator: Generator, stationary: StationaryVector):
        self.generator = generator
        self.stationary = stationary
        self.n = generator.n
        self.kernel = KernelCache(lambda micros: semigroup(generator, micros / TIME_RESOLUTION).entries)

    @property
    def p0(self) -> np.ndarray:
        return self.stationary.p0

    def transition(self, gap: TimeLike) -> np.ndarray:
        return self.kernel(TimePoint.parse(gap).micros)


def eval_P(P: PathMeasureP, c: CylinderSpec) -> float:
    """P(c) by the Markov product formula started from p0."""
    c.check_states(P.n)
    return chain_product(c, P.p0, P.kernel)


def eval_fn(P: PathMeasureP, f: CylinderFunction) -> float:
    """∫ f dP."""
    return float(sum(coeff * eval_P(P, spec) for coeff, spec in f.terms))
