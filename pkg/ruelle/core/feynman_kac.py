"""
Monte Carlo simulation of the chain and the Feynman–Kac estimate

    Q(j0, i0)_t = E_{X_0 = i0}[exp(∫_0^t V(X_s) ds); X_t = j0] = e^{t(L+V)}_{j0, i0}.

Path k of a run with seed s draws from ``Philox(key = k·2^64 + s)``, so each path
has its own stream and estimates do not depend on how paths are split across
worker processes.
"""

import logging
import multiprocessing as mp
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm

from ruelle.core.ctmc_core import Generator, KernelCache, semigroup, stationary_vector
from ruelle.core.cylinder_algebra import TIME_RESOLUTION, CylinderSpec, chain_product
from ruelle.core.perron import Potential, perturbed
from ruelle.utils.exceptions import (
    AnchorMismatchError,
    InsufficientPathsError,
    NonPositiveTimeError,
    StateOutOfRangeError,
    TimeBeyondHorizonError,
)

logger = logging.getLogger(__name__)

MIN_PATHS = 100
SEED_MASK = (1 << 64) - 1


def path_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for path number ``stream`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(key=(int(stream) << 64) | (int(seed) & SEED_MASK)))


@dataclass(frozen=True)
class PathSample:
    """A right-continuous piecewise-constant trajectory on [0, horizon]."""

    jump_times: Tuple[float, ...]
    states: Tuple[int, ...]
    horizon: float

    def state_at(self, s: float) -> int:
        if s < 0 or s > self.horizon:
            raise TimeBeyondHorizonError(s, self.horizon)
        return self.states[bisect_right(self.jump_times, s)]

    def holding_times(self) -> List[Tuple[int, float]]:
        """(state, duration) for every segment, the last one cut at the horizon."""
        bounds = (0.0,) + self.jump_times + (self.horizon,)
        return [(state, bounds[k + 1] - bounds[k]) for k, state in enumerate(self.states)]

    def matches(self, spec: CylinderSpec) -> bool:
        return all(self.state_at(time.value) == state for time, state in spec.constraints)


@dataclass(frozen=True)
class FKEstimate:
    """Sample mean with its standard error."""

    value: float
    std_error: float
    n_paths: int
    target: Dict[str, Any] = field(default_factory=dict)


def check_state(L: Generator, state: int) -> int:
    """Reject a start or end state outside 1..n."""
    if not 1 <= state <= L.n:
        raise StateOutOfRangeError(state, L.n)
    return state


def simulate(L: Generator, start: int, T: float, rng: np.random.Generator) -> PathSample:
    """Jump-chain simulation: exponential holding times, jumps drawn from the state's column."""
    entries = L.entries
    state, time = start, 0.0
    jump_times: List[float] = []
    states = [start]
    while True:
        time += rng.exponential(1.0 / L.exit_rate(state))
        if time >= T:
            break
        column = entries[:, state - 1].copy()
        column[state - 1] = 0.0
        cumulative = np.cumsum(column)
        state = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")) + 1
        jump_times.append(time)
        states.append(state)
    return PathSample(jump_times=tuple(jump_times), states=tuple(states), horizon=float(T))


def sample_path(L: Generator, i0: int, T: float, seed: int) -> PathSample:
    """A single path from i0 on [0, T]; deterministic in (seed, i0, T)."""
    check_state(L, i0)
    if T <= 0:
        raise NonPositiveTimeError(T)
    return simulate(L, i0, T, path_rng(seed, 0))


def action_integral(p: PathSample, V: Potential, t: float) -> float:
    """∫_0^t V(X_s) ds along a sampled path."""
    if t > p.horizon:
        raise TimeBeyondHorizonError(t, p.horizon)
    total, start = 0.0, 0.0
    for state, duration in p.holding_times():
        if start >= t:
            break
        total += V(state) * (min(start + duration, t) - start)
        start += duration
    return total


def _start_state(rng: np.random.Generator, start: Optional[int], p0: Optional[np.ndarray]) -> int:
    if start is not None:
        return start
    return int(np.searchsorted(np.cumsum(p0), rng.random() * p0.sum(), side="right")) + 1


def _chunk_values(args) -> np.ndarray:
    L, V, start, p0, j0, t, seed, first, stop = args
    values = np.empty(stop - first)
    for k in range(first, stop):
        rng = path_rng(seed, k)
        path = simulate(L, _start_state(rng, start, p0), t, rng)
        if path.states[-1] == j0:
            values[k - first] = np.exp(action_integral(path, V, t))
        else:
            values[k - first] = 0.0
    return values


def _weights(
    L: Generator,
    V: Potential,
    start: Optional[int],
    p0: Optional[np.ndarray],
    j0: int,
    t: float,
    n_paths: int,
    seed: int,
    workers: int,
    chunk_size: int,
) -> np.ndarray:
    if start is not None:
        check_state(L, start)
    check_state(L, j0)
    if n_paths < MIN_PATHS:
        raise InsufficientPathsError(n_paths, MIN_PATHS)
    if t <= 0:
        raise NonPositiveTimeError(t)
    inputs = [
        (L, V, start, p0, j0, float(t), int(seed), first, min(first + chunk_size, n_paths))
        for first in range(0, n_paths, chunk_size)
    ]
    if workers > 1 and len(inputs) > 1:
        logger.info(f"Simulating {n_paths} paths in {len(inputs)} chunks on {workers} workers")
        with mp.Pool(processes=workers) as pool:
            outputs = pool.map(_chunk_values, inputs)
    else:
        outputs = [_chunk_values(args) for args in inputs]
    return np.concatenate(outputs)


def _estimate(values: np.ndarray, target: Dict[str, Any]) -> FKEstimate:
    n = len(values)
    return FKEstimate(
        value=float(np.mean(values)),
        std_error=float(np.std(values, ddof=1) / np.sqrt(n)),
        n_paths=n,
        target=target,
    )


def fk_estimate(
    L: Generator,
    V: Potential,
    i0: int,
    j0: int,
    t: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = 4096,
) -> FKEstimate:
    """
    Estimate e^{t(L+V)}_{j0,i0} from n_paths paths started at i0.

    Args:
        workers: process count; the estimate is identical for every value
        chunk_size: paths per worker task

    Returns:
        FKEstimate of exp(action)·1{X_t = j0}
    """
    values = _weights(L, V, i0, None, j0, t, n_paths, seed, workers, chunk_size)
    return _estimate(values, {"i0": i0, "j0": j0, "t": float(t)})


def fk_oracle(L: Generator, V: Potential, i0: int, j0: int, t: float) -> float:
    return float(expm(t * perturbed(L, V))[j0 - 1, i0 - 1])


def stationary_fk_weight(L: Generator, V: Potential, j0: int, t: float) -> float:
    """Σ_i e^{t(L+V)}_{j0,i} p0_i."""
    p0 = stationary_vector(L).p0
    return float(expm(t * perturbed(L, V))[j0 - 1] @ p0)


def fk_estimate_stationary(
    L: Generator,
    V: Potential,
    j0: int,
    t: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = 4096,
) -> FKEstimate:
    """Estimate stationary_fk_weight from paths whose start is drawn from p0."""
    p0 = np.array(stationary_vector(L).p0)
    values = _weights(L, V, None, p0, j0, t, n_paths, seed, workers, chunk_size)
    return _estimate(values, {"i0": "p0", "j0": j0, "t": float(t)})


def bridge_cylinder_eval(L: Generator, i0: int, t: float, c: CylinderSpec) -> float:
    """μ^t_{i0}(c): the chain started at i0, observed on [0, t]."""
    check_state(L, i0)
    c.check_states(L.n)
    last = c.last_time
    if last is not None and last.value > t:
        raise TimeBeyondHorizonError(last.value, t)
    anchor = c.anchor
    if anchor is not None and anchor != i0:
        raise AnchorMismatchError(anchor, i0)
    start = np.zeros(L.n)
    start[i0 - 1] = 1.0
    kernel = KernelCache(lambda micros: semigroup(L, micros / TIME_RESOLUTION).entries)
    return chain_product(c, start, kernel)


def cylinder_frequency(
    L: Generator, i0: int, t: float, c: CylinderSpec, n_paths: int, seed: int
) -> FKEstimate:
    """Fraction of simulated paths from i0 lying in c."""
    check_state(L, i0)
    c.check_states(L.n)
    if n_paths < MIN_PATHS:
        raise InsufficientPathsError(n_paths, MIN_PATHS)
    hits = np.array([float(simulate(L, i0, t, path_rng(seed, k)).matches(c)) for k in range(n_paths)])
    return _estimate(hits, {"i0": i0, "t": float(t), "spec": c.to_json()})
