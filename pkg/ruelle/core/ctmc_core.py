"""
Generator validation, the transition semigroup P^t = e^{tL} and the stationary vector.

Matrices use the column convention throughout: entry (i, j) of a generator is the
jump rate from state j to state i, so columns of L sum to zero and columns of
e^{tL} sum to one.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Union

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components
from scipy.stats import poisson

from ruelle.utils.exceptions import (
    NonSquareError,
    ZeroDiagonalError,
    NegativeOffDiagonalError,
    ColumnSumDefectError,
    ReducibleError,
    NegativeTimeError,
    SolveFailureError,
)

logger = logging.getLogger(__name__)

COLUMN_SUM_TOLERANCE = 1e-12
STATIONARY_RESIDUAL_TOLERANCE = 1e-10

MatrixLike = Union[np.ndarray, Sequence[Sequence[float]]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Generator:
    """A validated, irreducible rate matrix in column convention."""

    n: int
    entries: np.ndarray

    def exit_rate(self, state: int) -> float:
        """Total rate of leaving ``state`` (1-based)."""
        return float(-self.entries[state - 1, state - 1])


@dataclass(frozen=True)
class TransitionMatrix:
    """The matrix e^{tL} for a fixed time t."""

    t: float
    entries: np.ndarray


@dataclass(frozen=True)
class StationaryVector:
    """The unique probability vector fixed by every P^t."""

    p0: np.ndarray


def is_irreducible(entries: np.ndarray) -> bool:
    """Whether the graph with an edge j→i for every positive off-diagonal rate is strongly connected."""
    adjacency = (np.asarray(entries) > 0).astype(np.int8)
    np.fill_diagonal(adjacency, 0)
    n_components, _ = connected_components(adjacency, directed=True, connection="strong")
    return n_components == 1


def validate_generator(raw: MatrixLike) -> Generator:
    """
    Validate a raw rate matrix against the generator hypotheses.

    Column sums within ``COLUMN_SUM_TOLERANCE`` of zero are repaired by moving the
    defect onto the diagonal.

    Args:
        raw: n×n matrix, entry (i, j) = rate from j to i

    Returns:
        The validated Generator
    """
    try:
        entries = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise NonSquareError(f"Generator is not a numeric matrix: {e}")

    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise NonSquareError(details={"shape": list(entries.shape)})
    n = entries.shape[0]
    if n < 2:
        raise NonSquareError(details={"shape": list(entries.shape)})
    if not np.all(np.isfinite(entries)):
        raise NonSquareError("Generator entries must be finite")

    diagonal = np.diag(entries)
    bad_diagonal = np.flatnonzero(diagonal >= 0)
    if bad_diagonal.size:
        raise ZeroDiagonalError(details={"states": [int(i) + 1 for i in bad_diagonal]})

    off_diagonal = entries.copy()
    np.fill_diagonal(off_diagonal, 0.0)
    negative = np.argwhere(off_diagonal < 0)
    if negative.size:
        raise NegativeOffDiagonalError(details={"entries": [[int(i) + 1, int(j) + 1] for i, j in negative]})

    defects = entries.sum(axis=0)
    worst = float(np.max(np.abs(defects)))
    if worst > COLUMN_SUM_TOLERANCE:
        raise ColumnSumDefectError(
            f"Largest column-sum defect {worst:.3e} exceeds {COLUMN_SUM_TOLERANCE:.0e}",
            details={"column_sums": defects.tolist()},
        )
    if worst > 0:
        logger.debug(f"Repairing column-sum defects up to {worst:.3e} on the diagonal")
        entries[np.diag_indices(n)] -= defects

    if not is_irreducible(entries):
        raise ReducibleError()

    return Generator(n=n, entries=_frozen(entries))


def semigroup(L: Generator, t: float) -> TransitionMatrix:
    """
    Compute P^t = e^{tL} by scaling and squaring with a Padé approximant.

    Args:
        L: validated generator
        t: nonnegative time

    Returns:
        TransitionMatrix for time t (the identity, exactly, at t = 0)
    """
    t = float(t)
    if t < 0:
        raise NegativeTimeError(t)
    if t == 0:
        return TransitionMatrix(t=0.0, entries=_frozen(np.eye(L.n)))
    return TransitionMatrix(t=t, entries=_frozen(expm(t * L.entries)))


def uniformization_semigroup(L: Generator, t: float, tol: float = 1e-15) -> np.ndarray:
    """
    Compute e^{tL} as Σ_k Poisson(k; qt) R^k with R = I + L/q, q = max exit rate.

    Independent of the Padé route; used as a test oracle.
    """
    t = float(t)
    if t < 0:
        raise NegativeTimeError(t)
    n = L.n
    if t == 0:
        return np.eye(n)
    q = float(np.max(-np.diag(L.entries)))
    R = np.eye(n) + L.entries / q
    rate = q * t
    k_max = int(poisson.isf(tol, rate)) + 10
    weights = poisson.pmf(np.arange(k_max + 1), rate)

    result = np.zeros((n, n))
    power = np.eye(n)
    for k in range(k_max + 1):
        result += weights[k] * power
        power = R @ power
    return result


def stationary_vector(L: Generator) -> StationaryVector:
    """
    Solve L p0 = 0 with the normalization row Σ p0 = 1 appended.

    Returns:
        StationaryVector with strictly positive entries
    """
    n = L.n
    system = np.vstack([L.entries, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0

    solution, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    if rank < n:
        raise SolveFailureError(f"Stationary system has rank {rank} < {n}")

    residual = float(np.max(np.abs(L.entries @ solution)))
    if residual > STATIONARY_RESIDUAL_TOLERANCE or np.any(solution <= 0):
        raise SolveFailureError(
            "Stationary solve produced an invalid vector",
            details={"residual": residual, "p0": solution.tolist()},
        )
    solution = solution / solution.sum()
    return StationaryVector(p0=_frozen(solution))


def stationary_power_iteration(L: Generator, iterations: int = 2000, tol: float = 1e-15) -> np.ndarray:
    """Stationary vector by power iteration on e^{L}; a test oracle."""
    step = expm(L.entries)
    p = np.full(L.n, 1.0 / L.n)
    for _ in range(iterations):
        updated = step @ p
        updated /= updated.sum()
        if np.max(np.abs(updated - p)) < tol:
            return updated
        p = updated
    return p


class KernelCache:
    """
    Thread-safe cache of matrices keyed by an exact time gap in microseconds.

    Concurrent callers may race to compute the same entry; the first stored value
    wins, so results are identical to serial evaluation.
    """

    def __init__(self, factory: Callable[[int], np.ndarray]):
        self._factory = factory
        self._store: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __call__(self, micros: int) -> np.ndarray:
        with self._lock:
            cached = self._store.get(micros)
        if cached is not None:
            return cached
        matrix = _frozen(self._factory(micros))
        with self._lock:
            return self._store.setdefault(micros, matrix)

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)
