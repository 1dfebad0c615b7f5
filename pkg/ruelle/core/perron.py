"""
Perron data of the perturbed generator L + V.

λ(V) is the eigenvalue of L + V with maximal real part, μ_V the right eigenvector
normalized to a probability vector and u_V the left eigenvector normalized by
Σ u_V μ_V = 1. For V = 0 this gives λ = 0, μ_V = p0 and u_V = 1.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.linalg import eig, expm

from ruelle.core.ctmc_core import Generator, StationaryVector, _frozen, stationary_vector
from ruelle.utils.exceptions import (
    DegenerateSpectrumError,
    NonPositiveTimeError,
    SpectralOverflowError,
)

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-9
SIMPLICITY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Potential:
    """A potential depending on w(0) only: V(w) = v[w(0) - 1]."""

    v: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.v, dtype=np.float64)
        if values.ndim != 1 or not np.all(np.isfinite(values)):
            raise ValueError("Potential must be a finite vector")
        object.__setattr__(self, "v", _frozen(values))

    @classmethod
    def zeros(cls, n: int) -> "Potential":
        return cls(np.zeros(n))

    @classmethod
    def for_generator(cls, values: Optional[Sequence[float]], L: Generator) -> "Potential":
        """Potential for L; missing values mean V = 0."""
        if values is None:
            return cls.zeros(L.n)
        potential = cls(np.asarray(values, dtype=np.float64))
        if len(potential.v) != L.n:
            raise ValueError(f"Potential has {len(potential.v)} values for {L.n} states")
        return potential

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.v)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.v)

    def __call__(self, state: int) -> float:
        return float(self.v[state - 1])

    def shifted(self, c: float) -> "Potential":
        return Potential(self.v + c)


@dataclass(frozen=True)
class PerronTriple:
    """(λ(V), u_V, μ_V) together with the density f_V = μ_V / p0."""

    lam: float
    u: np.ndarray
    mu: np.ndarray
    fV: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {"lambda": self.lam, "u": self.u.tolist(), "mu": self.mu.tolist(), "fV": self.fV.tolist()}

    @classmethod
    def from_values(cls, lam: float, u: Sequence[float], mu: Sequence[float], p0: StationaryVector) -> "PerronTriple":
        """Build a triple from given values without renormalizing them."""
        u, mu = _frozen(u), _frozen(mu)
        return cls(lam=float(lam), u=u, mu=mu, fV=_frozen(density_fV_values(mu, p0.p0)))


def perturbed(L: Generator, V: Potential) -> np.ndarray:
    return L.entries + V.matrix


def density_fV_values(mu: np.ndarray, p0: np.ndarray) -> np.ndarray:
    return np.asarray(mu) / np.asarray(p0)


def density_fV(triple: PerronTriple, p0: StationaryVector) -> np.ndarray:
    """f_V(i) = μ_V(i) / p0(i); Σ f_V p0 = 1."""
    return density_fV_values(triple.mu, p0.p0)


def _top_index(eigenvalues: np.ndarray) -> int:
    idx = int(np.argmax(eigenvalues.real))
    top = eigenvalues[idx]
    scale = max(1.0, abs(top))
    if abs(top.imag) > IMAGINARY_TOLERANCE * scale:
        raise DegenerateSpectrumError(
            f"Top eigenvalue {top} is not real", details={"eigenvalues": [str(x) for x in eigenvalues]}
        )
    others = np.delete(eigenvalues, idx)
    if others.size and np.min(np.abs(others - top)) <= SIMPLICITY_TOLERANCE * scale:
        raise DegenerateSpectrumError(
            f"Top eigenvalue {top.real} is not simple", details={"eigenvalues": [str(x) for x in eigenvalues]}
        )
    return idx


def perron_triple(L: Generator, V: Potential, p0: Optional[StationaryVector] = None) -> PerronTriple:
    """
    Dense eigen-decomposition of L + V.

    Args:
        L: validated irreducible generator
        V: potential
        p0: stationary vector of L (computed if omitted)

    Returns:
        PerronTriple with Σ μ = 1 and Σ u μ = 1
    """
    if p0 is None:
        p0 = stationary_vector(L)
    M = perturbed(L, V)
    eigenvalues, left, right = eig(M, left=True, right=True)
    idx = _top_index(eigenvalues)
    lam = float(eigenvalues[idx].real)

    mu = np.real(right[:, idx])
    mu = mu / mu.sum()
    u = np.real(left[:, idx])
    u = u / (u @ mu)
    if np.any(mu <= 0) or np.any(u <= 0):
        raise DegenerateSpectrumError(
            "Perron vectors are not strictly positive", details={"u": u.tolist(), "mu": mu.tolist()}
        )
    logger.debug(f"Perron triple: lambda={lam:.17g}")
    return PerronTriple(lam=lam, u=_frozen(u), mu=_frozen(mu), fV=_frozen(density_fV_values(mu, p0.p0)))


def spectral_gap(L: Generator, V: Potential) -> float:
    """λ(V) minus the largest real part among the remaining eigenvalues of L + V."""
    eigenvalues = np.linalg.eigvals(perturbed(L, V))
    order = np.sort(eigenvalues.real)[::-1]
    return float(order[0] - order[1])


def centered_exponential(L: Generator, V: Potential, lam: float, s: float) -> np.ndarray:
    """e^{s(L+V-λI)}, raising SpectralOverflowError if it is not finite."""
    M = perturbed(L, V) - lam * np.eye(L.n)
    with np.errstate(over="ignore", invalid="ignore"):
        result = expm(s * M)
    if not np.all(np.isfinite(result)):
        raise SpectralOverflowError(details={"s": s, "lambda": lam})
    return result


def asymptotic_limit_residual(
    L: Generator, V: Potential, v: Sequence[float], t: float, triple: Optional[PerronTriple] = None
) -> float:
    """‖e^{-tλ} v e^{t(L+V)} − (Σ v_i μ_i) u‖∞ with v acting as a row vector."""
    t = float(t)
    if t <= 0:
        raise NonPositiveTimeError(t)
    if triple is None:
        triple = perron_triple(L, V)
    v = np.asarray(v, dtype=np.float64)
    row = v @ centered_exponential(L, V, triple.lam, t)
    limit = float(v @ triple.mu) * triple.u
    return float(np.max(np.abs(row - limit)))


def perron_power_iteration(
    L: Generator, V: Potential, iterations: int = 20000, tol: float = 1e-15
) -> Dict[str, Any]:
    """
    λ, u and μ by power iteration on e^{L+V-cI}, c the largest diagonal entry.

    An oracle for perron_triple; returns a dict with keys lambda, u, mu.
    """
    M = perturbed(L, V)
    c = float(np.max(np.diag(M)))
    step = expm(M - c * np.eye(L.n))

    mu = np.full(L.n, 1.0 / L.n)
    u = np.ones(L.n)
    growth = 1.0
    for i in range(iterations):
        next_mu = step @ mu
        growth = next_mu.sum()
        next_mu /= growth
        next_u = u @ step
        next_u /= next_u.sum()
        converged = max(np.max(np.abs(next_mu - mu)), np.max(np.abs(next_u - u / u.sum()))) < tol
        mu, u = next_mu, next_u
        if converged:
            logger.debug(f"Power iteration converged after {i + 1} steps")
            break
    u = u / (u @ mu)
    return {"lambda": c + float(np.log(growth)), "u": u, "mu": mu}


def perron_residuals(L: Generator, V: Potential, triple: PerronTriple) -> Dict[str, float]:
    """Eigen-residuals and normalization defects of a triple."""
    M = perturbed(L, V)
    return {
        "left": float(np.max(np.abs(triple.u @ M - triple.lam * triple.u))),
        "right": float(np.max(np.abs(M @ triple.mu - triple.lam * triple.mu))),
        "mu_sum": float(abs(np.sum(triple.mu) - 1.0)),
        "u_mu_sum": float(abs(triple.u @ triple.mu - 1.0)),
    }
