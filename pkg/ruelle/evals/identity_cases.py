"""
Random models and cylinder functions for the identity suites.

Used by the verify command and by the test modules, so that both exercise
the same kind of input:

- dense generators with rates in [1, 3] (always irreducible)
- potentials with entries in [-2, 2]
- cylinder functions with 1-3 terms on the time grid 0, 0.25, ..., 3
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from ruelle.core.ctmc_core import Generator, validate_generator
from ruelle.core.cylinder_algebra import CylinderFunction, CylinderSpec, TimePoint
from ruelle.core.perron import Potential

GRID_STEP = 250_000
GRID_POINTS = 13


class IdentityName(Enum):
    """Identities checked by the verification runner"""
    NORMALIZATION = "normalization"
    DUAL_INVARIANCE = "dual_invariance"
    PULL_OUT = "pull_out"
    DUALITY = "duality"
    CONDITIONAL_EXPECTATION = "conditional_expectation"
    PROJECTION = "projection"
    DISINTEGRATION = "disintegration"
    PERRON_RESIDUALS = "perron_residuals"
    EIGENFUNCTION = "eigenfunction"
    LEFT_EIGENVECTOR = "left_eigenvector"
    FIXED_POINT = "fixed_point"
    GIBBS_DUALITY = "gibbs_duality"
    GIBBS_INVARIANCE = "gibbs_invariance"
    KOLMOGOROV_DEFECT = "kolmogorov_defect"
    PAIRED_NORMALIZER = "paired_normalizer"
    PAIRED_INVARIANCE = "paired_invariance"


@dataclass
class IdentityCase:
    """Inputs for one round of identity checks at a fixed time"""
    t: TimePoint
    f: CylinderFunction
    g: CylinderFunction
    reaching_g: CylinderFunction
    future: CylinderSpec
    description: str = ""


def random_generator(
    n: int,
    rng: np.random.Generator,
    low: float = 1.0,
    high: float = 3.0,
    sparse: bool = False,
    edge_probability: float = 0.3,
) -> Generator:
    """
    Rate matrix with off-diagonal rates drawn from [low, high].

    Dense unless ``sparse``; a sparse generator keeps the ring 1 → 2 → … → n → 1
    and each other edge with probability ``edge_probability``.
    """
    rates = rng.uniform(low, high, size=(n, n))
    if sparse:
        keep = rng.random((n, n)) < edge_probability
        ring = np.arange(n)
        keep[(ring + 1) % n, ring] = True
        rates = np.where(keep, rates, 0.0)
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=0))
    return validate_generator(rates)


def random_potential(n: int, rng: np.random.Generator, bound: float = 2.0) -> Potential:
    return Potential(rng.uniform(-bound, bound, size=n))


def _grid_time(index: int) -> TimePoint:
    return TimePoint(index * GRID_STEP)


def random_spec(
    n: int,
    rng: np.random.Generator,
    max_constraints: int = 3,
    anchor_probability: float = 0.7,
    first_index: int = 0,
    last_index: int = GRID_POINTS - 1,
) -> CylinderSpec:
    """A cylinder on grid points first_index..last_index, anchored at 0 with the given probability."""
    pairs = []
    if first_index == 0 and rng.random() < anchor_probability:
        pairs.append((_grid_time(0), int(rng.integers(1, n + 1))))
    start = max(first_index, 1) if pairs else first_index
    available = list(range(start, last_index + 1))
    extra = int(rng.integers(0 if pairs else 1, max_constraints + 1 - len(pairs)))
    for index in sorted(rng.choice(available, size=min(extra, len(available)), replace=False)):
        pairs.append((_grid_time(int(index)), int(rng.integers(1, n + 1))))
    return CylinderSpec.of(pairs)


def reaching(spec: CylinderSpec, t: TimePoint, n: int, rng: np.random.Generator) -> CylinderSpec:
    """spec itself if it constrains some time ≥ t, otherwise spec refined at a grid time in [t, t + 2]."""
    last = spec.last_time
    if last is not None and not last < t:
        return spec
    first = -(-t.micros // GRID_STEP)
    index = int(rng.integers(first, first + 9))
    refined = spec.refine(_grid_time(index), int(rng.integers(1, n + 1)))
    return refined if refined is not None else spec


def random_cylinder_function(
    n: int,
    rng: np.random.Generator,
    max_terms: int = 3,
    reach: Optional[TimePoint] = None,
) -> CylinderFunction:
    """1..max_terms terms with coefficients in [-1, 1]; with reach=t every term constrains a time ≥ t."""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        spec = random_spec(n, rng)
        if reach is not None:
            spec = reaching(spec, reach, n, rng)
        terms.append((float(rng.uniform(-1.0, 1.0)), spec))
    return CylinderFunction.from_terms(terms)


def random_future_spec(n: int, t: TimePoint, rng: np.random.Generator, max_constraints: int = 2) -> CylinderSpec:
    """A nonempty cylinder whose times are all ≥ t."""
    first = -(-t.micros // GRID_STEP)
    pairs = []
    for index in sorted(rng.choice(range(first, first + 9), size=int(rng.integers(1, max_constraints + 1)), replace=False)):
        pairs.append((_grid_time(int(index)), int(rng.integers(1, n + 1))))
    return CylinderSpec.of(pairs)


def generate_cases(n: int, times: List[TimePoint], n_random: int, seed: int) -> List[IdentityCase]:
    """n_random cases for every time, reproducible from seed."""
    rng = np.random.default_rng(seed)
    cases = []
    for t in times:
        for k in range(n_random):
            cases.append(
                IdentityCase(
                    t=t,
                    f=random_cylinder_function(n, rng),
                    g=random_cylinder_function(n, rng),
                    reaching_g=random_cylinder_function(n, rng, reach=t),
                    future=random_future_spec(n, t, rng),
                    description=f"random case {k} at t={t}",
                )
            )
    return cases
