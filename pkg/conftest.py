"""
Shared fixtures: the symmetric two-state chain K2 and its potential V = (1, 0).
"""

import numpy as np
import pytest

from ruelle.core.ctmc_core import stationary_vector, validate_generator
from ruelle.core.cylinder_algebra import PathMeasureP
from ruelle.core.gibbs import GibbsEvaluator, GibbsMode
from ruelle.core.perron import Potential

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture
def k2():
    return validate_generator([[-1.0, 1.0], [1.0, -1.0]])


@pytest.fixture
def k2_measure(k2):
    return PathMeasureP(k2, stationary_vector(k2))


@pytest.fixture
def k2_potential():
    return Potential([1.0, 0.0])


@pytest.fixture
def k2_literal(k2_measure, k2_potential):
    return GibbsEvaluator(k2_measure, k2_potential, mode=GibbsMode.LITERAL)


@pytest.fixture
def k2_h_transform(k2_literal):
    return k2_literal.with_mode(GibbsMode.H_TRANSFORM)


@pytest.fixture
def k2_free(k2_measure):
    return GibbsEvaluator(k2_measure, Potential.zeros(2))
