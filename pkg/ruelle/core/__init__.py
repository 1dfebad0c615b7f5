"""
Core package initialization.
"""

from .ctmc_core import (
    Generator,
    StationaryVector,
    TransitionMatrix,
    semigroup,
    stationary_vector,
    validate_generator,
)
from .cylinder_algebra import (
    CylinderFunction,
    CylinderSpec,
    PathMeasureP,
    TimePoint,
    eval_fn,
    eval_P,
    multiply_state0,
    shift_spec,
)
from .transfer_operator import (
    IdentityCheck,
    compose_shift,
    conditional_expectation,
    disintegration_eval,
    transfer_apply,
)
from .perron import Potential, PerronTriple, asymptotic_limit_residual, density_fV, perron_triple
from .gibbs import (
    GibbsEvaluator,
    GibbsMode,
    eval_nu,
    eval_rho,
    fixed_point_residual,
    gibbs_duality_residual,
    gibbs_invariance_residual,
    kolmogorov_defect,
    normalized_transfer_apply,
    weighted_transfer_apply,
)
from .feynman_kac import (
    FKEstimate,
    PathSample,
    action_integral,
    bridge_cylinder_eval,
    fk_estimate,
    sample_path,
)

__all__ = [
    "Generator",
    "StationaryVector",
    "TransitionMatrix",
    "semigroup",
    "stationary_vector",
    "validate_generator",
    "CylinderFunction",
    "CylinderSpec",
    "PathMeasureP",
    "TimePoint",
    "eval_fn",
    "eval_P",
    "multiply_state0",
    "shift_spec",
    "compose_shift",
    "conditional_expectation",
    "disintegration_eval",
    "transfer_apply",
    "Potential",
    "PerronTriple",
    "asymptotic_limit_residual",
    "density_fV",
    "perron_triple",
    "GibbsEvaluator",
    "GibbsMode",
    "IdentityCheck",
    "eval_nu",
    "eval_rho",
    "fixed_point_residual",
    "gibbs_duality_residual",
    "gibbs_invariance_residual",
    "kolmogorov_defect",
    "normalized_transfer_apply",
    "weighted_transfer_apply",
    "FKEstimate",
    "PathSample",
    "action_integral",
    "bridge_cylinder_eval",
    "fk_estimate",
    "sample_path",
]
