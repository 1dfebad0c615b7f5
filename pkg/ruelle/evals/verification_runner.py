"""
Verification runner

Runs every identity suite on a loaded model and collects the outcome as a
VerificationReport:

- path-measure identities for ℒ^t (normalization, dual invariance, pull-out,
  duality with α_t, conditional expectation, projection, disintegration)
- Perron residuals
- Gibbs identities for ℒ^t_V and ℒ̂^t_V in both evaluator modes
- informational defects (Kolmogorov defect, paired normalizer, paired invariance)
"""

import logging
from typing import Any, Dict, List

import numpy as np

from ruelle.config.settings import Settings
from ruelle.core.cylinder_algebra import CylinderFunction, TimePoint, eval_fn
from ruelle.core.gibbs import (
    GibbsEvaluator,
    GibbsMode,
    eigenfunction_check,
    fixed_point_check,
    gibbs_duality_check,
    gibbs_invariance_check,
    kolmogorov_defect,
    left_eigenvector_check,
    paired_invariance_check,
    paired_normalizer_defect,
    state0_function,
)
from ruelle.core.perron import perron_residuals
from ruelle.core.transfer_operator import (
    IdentityCheck,
    compose_shift,
    conditional_expectation,
    disintegration_identity_check,
    future_cylinder_check,
    positive_time,
    projection_defect,
    transfer_apply,
)
from ruelle.evals.identity_cases import IdentityCase, IdentityName, generate_cases
from ruelle.models.requests import VerifyRequest
from ruelle.models.responses import IdentityRecord, VerificationReport
from ruelle.services.model_service import LoadedModel

logger = logging.getLogger(__name__)

PULL_OUT_TOLERANCE = 1e-12
EIGEN_TOLERANCE = 1e-10
NORMALIZATION_SUM_TOLERANCE = 1e-12


class VerificationRunner:
    """Evaluate the identity suites for one model."""

    def __init__(self, model: LoadedModel, settings: Settings):
        self.model = model
        self.settings = settings
        self.records: List[IdentityRecord] = []

    def _record(
        self,
        name: IdentityName,
        check: IdentityCheck,
        tolerance: float,
        informational: bool = False,
        relative: bool = False,
        **parameters: Any,
    ) -> IdentityRecord:
        if relative:
            tolerance = tolerance * max(1.0, abs(check.rhs))
        record = IdentityRecord(
            name=name.value,
            parameters={key: value for key, value in parameters.items() if value is not None},
            lhs=check.lhs,
            rhs=check.rhs,
            residual=check.residual,
            tolerance=tolerance,
            informational=informational,
        )
        if not record.passed and not informational:
            logger.warning(f"{name.value} failed: residual {record.residual:.3e} > {tolerance:.1e} ({record.parameters})")
        self.records.append(record)
        return record

    def _coefficient_record(
        self, name: IdentityName, got: CylinderFunction, expected: CylinderFunction, tolerance: float, **parameters
    ):
        """Termwise comparison; lhs and rhs are the P-integrals of both sides."""
        P = self.model.path_measure
        scale = max([1.0] + [abs(coeff) for coeff, _ in expected.terms])
        check = IdentityCheck(
            lhs=eval_fn(P, got), rhs=eval_fn(P, expected), residual=got.max_abs_difference(expected) / scale
        )
        self._record(name, check, tolerance, **parameters)

    def run_normalization(self, t: TimePoint):
        """ℒ^t(1) = 1, written as Σ_b I{X_0 = b}."""
        P = self.model.path_measure
        one = transfer_apply(P, t, CylinderFunction.constant(1.0))
        self._coefficient_record(
            IdentityName.NORMALIZATION, one, state0_function(np.ones(P.n)), self.settings.dual_tolerance, t=str(t)
        )

    def run_path_measure_suite(self, case: IdentityCase):
        P = self.model.path_measure
        t, f, g = case.t, case.f, case.g
        tol = self.settings.dual_tolerance
        label = {"t": str(t), "case": case.description}

        image = transfer_apply(P, t, f)
        self._record(IdentityName.DUAL_INVARIANCE, IdentityCheck.of(eval_fn(P, image), eval_fn(P, f)), tol, **label)

        shifted = compose_shift(g, t)
        self._coefficient_record(
            IdentityName.PULL_OUT, transfer_apply(P, t, f * shifted), g * image, PULL_OUT_TOLERANCE, **label
        )
        self._record(
            IdentityName.DUALITY, IdentityCheck.of(eval_fn(P, image * g), eval_fn(P, f * shifted)), tol, **label
        )

        future = future_cylinder_check(P, t, f, case.future)
        if future is not None:
            self._record(IdentityName.CONDITIONAL_EXPECTATION, future, tol, future=case.future.to_json(), **label)

        once = conditional_expectation(P, t, f)
        self._record(
            IdentityName.PROJECTION,
            IdentityCheck(lhs=eval_fn(P, once), rhs=eval_fn(P, f), residual=projection_defect(P, t, f)),
            tol,
            **label,
        )
        self._record(IdentityName.DISINTEGRATION, disintegration_identity_check(P, t, f), tol, **label)

    def run_perron_suite(self):
        residuals = perron_residuals(self.model.generator, self.model.potential, self.model.triple)
        for key, value in residuals.items():
            tolerance = EIGEN_TOLERANCE if key in ("left", "right") else NORMALIZATION_SUM_TOLERANCE
            self._record(
                IdentityName.PERRON_RESIDUALS,
                IdentityCheck(lhs=value, rhs=0.0, residual=value),
                tolerance,
                residual=key,
                overridden=self.model.overridden,
            )

    def run_spectral_suite(self, ctx: GibbsEvaluator, t: TimePoint):
        self._record(IdentityName.EIGENFUNCTION, eigenfunction_check(ctx, t), EIGEN_TOLERANCE, t=str(t))
        self._record(IdentityName.LEFT_EIGENVECTOR, left_eigenvector_check(ctx, t), EIGEN_TOLERANCE, t=str(t))
        defect = paired_normalizer_defect(ctx, t)
        self._record(
            IdentityName.PAIRED_NORMALIZER,
            IdentityCheck(lhs=1.0 + defect, rhs=1.0, residual=defect),
            self.settings.verify_tolerance,
            informational=True,
            t=str(t),
        )

    def run_gibbs_suite(self, ctx: GibbsEvaluator, case: IdentityCase):
        """LITERAL checks the fixed point and ν_V-invariance only on functions reaching t."""
        t = case.t
        tol = self.settings.verify_tolerance
        g = case.reaching_g if ctx.mode is GibbsMode.LITERAL else case.g
        label = {"t": str(t), "mode": ctx.mode.value, "case": case.description}

        self._record(IdentityName.FIXED_POINT, fixed_point_check(ctx, t, g), tol, relative=True, **label)
        self._record(
            IdentityName.GIBBS_DUALITY,
            gibbs_duality_check(ctx, t, case.f, case.g),
            tol,
            relative=True,
            **label,
        )
        self._record(IdentityName.GIBBS_INVARIANCE, gibbs_invariance_check(ctx, t, g), tol, relative=True, **label)
        self._record(
            IdentityName.PAIRED_INVARIANCE,
            paired_invariance_check(ctx, t, g),
            tol,
            informational=True,
            relative=True,
            **label,
        )

    def run(self, request: VerifyRequest) -> VerificationReport:
        """Run every suite over request.times with request.n_random random cases per time."""
        self.records = []
        times = [positive_time(t) for t in request.times]
        n = self.model.n
        logger.info(f"Verifying model {self.model.digest[:12]} at times {[str(t) for t in times]}")

        for t in times:
            self.run_normalization(t)
        cases = generate_cases(n, times, max(request.n_random, 1), request.seed)
        for case in cases:
            self.run_path_measure_suite(case)

        self.run_perron_suite()

        base = self.model.gibbs(GibbsMode.LITERAL)
        defects: Dict[str, Dict[str, float]] = {}
        for t in times:
            self.run_spectral_suite(base, t)
        for mode in GibbsMode:
            ctx = base.with_mode(mode)
            defects[mode.value] = {}
            for t in times:
                defect = kolmogorov_defect(ctx, t)
                defects[mode.value][str(t)] = defect
                self._record(
                    IdentityName.KOLMOGOROV_DEFECT,
                    IdentityCheck(lhs=1.0 + defect, rhs=1.0, residual=defect),
                    self.settings.verify_tolerance,
                    informational=True,
                    t=str(t),
                    mode=mode.value,
                )
            for case in cases:
                self.run_gibbs_suite(ctx, case)

        report = VerificationReport(model_digest=self.model.digest, records=self.records, kolmogorov_defect=defects)
        logger.info(
            f"Verification finished: {report.summary.passed}/{report.summary.total} passed, "
            f"{report.summary.informational} informational"
        )
        return report
