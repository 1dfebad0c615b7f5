"""
Command-line entry point.

Every command reads a model file, prints one JSON document on stdout and exits
with 0 (success), 2 (validation error), 3 (spectral error) or 4 (identity failure).
Diagnostics go to stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ruelle.config import settings
from ruelle.core.ctmc_core import semigroup
from ruelle.core.cylinder_algebra import CylinderFunction, CylinderSpec, TimePoint, eval_fn, eval_P
from ruelle.core.feynman_kac import fk_estimate, fk_oracle
from ruelle.core.gibbs import (
    GibbsMode,
    eval_rho,
    kolmogorov_defect,
    normalized_transfer_apply,
    rho_shift_defect,
    rho_total_mass,
    weighted_transfer_apply,
)
from ruelle.core.perron import perron_residuals, spectral_gap
from ruelle.core.transfer_operator import positive_time, transfer_apply
from ruelle.evals.verification_runner import VerificationRunner
from ruelle.models.requests import SimulateRequest, VerifyRequest
from ruelle.models.responses import (
    GibbsResponse,
    MeasureResponse,
    PerronResponse,
    SemigroupResponse,
    SimulationResponse,
    TransferResponse,
    ValidationResponse,
)
from ruelle.services import LoadedModel, ServiceContainer, get_service_container
from ruelle.utils import (
    InvalidArgumentError,
    InvalidCylinderError,
    ReportFormatter,
    ResponseFormatter,
    RuelleError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 4
EXIT_INTERNAL = 1

CommandResult = Tuple[Any, int]


def _times(args: argparse.Namespace, model: LoadedModel, default: str = "1") -> List[TimePoint]:
    if args.times:
        return [TimePoint.parse(value) for value in args.times]
    return list(model.times) or [TimePoint.parse(default)]


def _json_argument(value: str, what: str) -> Any:
    """Parse inline JSON, or read it from a file when value starts with '@'."""
    try:
        text = Path(value[1:]).read_text(encoding="utf-8") if value.startswith("@") else value
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidCylinderError(f"Cannot parse {what}: {e}")


def _request(model_class, **values):
    try:
        return model_class(**values)
    except ValidationError as e:
        raise InvalidArgumentError(
            f"Invalid {model_class.__name__} arguments",
            details={"errors": [{"loc": [str(x) for x in err["loc"]], "msg": err["msg"]} for err in e.errors()]},
        )


def cmd_validate(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    response = ValidationResponse(
        success=True,
        n=model.n,
        model_digest=model.digest,
        p0=model.stationary.p0.tolist(),
        warnings=model.warnings,
    )
    return response, EXIT_OK


def cmd_semigroup(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    matrices, defects = {}, {}
    for t in _times(args, model):
        P_t = semigroup(model.generator, t.value).entries
        matrices[str(t)] = P_t.tolist()
        defects[str(t)] = float(np.max(np.abs(P_t.sum(axis=0) - 1.0)))
    return SemigroupResponse(matrices=matrices, column_sum_defects=defects), EXIT_OK


def cmd_perron(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    triple = model.triple
    response = PerronResponse(
        lam=triple.lam,
        u=triple.u.tolist(),
        mu=triple.mu.tolist(),
        fV=triple.fV.tolist(),
        residuals=perron_residuals(model.generator, model.potential, triple),
        spectral_gap=spectral_gap(model.generator, model.potential),
        overridden=model.overridden,
    )
    return response, EXIT_OK


def cmd_measure(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    if args.cylinder:
        spec = CylinderSpec.from_json(_json_argument(args.cylinder, "--cylinder"))
        spec.check_states(model.n)
        cylinders = {"cylinder": spec}
    else:
        cylinders = model.cylinders

    base = model.gibbs(GibbsMode.LITERAL)
    values: Dict[str, Dict[str, Optional[float]]] = {}
    for name, spec in cylinders.items():
        row: Dict[str, Optional[float]] = {"P": eval_P(model.path_measure, spec)}
        for mode in GibbsMode:
            ctx = base.with_mode(mode)
            # LITERAL ν is not defined on anchorless cylinders
            row[f"nu_{mode.value}"] = ctx.eval_nu(spec) if spec.is_anchored or mode is GibbsMode.H_TRANSFORM else None
            row[f"rho_{mode.value}"] = eval_rho(ctx, spec)
        values[name] = row
    return MeasureResponse(values=values), EXIT_OK


def cmd_transfer(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    f = CylinderFunction.from_json(_json_argument(args.function, "--function"))
    f.check_states(model.n)
    t = positive_time(args.time)
    P = model.path_measure

    if args.kind == "plain":
        image = transfer_apply(P, t, f)
        before, after = eval_fn(P, f), eval_fn(P, image)
    else:
        ctx = model.gibbs(GibbsMode(args.mode))
        if args.kind == "weighted":
            image = weighted_transfer_apply(ctx, t, f)
            before, after = eval_fn(P, f), eval_fn(P, image)
        else:
            image = normalized_transfer_apply(ctx, t, f)
            before, after = ctx.integrate(f), ctx.integrate(image)

    response = TransferResponse(
        kind=args.kind,
        t=str(t),
        function=image.to_json(),
        integral_before=before,
        integral_after=after,
    )
    return response, EXIT_OK


def cmd_gibbs(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    base = model.gibbs(GibbsMode.LITERAL)
    times = [positive_time(t) for t in _times(args, model)]
    defects, masses, shifts = {}, {}, {}
    for mode in GibbsMode:
        ctx = base.with_mode(mode)
        defects[mode.value] = {str(t): kolmogorov_defect(ctx, t) for t in times}
        masses[mode.value] = rho_total_mass(ctx)
        shifts[mode.value] = {
            f"{name}@{t}": rho_shift_defect(ctx, spec, t) for name, spec in model.cylinders.items() for t in times
        }
    return GibbsResponse(kolmogorov_defect=defects, rho_total_mass=masses, rho_shift_defect=shifts), EXIT_OK


def cmd_verify(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    request = _request(
        VerifyRequest,
        times=args.times or [str(t) for t in model.times] or VerifyRequest().times,
        n_random=args.n_random,
        seed=args.seed,
    )
    report = VerificationRunner(model, container.settings).run(request)
    container.logging.log_verification_report(report, ReportFormatter.dumps(report))
    if not report.success:
        logger.error(f"{report.summary.failed} identity checks failed")
        return report, EXIT_IDENTITY_FAILURE
    return report, EXIT_OK


def cmd_simulate(model: LoadedModel, args: argparse.Namespace, container: ServiceContainer) -> CommandResult:
    request = _request(
        SimulateRequest,
        i0=args.i0,
        j0=args.j0,
        t=args.t,
        n_paths=args.n_paths,
        seed=args.seed,
        workers=args.workers or container.settings.mc_workers,
        chunk_size=args.chunk_size or container.settings.mc_chunk_size,
    )
    estimate = fk_estimate(
        model.generator,
        model.potential,
        request.i0,
        request.j0,
        request.t,
        request.n_paths,
        request.seed,
        workers=request.workers,
        chunk_size=request.chunk_size,
    )
    oracle = fk_oracle(model.generator, model.potential, request.i0, request.j0, request.t)
    response = SimulationResponse(
        value=estimate.value,
        std_error=estimate.std_error,
        n_paths=estimate.n_paths,
        target=estimate.target,
        oracle_value=oracle,
        z_score=(estimate.value - oracle) / estimate.std_error if estimate.std_error > 0 else None,
    )
    container.logging.log_simulation(response, model.digest)
    return response, EXIT_OK


COMMANDS: Dict[str, Callable[[LoadedModel, argparse.Namespace, ServiceContainer], CommandResult]] = {
    "validate": cmd_validate,
    "semigroup": cmd_semigroup,
    "perron": cmd_perron,
    "measure": cmd_measure,
    "transfer": cmd_transfer,
    "gibbs": cmd_gibbs,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="JSON model file")
    common.add_argument("--seed", type=int, default=settings.default_seed, help="Random seed")
    common.add_argument("--out", default=None, help="Write the JSON report to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="ruelle", description="Ruelle transfer operators for finite CTMCs.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("validate", parents=[common], help="Validate the generator")

    p = subparsers.add_parser("semigroup", parents=[common], help="Print e^{tL}")
    p.add_argument("--times", nargs="+", help="Times (default: model times, else 1)")

    subparsers.add_parser("perron", parents=[common], help="Perron triple of L + V")

    p = subparsers.add_parser("measure", parents=[common], help="P, ν_V and ρ_V on cylinders")
    p.add_argument("--cylinder", help="Cylinder as JSON [[time, state], ...] or @file")

    p = subparsers.add_parser("transfer", parents=[common], help="Apply a transfer operator")
    p.add_argument("--kind", choices=["plain", "weighted", "normalized"], default="plain")
    p.add_argument("--function", required=True, help='JSON [{"coeff": c, "spec": [[time, state], ...]}, ...] or @file')
    p.add_argument("--time", required=True, help="Operator time t > 0")
    p.add_argument("--mode", choices=[mode.value for mode in GibbsMode], default=GibbsMode.LITERAL.value)

    p = subparsers.add_parser("gibbs", parents=[common], help="Consistency diagnostics for ν_V and ρ_V")
    p.add_argument("--times", nargs="+")

    p = subparsers.add_parser("verify", parents=[common], help="Run every identity suite")
    p.add_argument("--times", nargs="+")
    p.add_argument("--n-random", type=int, default=20, help="Random cylinder functions per time")

    p = subparsers.add_parser("simulate", parents=[common], help="Feynman-Kac Monte Carlo")
    p.add_argument("--i0", type=int, required=True)
    p.add_argument("--j0", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n-paths", type=int, default=100000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--chunk-size", type=int, default=None)

    return parser


def _emit(payload: Any, out: Optional[str]) -> None:
    text = ReportFormatter.dumps(payload)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Report written to {out}")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    container = get_service_container()
    logger.info(f"Running {args.command} on {args.model}")
    try:
        model = container.models.load(args.model)
        payload, code = COMMANDS[args.command](model, args, container)
    except RuelleError as e:
        logger.error(f"{e.error_code}: {e.message}")
        _emit(ResponseFormatter.format_error_response(e), None)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        _emit(ResponseFormatter.format_error_response(e), None)
        return EXIT_INTERNAL
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
