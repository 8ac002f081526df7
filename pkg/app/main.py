from builtins import Exception, bool, complex, dict, float, int, len, list, max, sorted, str
import json
import logging
from pathlib import Path
import time
from typing import Any, Callable, Dict, List, Optional, Tuple, Type, TypeVar

import click
import numpy as np
from pydantic import BaseModel, ValidationError

from app.dependencies import get_settings
from app.models.bicomplex_model import Bicomplex, GradedBasisChoice
from app.models.cell_model import DualPair, Representation
from app.schemas.bicomplex_schemas import BicomplexSchema
from app.schemas.cell_schemas import DualPairSchema, RepresentationSchema
from app.schemas.report_schemas import Builtin, CheckResult, ClaimSuite, Command, RunConfig
from app.services.bicomplex_service import BicomplexService
from app.services.claims_service import ClaimsService, SuiteResult
from app.services.cw_service import CWService
from app.services.report_service import ReportService
from app.services.spectral_service import SpectralService
from app.utils.cli_description import getDescription
from app.utils.common import setup_logging
from app.utils.exceptions import CheckFailure, InputError, NonAcyclicError, TorsionError
from app.utils.linalg import relative_error

settings = get_settings()
logger = logging.getLogger(__name__)

SchemaT = TypeVar("SchemaT", bound=BaseModel)
Outcome = Tuple[Dict[str, Any], Dict[str, float], List[CheckResult]]
Action = Callable[[RunConfig, List[bytes]], Outcome]

# exit code for failures no domain error accounts for
UNEXPECTED_EXIT_CODE = 1


def _read_json(path: str, payloads: List[bytes]) -> Any:
    raw = Path(path).read_bytes()
    payloads.append(raw)
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        logger.error(f"Malformed JSON in {path}: {e}")
        raise InputError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except UnicodeDecodeError as e:
        logger.error(f"Undecodable input {path}: {e}")
        raise InputError(f"{path}: input is not valid UTF-8 text") from e


def _load(schema: Type[SchemaT], path: str, payloads: List[bytes]) -> SchemaT:
    data = _read_json(path, payloads)
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        logger.error(f"{path} does not match {schema.__name__}: {e.error_count()} error(s)")
        raise InputError(f"{path}: invalid {schema.__name__}\n{e}") from e


def _load_bicomplex(path: str, payloads: List[bytes]) -> Tuple[Bicomplex, Optional[GradedBasisChoice]]:
    schema = _load(BicomplexSchema, path, payloads)
    bc = schema.to_domain()
    BicomplexService.ensure_valid(bc)
    return bc, schema.basis_choice()


def _basis_or_default(bc: Bicomplex, basis: Optional[GradedBasisChoice]) -> Tuple[Optional[GradedBasisChoice], str]:
    """Supplied bases, none for doubly acyclic input, otherwise deterministic computed representatives."""
    if basis is not None:
        return basis, "supplied"
    if BicomplexService.dimension_profile(bc).doubly_acyclic:
        return None, "acyclic"
    logger.warning("No bases supplied for a complex with (co)homology; using computed representatives")
    return BicomplexService.default_basis(bc), "computed"


def _execute(fields: Dict[str, Any], action: Action) -> None:
    """Runs one command, maps domain errors to exit codes, prints the summary and writes the report."""
    ctx = click.get_current_context()
    started = time.perf_counter()
    payloads: List[bytes] = []
    try:
        config = RunConfig(**fields)
        results, residuals, checks = action(config, payloads)
    except TorsionError as e:
        logger.error(f"{fields['command'].value} failed with {type(e).__name__}")
        click.echo(f"error: {e}", err=True)
        ctx.exit(e.exit_code)
    except ValidationError as e:
        click.echo(f"error: invalid options\n{e}", err=True)
        ctx.exit(InputError.exit_code)
    except Exception as e:
        logger.exception(f"Unexpected failure in {fields['command'].value}")
        click.echo(f"error: an unexpected error occurred: {e}", err=True)
        ctx.exit(UNEXPECTED_EXIT_CODE)
    report = ReportService.build(config, ReportService.digest(config, payloads), results, started, residuals, checks)
    if config.output:
        ReportService.write(report, config.output)
    click.echo(ReportService.summary(report))
    if not report.passed:
        failure = CheckFailure(", ".join(check.name for check in report.checks if not check.passed))
        logger.error(f"{fields['command'].value} failed checks: {failure}")
        click.echo(f"error: failed checks: {failure}", err=True)
        ctx.exit(failure.exit_code)


def _parse_complex(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        parts = [float(part) for part in value.split(",")]
    except ValueError:
        parts = []
    if len(parts) != 2:
        raise click.BadParameter("expected a complex number written as re,im")
    return parts


def _parse_ladder(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        ladder = [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated thresholds, e.g. 0.5,2,10")
    if not ladder:
        raise click.BadParameter("the ladder needs at least one threshold")
    return ladder


input_option = click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
                            help="Input JSON file.")
out_option = click.option("--out", "output", type=click.Path(dir_okay=False), help="Write the JSON report here.")
tol_option = click.option("--tol", "tolerance", type=float, help="Agreement tolerance override.")
seed_option = click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=settings.default_seed,
                           show_default=True, help="Seed of all randomized content.")
trials_option = click.option("--trials", type=click.IntRange(min=1), default=settings.default_trials,
                             show_default=True, help="Number of randomized trials.")


@click.group(help=getDescription())
@click.version_option("0.0.1", prog_name="torsion")
@click.option("--debug", is_flag=True, help="Enable DEBUG logging.")
def cli(debug: bool):
    setup_logging(debug or None)


@cli.command("validate")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Bicomplex JSON file.")
@out_option
def validate_command(input_path: str, output: Optional[str]):
    """Check d^2 = 0, d*^2 = 0 and the rank decisions of a bicomplex."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        bc = _load(BicomplexSchema, input_path, payloads).to_domain()
        validation = BicomplexService.validate(bc)
        results: Dict[str, Any] = {
            "dims": list(bc.dims),
            "valid": validation.valid,
            "issues": [
                {"kind": i.kind, "degree": i.degree, "residual": i.residual, "message": i.message}
                for i in validation.issues
            ],
        }
        checks = [ReportService.check("validation_issues", len(validation.issues), 0)]
        if validation.valid:
            profile = BicomplexService.dimension_profile(bc)
            identities = profile.identities()
            results.update(
                coboundary_dims=list(profile.coboundary_dims),
                boundary_dims=list(profile.boundary_dims),
                cohomology_dims=list(profile.cohomology_dims),
                homology_dims=list(profile.homology_dims),
                doubly_acyclic=profile.doubly_acyclic,
                sign_exponent=profile.sign_exponent(),
                identities=identities,
            )
            checks.append(ReportService.check("dimension_identities", sum(not ok for ok in identities.values()), 0))
        return results, dict(validation.residuals), checks

    _execute(dict(command=Command.VALIDATE, inputs=[input_path], output=output), action)


@cli.command("torsion")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Bicomplex JSON file, with bases unless the complex is doubly acyclic.")
@tol_option
@out_option
def torsion_command(input_path: str, tolerance: Optional[float], output: Optional[str]):
    """Torsion relative to the supplied bases."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        bc, basis = _load_bicomplex(input_path, payloads)
        result = BicomplexService.torsion(bc, basis)
        profile = BicomplexService.dimension_profile(bc)
        results: Dict[str, Any] = {
            "dims": list(bc.dims),
            "cohomology_dims": list(profile.cohomology_dims),
            "homology_dims": list(profile.homology_dims),
            "value": result.value,
            "unsigned_value": result.unsigned_value,
            "sign_exponent": result.sign_exponent,
            "basis": "acyclic" if result.is_acyclic else "supplied",
        }
        checks = []
        if profile.doubly_acyclic:
            try:
                eigen = BicomplexService.eigen_torsion(bc)
            except NonAcyclicError as e:
                logger.warning(f"Eigenvalue formula skipped: {e}")
                results["eigen_torsion"] = None
            else:
                results["eigen_torsion"] = eigen
                limit = config.tolerance or settings.agreement_tolerance
                checks.append(ReportService.check("eigenvalue_formula", relative_error(result.value, eigen), limit))
        return results, {}, checks

    _execute(dict(command=Command.TORSION, inputs=[input_path], tolerance=tolerance, output=output), action)


@cli.command("spectral")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Bicomplex JSON file.")
@click.option("--K", "threshold", type=float, required=True, help="Threshold on the real part of eigenvalues.")
@out_option
def spectral_command(input_path: str, threshold: float, output: Optional[str]):
    """Split at K and report zeta data, the Ray-Singer term and the total torsion."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        bc, supplied = _load_bicomplex(input_path, payloads)
        basis, record = _basis_or_default(bc, supplied)
        split = SpectralService.split(bc, threshold)
        zeta = SpectralService.zeta_report(split)
        total = SpectralService.total_torsion(bc, threshold, basis)
        residuals = {f"split.{key}": value for key, value in split.residuals.items()}
        worst = 0.0
        for q, projector in enumerate(split.projectors):
            projector_residuals = projector.residuals()
            for key, value in projector_residuals.items():
                residuals[f"projector[{q}].{key}"] = value
            bound = settings.projector_tolerance * max(1.0, float(np.linalg.norm(projector.source))) \
                * max(1.0, float(np.linalg.norm(projector.left_inverse))) ** 2
            worst = max(worst, projector_residuals["idempotence"] / bound, projector_residuals["commutation"] / bound)
        results = {
            "threshold": threshold,
            "spectrum": SpectralService.spectrum(bc),
            "small_dims": list(split.small_dims),
            "large_counts": list(split.large_counts),
            "large_eigenvalues": split.large_eigenvalues,
            "zeta_primes": zeta.zeta_primes,
            "ray_singer": zeta.ray_singer,
            "ray_singer_squared": zeta.ray_singer_squared,
            "total_torsion": total.value,
            "sign_exponent": total.sign_exponent,
            "basis": record,
        }
        return results, residuals, [ReportService.check("projector_residuals", worst, 1.0)]

    _execute(dict(command=Command.SPECTRAL, inputs=[input_path], threshold=threshold, output=output), action)


@cli.command("sweep-k")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Bicomplex JSON file.")
@click.option("--K-ladder", "ladder", callback=_parse_ladder,
              help="Comma-separated thresholds; defaults to every admissible gap.")
@tol_option
@out_option
def sweep_command(input_path: str, ladder: Optional[List[float]], tolerance: Optional[float], output: Optional[str]):
    """Total torsion over a ladder of thresholds and the identities between neighbours."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        bc, supplied = _load_bicomplex(input_path, payloads)
        basis, record = _basis_or_default(bc, supplied)
        thresholds = sorted(set(ladder)) if ladder else SpectralService.admissible_thresholds(bc)
        if not thresholds:
            raise InputError("No admissible threshold found for this complex")
        totals = [SpectralService.total_torsion(bc, K, basis).value for K in thresholds]
        deviation = max((relative_error(a, b) for a in totals for b in totals), default=0.0)
        transitions, identity_error, stabilization = [], 0.0, 0.0
        for lower, upper in zip(thresholds, thresholds[1:]):
            report = SpectralService.k_ratio_check(bc, lower, upper, basis)
            transitions.append({
                "lower": report.lower,
                "upper": report.upper,
                "ratio_squared": report.ratio_squared,
                "eigenvalue_product": report.eigenvalue_product,
                "zeta_differences": report.zeta_differences,
                "ratio_deviation": report.ratio_deviation,
                "zeta_deviation": report.zeta_deviation,
                "stabilization_deviation": report.stabilization_deviation,
            })
            identity_error = max(identity_error, report.ratio_deviation, report.zeta_deviation)
            stabilization = max(stabilization, report.stabilization_deviation)
        limit = config.tolerance or settings.agreement_tolerance
        results = {
            "thresholds": thresholds,
            "total_torsion": totals,
            "max_pairwise_deviation": deviation,
            "transitions": transitions,
            "basis": record,
        }
        checks = [
            ReportService.check("threshold_independence", deviation, limit),
            ReportService.check("threshold_ratio_identities", identity_error, settings.identity_tolerance),
            ReportService.check("small_torsion_stabilization", stabilization, limit),
        ]
        return results, {}, checks

    fields = dict(command=Command.SWEEP_K, inputs=[input_path], ladder=ladder, tolerance=tolerance, output=output)
    _execute(fields, action)


def _cell_pair(config: RunConfig, input_path: Optional[str], payloads: List[bytes]) -> DualPair:
    if config.builtin is Builtin.CIRCLE:
        return CWService.builtin_circle(config.subdivisions)
    if config.builtin is Builtin.LENS:
        if config.lens_p is None or config.lens_q is None:
            raise InputError("The lens space needs --lens-p and --lens-q")
        return CWService.builtin_lens(config.lens_p, config.lens_q)
    if input_path is None:
        raise InputError("Give either --builtin or --input with a dual pair file")
    return _load(DualPairSchema, input_path, payloads).to_domain()


def _holonomy(config: RunConfig, pair: DualPair, representation_path: Optional[str],
              payloads: List[bytes]) -> Representation:
    if representation_path is not None:
        return _load(RepresentationSchema, representation_path, payloads).to_domain()
    if config.holonomy is not None:
        value = complex(*config.holonomy)
    elif config.builtin is Builtin.CIRCLE:
        value = 2.0 + 0.0j
    elif config.builtin is Builtin.LENS:
        value = complex(np.exp(2j * np.pi / config.lens_p))
    else:
        raise InputError("A dual pair file needs --holonomy or --representation")
    generators = pair.primal.generators
    if len(generators) != 1:
        raise InputError(f"A scalar holonomy needs exactly one generator, the complex has {list(generators)}")
    return Representation.scalar(value, generators[0])


def _expected_builtin(config: RunConfig, rho: Representation) -> Optional[complex]:
    """Closed form of the torsion of a built-in complex with a scalar holonomy."""
    if config.builtin is None or rho.fiber_dim != 1:
        return None
    value = complex(next(iter(rho.matrices.values()))[0, 0])
    expected = (value - 1.0) * (1.0 / value - 1.0)
    if config.builtin is Builtin.LENS:
        twisted = value ** (config.lens_q % config.lens_p)
        expected *= (twisted - 1.0) * (1.0 / twisted - 1.0)
    return expected


@cli.command("cw")
@click.option("--builtin", type=click.Choice([b.value for b in Builtin]), help="Built-in cell complex.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), help="Dual pair JSON file.")
@click.option("--representation", "representation_path", type=click.Path(exists=True, dir_okay=False),
              help="Representation JSON file, generator name to holonomy matrix.")
@click.option("--holonomy", callback=_parse_complex, help="Scalar holonomy written as re,im.")
@click.option("--subdivisions", type=click.IntRange(min=1), default=1, show_default=True,
              help="Vertices of the built-in circle.")
@click.option("--lens-p", type=int, help="Order p of the lens space.")
@click.option("--lens-q", type=int, help="Twist q' of the lens space.")
@tol_option
@out_option
def cw_command(builtin, input_path, representation_path, holonomy, subdivisions, lens_p, lens_q, tolerance, output):
    """Combinatorial torsion of a flat cell complex."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        pair = _cell_pair(config, input_path, payloads)
        rho = _holonomy(config, pair, representation_path, payloads)
        result = CWService.comb_torsion(pair, rho)
        profile = BicomplexService.dimension_profile(CWService.theta_bicomplex(pair, rho))
        results: Dict[str, Any] = {
            "cells": list(pair.primal.cells),
            "fiber_dim": rho.fiber_dim,
            "cohomology_dims": list(profile.cohomology_dims),
            "homology_dims": list(profile.homology_dims),
            "value": result.value,
            "modulus": abs(result.value),
            "sign_exponent": result.sign_exponent,
        }
        checks = []
        expected = _expected_builtin(config, rho)
        if expected is not None:
            results["expected"] = expected
            limit = config.tolerance or settings.agreement_tolerance
            checks.append(ReportService.check("closed_form", relative_error(result.value, expected), limit))
        return results, {}, checks

    inputs = [path for path in (input_path, representation_path) if path is not None]
    fields = dict(
        command=Command.CW, inputs=inputs, builtin=builtin, subdivisions=subdivisions, holonomy=holonomy,
        lens_p=lens_p, lens_q=lens_q, tolerance=tolerance, output=output,
    )
    _execute(fields, action)


def _suite_results(result: SuiteResult) -> Dict[str, Any]:
    return {
        "suite": result.suite,
        "trials": result.trials,
        "tolerance": result.tolerance,
        "failures": result.failures,
        "failure_count": len(result.failures),
        "worst_error": result.worst_error,
        "errors": {str(trial): error for trial, error in sorted(result.errors.items())},
        "messages": {str(trial): message for trial, message in sorted(result.messages.items())},
    }


@cli.command("claims")
@click.option("--suite", type=click.Choice([s.value for s in ClaimSuite]), required=True,
              help="a: pairing duality, b: eigenvalue formula, c: direct sums, k: threshold independence.")
@trials_option
@seed_option
@tol_option
@out_option
def claims_command(suite: str, trials: int, seed: int, tolerance: Optional[float], output: Optional[str]):
    """Randomized property suite over seeded random complexes."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        result = ClaimsService.run(config.suite, config.trials, config.seed, config.tolerance)
        return _suite_results(result), {}, [ReportService.check("failures", len(result.failures), 0)]

    fields = dict(command=Command.CLAIMS, suite=suite, trials=trials, seed=seed, tolerance=tolerance, output=output)
    _execute(fields, action)


@cli.command("probe")
@click.option("--dimension", type=click.IntRange(min=1), default=10, show_default=True,
              help="Largest operator dimension.")
@click.option("--zero-alpha", is_flag=True, help="Use a zero perturbation in every trial.")
@trials_option
@seed_option
@out_option
def probe_command(dimension: int, zero_alpha: bool, trials: int, seed: int, output: Optional[str]):
    """Strip and parabola bounds for perturbed self-adjoint operators."""

    def action(config: RunConfig, payloads: List[bytes]) -> Outcome:
        result = ClaimsService.probe_suite(config.trials, config.seed, config.dimension, config.zero_alpha)
        return _suite_results(result), {}, [ReportService.check("violations", len(result.failures), 0)]

    fields = dict(
        command=Command.PROBE, trials=trials, seed=seed, dimension=dimension, zero_alpha=zero_alpha, output=output,
    )
    _execute(fields, action)


if __name__ == "__main__":
    cli()
