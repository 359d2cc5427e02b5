"""
Command-line front door: ``floquet-borg <command>``.

Results go to stdout or the requested file; diagnostics go to stderr. Exit codes:
0 success or positive verdict, 1 negative verdict, 2 malformed input or bad arguments,
3 operator validation failure, 4 verification breach, 5 unmet detector precondition.
"""

import json
import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated

import typer
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from floquet_borg import bands, chebyshev, detectors, monodromy, operator
from floquet_borg.errors import (
    DegenerateAngles,
    DomainError,
    FloquetBorgError,
    IndexOutOfRange,
    NotHermitian,
    NotPositiveDefinite,
    PreconditionError,
    Singular,
)
from floquet_borg.operator import BlockJacobiOperator, GeneralBlockJacobi, PeriodicJacobi
from floquet_borg.schema import GaugeDocument, OperatorDocument, schema_errors
from floquet_borg.settings import Tolerances
from floquet_borg.utils import atomic_write_text, canonical_json
from floquet_borg.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_BREACH = 4
EXIT_PRECONDITION = 5

app = typer.Typer(name="floquet-borg", no_args_is_help=True, add_completion=False)
err_console = Console(stderr=True)


class Theorem(str, Enum):
    BORG = "borg"
    I = "i"  # noqa: E741
    II = "ii"
    III = "iii"


class OperatorKind(str, Enum):
    FREE = "free"
    RANDOM = "random"


class MembershipPoint(BaseModel):
    """Spectral membership of one real point, decided from its multipliers."""

    z: float
    member: bool
    distance: float


class RunConfig(BaseModel):
    """Inputs shared by the subcommands."""

    subcommand: str
    input: Path | None = None
    output: Path | None = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    samples: int = Field(default=512, ge=bands.MIN_SAMPLES)
    seed: int = 0


def _fail(code: int, message: str) -> typer.Exit:
    err_console.print(f"[bold red]error:[/bold red] {message}", highlight=False)
    return typer.Exit(code)


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except (PreconditionError, DegenerateAngles, IndexOutOfRange) as e:
        raise _fail(EXIT_PRECONDITION, str(e)) from e
    except (Singular, NotHermitian, NotPositiveDefinite) as e:
        raise _fail(EXIT_INVALID, str(e)) from e
    except (FloquetBorgError, ValidationError, ValueError) as e:
        raise _fail(EXIT_USAGE, str(e)) from e


def _require_finite(*angles: float | None) -> None:
    for angle in angles:
        if angle is not None and not math.isfinite(angle):
            raise DomainError(f"Quasi-momentum must be finite, got {angle}.")


def _unit_tau(angle: float) -> complex:
    _require_finite(angle)
    return complex(math.cos(angle), math.sin(angle))


def _membership(J: BlockJacobiOperator, z: float, tol_circle: float) -> MembershipPoint:
    member, distance = monodromy.spectral_membership(J, z, tol_circle=tol_circle)
    return MembershipPoint(z=z, member=member, distance=distance)


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        typer.echo(text, nl=False)
    else:
        atomic_write_text(output, text)
        logger.info("Wrote %s", output)


def _load_operator(path: Path, tolerances: Tolerances) -> PeriodicJacobi:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise _fail(EXIT_USAGE, f"cannot read operator file {path}: {e}") from e

    errors = schema_errors(raw)
    if errors:
        raise _fail(EXIT_USAGE, f"{path} does not match the operator schema:\n  " + "\n  ".join(errors))

    with _exit_codes():
        J = OperatorDocument.model_validate(raw).to_operator()

    report = operator.validate(J, tol_herm=tolerances.herm, tol_sing=tolerances.sing)
    if not report.passed:
        raise _fail(EXIT_INVALID, "; ".join(failure.message for failure in report.failures))
    return J


def _load_positive(path: Path, tolerances: Tolerances) -> BlockJacobiOperator:
    J = _load_operator(path, tolerances)
    if not isinstance(J, BlockJacobiOperator):
        raise _fail(EXIT_USAGE, f"{path} describes a general operator; run 'gauge' on it first.")
    return J


@app.callback()
def main_callback(
    ctx: typer.Context,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log debug output to stderr.")] = False,
    tol_herm: Annotated[float | None, typer.Option(help="Hermiticity tolerance.")] = None,
    tol_eig: Annotated[float | None, typer.Option(help="Hermitian eigenvalue tolerance.")] = None,
    tol_gen: Annotated[float | None, typer.Option(help="General eigenvalue / multiplier tolerance.")] = None,
    tol_sing: Annotated[float | None, typer.Option(help="Singularity floor.")] = None,
    tol_circle: Annotated[float | None, typer.Option(help="Unit-circle tolerance for multipliers.")] = None,
    tol_identity: Annotated[float | None, typer.Option(help="Trace and monodromy identity tolerance.")] = None,
    tol_det: Annotated[float | None, typer.Option(help="Determinant identity tolerance.")] = None,
    tol_cluster: Annotated[float | None, typer.Option(help="Relative eigenvalue cluster width.")] = None,
    tol_merge: Annotated[float | None, typer.Option(help="Band merge tolerance.")] = None,
    tol_detect: Annotated[float | None, typer.Option(help="Detector tolerance.")] = None,
    tol_gauge: Annotated[float | None, typer.Option(help="Gauge holonomy tolerance.")] = None,
) -> None:
    """Spectral computations and Borg-type detectors for periodic block Jacobi operators."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    with _exit_codes():
        ctx.obj = Tolerances().override(
            herm=tol_herm,
            eig=tol_eig,
            gen=tol_gen,
            sing=tol_sing,
            circle=tol_circle,
            identity=tol_identity,
            det=tol_det,
            cluster=tol_cluster,
            merge=tol_merge,
            detect=tol_detect,
            gauge=tol_gauge,
        )


@app.command("bands")
def cmd_bands(
    ctx: typer.Context,
    input: Annotated[Path, typer.Argument(help="Operator JSON file.")],
    samples: Annotated[int, typer.Option(help="Quasi-momentum grid size (at least 16).")] = 512,
    output: Annotated[Path | None, typer.Option("--output", "-o", help="Band summary JSON (default: stdout).")] = None,
    csv: Annotated[Path | None, typer.Option(help="Branch CSV destination.")] = None,
    point: Annotated[
        list[float] | None, typer.Option(help="Real point to test for spectral membership; repeatable.")
    ] = None,
) -> None:
    """Compute the bands and gaps of the spectrum."""
    with _exit_codes():
        config = RunConfig(subcommand="bands", input=input, output=output, tolerances=ctx.obj, samples=samples)
    J = _load_operator(input, config.tolerances)

    with _exit_codes():
        structure = bands.band_structure(J, samples=config.samples, merge_tol=config.tolerances.merge)
        if csv is not None:
            atomic_write_text(csv, bands.sweep_branches(J, config.samples).to_csv())

    payload = structure.model_dump(mode="json")
    if point:
        if not isinstance(J, BlockJacobiOperator):
            raise _fail(EXIT_USAGE, f"{input} describes a general operator; run 'gauge' on it first.")
        with _exit_codes():
            payload["membership"] = [_membership(J, z, config.tolerances.circle).model_dump(mode="json") for z in point]

    _emit(canonical_json(payload), config.output)


@app.command("verify")
def cmd_verify(
    ctx: typer.Context,
    input: Annotated[Path, typer.Argument(help="Operator JSON file.")],
    angle: Annotated[list[float] | None, typer.Option(help="Quasi-momentum x of tau = e^{ix}; repeatable.")] = None,
    z_samples: Annotated[int, typer.Option(help="Random points for the determinant and monodromy rows.")] = 8,
    seed: Annotated[int, typer.Option(help="Seed of the random points.")] = 0,
    corrupt_scale: Annotated[
        float | None, typer.Option(help="Scale a_1 of the spectral side after validation.")
    ] = None,
) -> None:
    """Print the residual table of the spectral identities."""
    config = RunConfig(subcommand="verify", input=input, tolerances=ctx.obj, seed=seed)
    J = _load_positive(input, config.tolerances)

    with _exit_codes():
        taus = None if not angle else [_unit_tau(x) for x in angle]
        report = run_verification(
            J,
            taus=taus,
            z_samples=z_samples,
            seed=config.seed,
            tolerances=config.tolerances,
            corrupt_scale=corrupt_scale,
        )

    table = Table(title="Residuals")
    for column in ("identity", "parameter", "residual", "threshold", "status"):
        table.add_column(column)
    for row in report.rows:
        status = "[green]ok[/green]" if row.passed else "[bold red]BREACH[/bold red]"
        table.add_row(row.identity, row.parameter, f"{row.residual:.3e}", f"{row.threshold:.1e}", status)
    Console().print(table)

    if not report.passed:
        raise _fail(EXIT_BREACH, f"{len(report.breaches())} residual(s) above threshold.")


@app.command("detect")
def cmd_detect(
    ctx: typer.Context,
    input: Annotated[Path, typer.Argument(help="Operator JSON file.")],
    theorem: Annotated[Theorem, typer.Option(help="Criterion to apply.")] = Theorem.BORG,
    angle: Annotated[float, typer.Option(help="Quasi-momentum of tau for the moment criterion.")] = math.pi / 2,
    kappa1: Annotated[float, typer.Option(help="First quasi-momentum.")] = 0.0,
    kappa2: Annotated[float | None, typer.Option(help="Second quasi-momentum (criterion iii).")] = None,
    n1: Annotated[int | None, typer.Option(help="Branch index in 1..p (criterion iii).")] = None,
    tol: Annotated[float | None, typer.Option(help="Detection tolerance (default: --tol-detect).")] = None,
    samples: Annotated[int, typer.Option(help="Band resolution for the interval criterion.")] = 512,
) -> None:
    """Decide whether the operator is the free one; exit 0 if so, 1 otherwise."""
    with _exit_codes():
        config = RunConfig(subcommand="detect", input=input, tolerances=ctx.obj, samples=samples)
    J = _load_positive(input, config.tolerances)
    tol = config.tolerances.detect if tol is None else tol

    with _exit_codes():
        _require_finite(angle, kappa1, kappa2)
        if theorem is Theorem.BORG:
            verdict = detectors.detect_borg_interval(J, tol=tol, band_samples=config.samples)
        elif theorem is Theorem.I:
            verdict = detectors.detect_free_by_moment(J, _unit_tau(angle), tol=tol)
        elif theorem is Theorem.II:
            verdict = detectors.detect_free_by_eigen_formula(J, kappa1, tol=tol)
        else:
            if kappa2 is None or n1 is None:
                raise _fail(EXIT_USAGE, "criterion iii needs --kappa2 and --n1.")
            verdict = detectors.detect_free_two_point(J, kappa1, kappa2, n1, tol=tol)

    typer.echo(canonical_json(verdict.model_dump(mode="json")), nl=False)
    raise typer.Exit(EXIT_OK if verdict.verdict else EXIT_FALSE)


@app.command("extremal")
def cmd_extremal(
    s: Annotated[int, typer.Option(help="Number of points (at least 2).")],
    r: Annotated[float, typer.Option(help="Modulus bound (non-negative).")],
    oracle: Annotated[bool, typer.Option(help="Also run the randomized oracle.")] = False,
    budget: Annotated[int, typer.Option(help="Oracle evaluation budget.")] = 10_000,
    seed: Annotated[int, typer.Option(help="Oracle seed.")] = 0,
) -> None:
    """Closed-form extremal value and configuration, optionally against the oracle."""
    with _exit_codes():
        closed_form = chebyshev.extremal_value(s, r)
        config = chebyshev.extremal_config(s, r)
        result = chebyshev.oracle_max_sum_squares(s, r, budget=budget, seed=seed) if oracle else None

    payload = {
        "s": s,
        "r": r,
        "closed_form": closed_form,
        "config": config.x,
        "max_abs": config.max_abs,
        "oracle_best": None if result is None else result.best,
        "gap": None if result is None else result.best - closed_form,
    }
    typer.echo(canonical_json(payload), nl=False)


@app.command("gauge")
def cmd_gauge(
    ctx: typer.Context,
    input: Annotated[Path, typer.Argument(help="General operator JSON file.")],
    output: Annotated[Path | None, typer.Option("--output", "-o", help="Destination (default: stdout).")] = None,
) -> None:
    """Normalize a general operator to positive off-diagonal blocks."""
    config = RunConfig(subcommand="gauge", input=input, output=output, tolerances=ctx.obj)
    J = _load_operator(input, config.tolerances)
    general = J if isinstance(J, GeneralBlockJacobi) else GeneralBlockJacobi(a=J.a, b=J.b)

    with _exit_codes():
        result = operator.gauge_normalize(general, tol_sing=config.tolerances.sing)
    document = GaugeDocument.from_result(result, general, tol=config.tolerances.gauge)

    err_console.print(f"factorization residuals: a {document.residual_a:.3e}, b {document.residual_b:.3e}")
    if not document.periodic:
        err_console.print("[yellow]holonomy is not scalar: the normalized coefficients close with a twist[/yellow]")
    _emit(document.dumps(), config.output)


@app.command("generate")
def cmd_generate(
    kind: Annotated[OperatorKind, typer.Argument(help="Operator family.")],
    p: Annotated[int, typer.Argument(help="Period.")],
    m: Annotated[int, typer.Argument(help="Block size.")],
    seed: Annotated[int, typer.Option(help="Seed for random operators.")] = 0,
    spread: Annotated[float, typer.Option(help="Perturbation size for random operators.")] = 0.3,
    real: Annotated[bool, typer.Option(help="Real symmetric coefficients.")] = False,
    output: Annotated[Path | None, typer.Option("--output", "-o", help="Destination (default: stdout).")] = None,
) -> None:
    """Write a free or random operator file."""
    with _exit_codes():
        if kind is OperatorKind.FREE:
            J = operator.free_operator(p, m)
        else:
            J = operator.random_operator(p, m, seed=seed, spread=spread, real=real)

    _emit(OperatorDocument.from_operator(J).dumps(), output)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
