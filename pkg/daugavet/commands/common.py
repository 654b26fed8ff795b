"""Options and output plumbing shared by every command group."""
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Optional

try:  # newer typer vendors its own click; its exceptions are distinct classes
    from typer import _click as click
except ImportError:
    import click
import typer

from daugavet.exceptions import CheckFailure, DaugavetError
from daugavet.models.enums import OutputFormat
from daugavet.models.reports import Report, plain
from daugavet.settings import SETTINGS
from daugavet.utils.console import report_error
from daugavet.utils.io_utils import render, write_output

SpaceOpt = Annotated[Path, typer.Option("--space", "-s", help="Space descriptor file (JSON or YAML)")]
OpOpt = Annotated[Path, typer.Option("--op", help="Operator descriptor file (JSON or YAML)")]
TolOpt = Annotated[Optional[float], typer.Option("--tol", help="Tolerance (default 1e-9 exact, 1e-6 sampled)")]
BudgetOpt = Annotated[int, typer.Option("--budget", "-b", min=1, help="Sampling budget")]
SeedOpt = Annotated[int, typer.Option("--seed", help="Random seed")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", help="Output file (default stdout)")]
FormatOpt = Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")]
QueryOpt = Annotated[Optional[str], typer.Option("--query", "-q", help="JMESPath filter applied to the report")]
VerboseOpt = Annotated[bool, typer.Option(help="Verbose Mode")]

DEFAULT_BUDGET = SETTINGS.default_budget


@contextmanager
def guarded():
    """Turn toolkit errors into one diagnostic line and the matching exit code."""
    try:
        yield
    except DaugavetError as exc:
        message = str(exc)
        if getattr(exc, "witness", None) is not None:
            message += f" witness={plain(exc.witness)}"
        report_error(exc.exit_code, exc.kind, message)
        raise typer.Exit(exc.exit_code)
    except (click.exceptions.Exit, click.exceptions.ClickException, click.exceptions.Abort):
        raise
    except Exception as exc:  # noqa: BLE001
        report_error(1, "internal", f"{type(exc).__name__}: {exc}")
        raise typer.Exit(1) from exc


def emit(report: Report, fmt: OutputFormat, out: Optional[Path], query: Optional[str]) -> None:
    write_output(render(report, fmt, query), out)


def emit_checked(report: Report, ok: bool, failure: str, fmt: OutputFormat, out: Optional[Path],
                 query: Optional[str]) -> None:
    """Write the report, then fail with exit 4 when the asserted property does not hold."""
    emit(report, fmt, out, query)
    if not ok:
        raise CheckFailure(failure)
