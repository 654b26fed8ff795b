import typer
from typing import Annotated

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OpOpt, OutOpt, QueryOpt, SpaceOpt, TolOpt, emit, emit_checked, guarded,
)
from daugavet.commands.nr_commands import OptionalSpaceOpt, operator_from
from daugavet.models.enums import LieMethod, OutputFormat, Verdict
from daugavet.services.lie_service import LieService
from daugavet.utils.io_utils import load_space

lie_app = typer.Typer(rich_help_panel="Isometry Groups")


@lie_app.command(name="basis")
def lie_basis(
        space: SpaceOpt,
        method: Annotated[LieMethod, typer.Option("--method", "-m", help="Basis construction")] = LieMethod.AUTO,
        tol: TolOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Basis of the generators of one-parameter isometry groups."""
    with guarded():
        emit(LieService.lie_algebra_basis(load_space(space), tol, method, budget), fmt, out, query)


@lie_app.command(name="verify")
def lie_verify(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        tol: TolOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """||exp(rho T)|| = 1 over the rho grid (exit 4 when the drift refutes it)."""
    with guarded():
        T = operator_from(op, space)
        report = LieService.semigroup_verify(T.domain, T, tol=tol, budget=budget)
        emit_checked(report, report.isometric is not Verdict.NO, f"isometry drift {report.max_drift:.3e}",
                     fmt, out, query)


@lie_app.command(name="classify")
def lie_classify(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        tol: TolOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Skew-hermitian, dissipative and hermitian verdicts from the numerical range."""
    with guarded():
        T = operator_from(op, space)
        emit(LieService.classify(T.domain, T, tol, budget), fmt, out, query)
