import typer
from pathlib import Path
from typing import Annotated, List, Optional

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OpOpt, OutOpt, QueryOpt, TolOpt, emit, emit_checked, guarded,
)
from daugavet.exceptions import ConstructionError
from daugavet.models.enums import OutputFormat
from daugavet.models.operator import Operator
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.utils.io_utils import load_operator, load_space

nr_app = typer.Typer(rich_help_panel="Numerical Range")

OptionalSpaceOpt = Annotated[Optional[Path], typer.Option("--space", "-s", help="Space descriptor (overrides the op)")]


def operator_from(op: Path, space: Optional[Path]) -> Operator:
    return load_operator(op, load_space(space) if space is not None else None)


def parse_scalar(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConstructionError("lambda is a scalar like 1, -1 or 0.6+0.8j", text) from exc


@nr_app.command(name="summary")
def nr_summary(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Numerical radius, sup/inf Re V(T) and sampled range points."""
    with guarded():
        T = operator_from(op, space)
        emit(NumRangeService.range_summary(T.domain, T, budget), fmt, out, query)


@nr_app.command(name="opnorm")
def nr_opnorm(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        adjoint: Annotated[bool, typer.Option(help="Also compute the norm of the adjoint")] = False,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    with guarded():
        emit(OperatorService.norm_report(operator_from(op, space), budget, adjoint), fmt, out, query)


@nr_app.command(name="expformula")
def nr_expformula(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """sup Re V(T) from states, from the norm derivative at Id and from exponential growth."""
    with guarded():
        T = operator_from(op, space)
        emit(NumRangeService.exp_formula(T.domain, T, budget), fmt, out, query)


@nr_app.command(name="daugavet")
def nr_daugavet(
        op: OpOpt,
        space: OptionalSpaceOpt = None,
        tol: TolOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Daugavet equation ||Id + T|| = 1 + ||T||, checked against the range criterion (exit 4 on mismatch)."""
    with guarded():
        T = operator_from(op, space)
        report = NumRangeService.check_daugavet(T.domain, T, tol, budget)
        emit_checked(report, report.consistent, "Daugavet equation and range criterion disagree", fmt, out, query)


@nr_app.command(name="circle")
def nr_circle(
        op: OpOpt,
        lambdas: Annotated[Optional[List[str]], typer.Option("--lam", help="Unimodular scalar (repeatable)")] = None,
        space: OptionalSpaceOpt = None,
        tol: TolOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """||T|| lies in lambda conv V(T) for every unimodular lambda with lambda T satisfying the equation."""
    with guarded():
        T = operator_from(op, space)
        if lambdas:
            scalars = [parse_scalar(t) for t in lambdas]
        elif T.domain.is_complex:
            scalars = [1, 1j, -1, -1j]
        else:
            scalars = [1, -1]
        report = NumRangeService.daugavet_circle_check(T.domain, T, scalars, tol, budget)
        emit_checked(report, report.counterexamples == 0, f"{report.counterexamples} circle counterexamples",
                     fmt, out, query)
