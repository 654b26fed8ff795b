import typer
from typing import Annotated, Optional

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OutOpt, QueryOpt, SeedOpt, SpaceOpt, emit, emit_checked, guarded,
)
from daugavet.models.enums import OutputFormat
from daugavet.services.index_service import IndexService
from daugavet.utils.io_utils import load_space

index_app = typer.Typer(rich_help_panel="Numerical Index")


@index_app.command(name="estimate")
def index_estimate(
        space: SpaceOpt,
        budget: BudgetOpt = DEFAULT_BUDGET,
        seed: SeedOpt = 0,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Upper bound for the numerical index with a witness operator of norm one."""
    with guarded():
        emit(IndexService.numerical_index_estimate(load_space(space), budget, seed), fmt, out, query)


@index_app.command(name="dualcheck")
def index_dualcheck(
        space: SpaceOpt,
        trials: Annotated[int, typer.Option("--trials", "-t", min=1, help="Random operators")] = 100,
        budget: BudgetOpt = DEFAULT_BUDGET,
        seed: SeedOpt = 0,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """v(T) = v(T*) on random operators and n(X*) <= n(X) up to the search slack."""
    with guarded():
        report = IndexService.verify_dual_inequality(load_space(space), trials, seed, budget)
        emit_checked(report, report.holds, f"{report.violations} adjoint violations", fmt, out, query)


@index_app.command(name="polygons")
def index_polygons(
        target: Annotated[Optional[float], typer.Option("--target", help="Index value to approach")] = None,
        steps: Annotated[int, typer.Option("--steps", min=1, help="Hexagon family resolution")] = 50,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Exact index of a family of planar polygons."""
    with guarded():
        emit(IndexService.polygon_index_search(target, steps), fmt, out, query)
