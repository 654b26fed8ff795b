import typer
from typing import Annotated

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OutOpt, QueryOpt, SpaceOpt, emit, guarded,
)
from daugavet.models.enums import OutputFormat
from daugavet.services.space_service import SpaceService
from daugavet.utils.io_utils import load_space, parse_vector

space_app = typer.Typer(rich_help_panel="Normed Spaces")


@space_app.command(name="dual")
def space_dual(
        space: SpaceOpt,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Descriptor of the dual space."""
    with guarded():
        emit(SpaceService.space_report(load_space(space), dual=True), fmt, out, query)


@space_app.command(name="extremes")
def space_extremes(
        space: SpaceOpt,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Extreme points of the unit ball (polytopal spaces)."""
    with guarded():
        emit(SpaceService.extremes_report(load_space(space)), fmt, out, query)


@space_app.command(name="pairs")
def space_pairs(
        space: SpaceOpt,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Duality pairs (x, x*): exact for polytopal spaces, sampled otherwise."""
    with guarded():
        emit(SpaceService.pairs_report(load_space(space), budget), fmt, out, query)


@space_app.command(name="norm")
def space_norm(
        space: SpaceOpt,
        vector: Annotated[str, typer.Option("--x", "-x", help="Vector as an inline list, e.g. '[1, -2]'")],
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    with guarded():
        emit(SpaceService.norm_report(load_space(space), parse_vector(vector)), fmt, out, query)
