import typer
from pathlib import Path
from typing import Annotated, List

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OpOpt, OutOpt, QueryOpt, emit, emit_checked, guarded,
)
from daugavet.commands.nr_commands import OptionalSpaceOpt, operator_from
from daugavet.models.enums import ExtensionMode, OutputFormat, SumKind
from daugavet.services.space_service import SpaceService
from daugavet.services.structure_service import StructureService
from daugavet.utils.io_utils import load_space

sum_app = typer.Typer(rich_help_panel="Direct Sums")

ComplementOpt = Annotated[Path, typer.Option("--with", "-w", help="Complement space Z descriptor")]
ModeOpt = Annotated[ExtensionMode, typer.Option("--mode", "-m", help="Extension by zero or by the identity")]


@sum_app.command(name="build")
def sum_build(
        parts: Annotated[List[Path], typer.Argument(help="Part descriptors, in order")],
        kind: Annotated[SumKind, typer.Option("--kind", "-k", help="l1 or linf sum")] = SumKind.L1,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Descriptor of the l1 or linf sum of the given spaces."""
    with guarded():
        spaces = [load_space(p) for p in parts]
        space = StructureService.l1_sum(spaces) if kind is SumKind.L1 else StructureService.linf_sum(spaces)
        emit(SpaceService.space_report(space), fmt, out, query)


@sum_app.command(name="extend")
def sum_extend(
        op: OpOpt,
        complement: ComplementOpt,
        space: OptionalSpaceOpt = None,
        mode: ModeOpt = ExtensionMode.ZERO,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Extend S on Y to Y (+)_1 Z (exit 4 with a witness when an isometry extension is refuted)."""
    with guarded():
        S = operator_from(op, space)
        emit(StructureService.extension_report(S, load_space(complement), mode, budget), fmt, out, query)


@sum_app.command(name="containment")
def sum_containment(
        op: OpOpt,
        complement: ComplementOpt,
        space: OptionalSpaceOpt = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """V of the zero extension lies in conv({0} u [0, 1] V(S))."""
    with guarded():
        S = operator_from(op, space)
        report = StructureService.range_containment(S, load_space(complement), budget)
        emit_checked(report, report.holds, f"range containment violated by {report.max_violation:.3e}",
                     fmt, out, query)
