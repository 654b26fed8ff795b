import typer
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Optional

from daugavet.commands.common import (
    DEFAULT_BUDGET, BudgetOpt, FormatOpt, OutOpt, QueryOpt, SeedOpt, TolOpt, VerboseOpt, emit, emit_checked, guarded,
)
from daugavet.exceptions import ConstructionError
from daugavet.models.enums import EmbeddingKind, OutputFormat
from daugavet.services.cantor_service import CantorService
from daugavet.services.experiment_service import ExperimentService
from daugavet.services.space_service import SpaceService
from daugavet.utils.io_utils import load_document

cantor_app = typer.Typer(rich_help_panel="Cantor Construction")

LevelOpt = Annotated[int, typer.Option("--k", "-k", min=0, help="Cantor level")]
GridOpt = Annotated[int, typer.Option("--m", "-m", min=1, help="Grid size, a multiple of 3^k")]
KindOpt = Annotated[EmbeddingKind, typer.Option("--kind", help="Subspace E of the Cantor-node functions")]


class DualModel(Enum):
    DUAL_INDEX = "dual-index"
    HERMITIAN = "hermitian"
    DISSIPATIVE = "dissipative"


_HEXAGON = [[1.0, 0.0], [0.5, 0.8660254037844386], [-0.5, 0.8660254037844386]]


@cantor_app.command(name="grid")
def cantor_grid(
        k: LevelOpt = 1,
        m: GridOpt = 27,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Cantor and gap node counts of the grid i/m."""
    with guarded():
        emit(CantorService.grid_report(CantorService.cantor_grid(k, m)), fmt, out, query)


@cantor_app.command(name="build")
def cantor_build(
        k: LevelOpt = 1,
        m: GridOpt = 27,
        kind: KindOpt = EmbeddingKind.CONSTANTS,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Descriptor of the piecewise-linear space X(E)."""
    with guarded():
        emit(SpaceService.space_report(CantorService.build_kind(k, m, kind).space), fmt, out, query)


@cantor_app.command(name="bump")
def cantor_bump(
        lo: Annotated[float, typer.Option("--lo", help="Left end of the open interval")],
        hi: Annotated[float, typer.Option("--hi", help="Right end of the open interval")],
        k: LevelOpt = 1,
        m: GridOpt = 27,
        kind: KindOpt = EmbeddingKind.CONSTANTS,
        refine: Annotated[bool, typer.Option(help="Triple m until a bump exists")] = False,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
        verbose: VerboseOpt = False,
):
    """Hat function supported in (lo, hi); exit 4 when none exists at this resolution."""
    with guarded():
        if not lo < hi:
            raise ConstructionError("interval has lo < hi", f"({lo}, {hi})")
        if refine:
            report = CantorService.refine_bump(k, m, (lo, hi), kind, verbose=verbose)
        else:
            report = CantorService.bump_report(CantorService.build_kind(k, m, kind), (lo, hi))
        emit_checked(report, report.found, f"no admissible gap node in ({lo}, {hi}) at m={report.m}",
                     fmt, out, query)


@cantor_app.command(name="quotient")
def cantor_quotient(
        k: LevelOpt = 1,
        m: GridOpt = 27,
        kind: KindOpt = EmbeddingKind.L2_2,
        count: Annotated[int, typer.Option("--count", min=1, help="Random samples of E")] = 64,
        seed: SeedOpt = 0,
        tol: TolOpt = None,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Restriction to the Cantor nodes maps the open unit ball of X(E) onto that of E."""
    with guarded():
        xe = CantorService.build_kind(k, m, kind)
        report = CantorService.quotient_isometry_check(xe, tol=1e-10 if tol is None else tol, count=count, seed=seed)
        emit_checked(report, report.holds, f"quotient error {report.max_error:.3e}", fmt, out, query)


@cantor_app.command(name="gapnorms")
def cantor_gapnorms(
        k: LevelOpt = 1,
        m: GridOpt = 27,
        kind: KindOpt = EmbeddingKind.CONSTANTS,
        tol: TolOpt = None,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Norms of the gap-node evaluation functionals on X(E)."""
    with guarded():
        emit(CantorService.gap_functional_norms(CantorService.build_kind(k, m, kind), tol), fmt, out, query)


@cantor_app.command(name="embed")
def cantor_embed(
        count: Annotated[int, typer.Option("--nodes", "-n", min=1, help="Number of sup-norm nodes")] = 20,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Distortion of the cosine-sine copy of the Euclidean plane."""
    with guarded():
        emit(CantorService.embed_report(count), fmt, out, query)


@cantor_app.command(name="experiment")
def cantor_experiment(
        kind: KindOpt = EmbeddingKind.L2_2,
        k: LevelOpt = 1,
        m_list: Annotated[Optional[List[int]], typer.Option("--m", "-m", help="Grid sizes (repeatable)")] = None,
        budget: BudgetOpt = DEFAULT_BUDGET,
        seed: SeedOpt = 0,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
        verbose: VerboseOpt = False,
):
    """Index and Lie-algebra trends of X(E) next to its exact dual model (exit 4 on a failed dual claim)."""
    with guarded():
        report = ExperimentService.main_example_experiment(kind, k, m_list or [27, 81], budget, seed, verbose)
        failed = [name for name, ok in report.assertions.items() if not ok]
        emit_checked(report, not failed, "; ".join(failed), fmt, out, query)


@cantor_app.command(name="models")
def cantor_models(
        model: Annotated[DualModel, typer.Argument(help="Dual-model experiment")],
        polygon: Annotated[Optional[Path], typer.Option("--polygon", help="Vertices of E (dual-index model)")] = None,
        n: Annotated[int, typer.Option("--n", min=1, help="Dimension of the Hilbert part")] = 2,
        m: Annotated[int, typer.Option("--m", "-m", min=1, help="Dimension of the l1 part")] = 3,
        count: Annotated[int, typer.Option("--count", min=1, help="Operators per experiment")] = 8,
        budget: BudgetOpt = DEFAULT_BUDGET,
        seed: SeedOpt = 0,
        out: OutOpt = None,
        fmt: FormatOpt = OutputFormat.JSON,
        query: QueryOpt = None,
):
    """Experiments on exact l1-sum models of dual spaces."""
    with guarded():
        if model is DualModel.DUAL_INDEX:
            vertices = _HEXAGON if polygon is None else load_document(polygon)
            if isinstance(vertices, dict):
                vertices = vertices.get("vertices", vertices.get("polyhedral", {}).get("vertices"))
            report = ExperimentService.dual_index_experiment(vertices, m, budget, seed)
        elif model is DualModel.HERMITIAN:
            report = ExperimentService.hermitian_model_experiment(n, m, count, seed, budget)
        else:
            report = ExperimentService.dissipative_model_experiment(n, m, count, seed, budget)
        emit_checked(report, report.holds, f"{model.value} model check failed", fmt, out, query)
