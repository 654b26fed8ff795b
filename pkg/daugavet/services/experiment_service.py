"""Experiments on the discrete X(E) spaces and on the exact l1-sum models of their duals."""
from typing import Optional, Sequence

import numpy as np

from daugavet.exceptions import CapabilityError
from daugavet.models.cantor import PLSpace
from daugavet.models.enums import EmbeddingKind, Exactness, LieMethod, ScalarField, Verdict
from daugavet.models.operator import Operator
from daugavet.models.reports import DualModelReport, TrendRecord, TrendReport
from daugavet.models.space import NormedSpace
from daugavet.services.cantor_service import CantorService
from daugavet.services.index_service import IndexService
from daugavet.services.lie_service import LieService
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.space_service import SpaceService
from daugavet.services.structure_service import StructureService
from daugavet.settings import SETTINGS
from daugavet.utils.console import end_task, log_task

_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
_DUAL_SLACK = 2e-2


class ExperimentService:
    @staticmethod
    def dual_model(kind: EmbeddingKind, gap_count: int) -> NormedSpace:
        """E* (+)_1 l1^gaps: the Euclidean plane for the embedded plane, l1^1 for the constants."""
        e_dual = SpaceService.lp(2, 2) if kind is EmbeddingKind.L2_2 else SpaceService.lp(1, 1)
        return StructureService.l1_sum([e_dual, SpaceService.lp(1, gap_count)])

    @staticmethod
    def linf_index_upper(xe: PLSpace, budget: int, seed: int) -> tuple:
        """Least index bound over the parts of the l-infinity form of X(E).

        Each part's witness extended by zero is an operator on the whole space with the same ratio.
        """
        view, _ = CantorService.linf_form(xe)
        parts = view.parts if view.is_sum else (view,)
        reports = [IndexService.numerical_index_estimate(p, budget, seed) for p in parts]
        best = min(reports, key=lambda r: r.upper)
        exactness = Exactness.EXACT
        for r in reports:
            exactness = exactness & (Exactness.EXACT if r.method == "exact" else Exactness.SAMPLED)
        return best.upper, exactness

    @staticmethod
    def daugavet_fraction(space: NormedSpace, count: int, seed: int) -> float:
        """Share of random rank-one operators y (x) delta_t, t a node, that satisfy the Daugavet equation."""
        if count <= 0:
            return 0.0
        rng = np.random.default_rng(seed)
        rows = space.descriptor.basis
        hits = 0
        for _ in range(count):
            y = SpaceService.normalize(space, rng.standard_normal((1, space.dim)))[0]
            f = rows[int(rng.integers(len(rows)))]
            T = Operator.on(space, np.outer(y, f))
            hits += NumRangeService.check_daugavet(space, T, SETTINGS.tol_sampled).holds
        return hits / count

    @staticmethod
    def main_example_experiment(kind: EmbeddingKind, k: int, m_list: Sequence[int], budget: Optional[int] = None,
                                seed: int = 0, verbose: bool = False) -> TrendReport:
        """Index and Lie algebra of the discrete X(E) per resolution, next to the exact model of its dual.

        Only the dual-model claims for the embedded plane are asserted; primal trends are reported.
        """
        if kind not in (EmbeddingKind.L2_2, EmbeddingKind.CONSTANTS):
            raise CapabilityError(f"the trend experiment runs on l2_2 or constants, not {kind.value}")
        budget = SETTINGS.default_budget if budget is None else budget
        records, assertions = [], {}
        exactness = Exactness.EXACT
        for m in m_list:
            log_task(f"X({kind.value}) at k={k}, m={m}", verbose)
            xe = CantorService.build_kind(k, m, kind)
            gaps = len(xe.grid.gap_nodes)
            index_upper, index_exactness = ExperimentService.linf_index_upper(xe, budget, seed)
            primal = LieService.lie_algebra_basis(xe.space, method=LieMethod.AUTO, budget=budget, verify=False)
            model = ExperimentService.dual_model(kind, gaps)
            dual = LieService.lie_algebra_basis(model, method=LieMethod.AUTO, budget=budget, verify=False)
            drift = 0.0
            if kind is EmbeddingKind.L2_2:
                generator = StructureService.extend_by_zero(Operator.on(model.parts[0], _ROTATION), model.parts[1])
                semigroup = LieService.semigroup_verify(model, generator, budget=budget)
                drift = semigroup.max_drift
                exactness = exactness & semigroup.exactness
                assertions[f"m={m}: dual model Lie dimension >= 1"] = dual.dimension >= 1
                assertions[f"m={m}: rotation drift <= 1e-9"] = drift <= 1e-9
            fraction = ExperimentService.daugavet_fraction(xe.space, budget, seed)
            records.append(TrendRecord(
                m=m, kind=kind.value, dim_x=xe.dim, nodes=xe.grid.size, index_upper=index_upper,
                lie_dim_primal=primal.dimension, lie_dim_dual_model=dual.dimension,
                bump_coverage_fraction=xe.grid.coverage, dual_rotation_drift=drift, daugavet_fraction=fraction,
                field_exactness={"index_upper": index_exactness, "daugavet_fraction": Exactness.SAMPLED},
            ))
            exactness = exactness & primal.exactness & dual.exactness
        end_task("trend experiment", verbose)
        return TrendReport(records=records, assertions=assertions, exactness=exactness)

    # ------------------------------------------------------------------ dual models

    @staticmethod
    def dual_index_experiment(vertices, m: int = 3, budget: Optional[int] = None, seed: int = 0) -> DualModelReport:
        """Index of E* (+)_1 l1^m against the exact index of the polygon E."""
        budget = SETTINGS.default_budget if budget is None else budget
        polygon = SpaceService.polyhedral(vertices)
        reference = IndexService.exact_polygon_index(polygon).upper
        model = StructureService.l1_sum([SpaceService.dual(polygon), SpaceService.lp(1, m)])
        estimate = IndexService.numerical_index_estimate(model, budget, seed)
        return DualModelReport(name="dual_index", space=model.label, value=estimate.upper, reference=reference,
                               holds=abs(estimate.upper - reference) <= _DUAL_SLACK, exactness=Exactness.SAMPLED,
                               field_exactness={"reference": Exactness.EXACT})

    @staticmethod
    def _projections(n: int, count: int, rng: np.random.Generator, complex_field: bool) -> list:
        out = []
        for _ in range(count):
            v = rng.standard_normal(n)
            if complex_field:
                v = v + 1j * rng.standard_normal(n)
            out.append(np.outer(v, v.conj()) / np.vdot(v, v).real)
        return out

    @staticmethod
    def _independent(matrices: list) -> int:
        if not matrices:
            return 0
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in matrices])
        return int(np.linalg.matrix_rank(flat, tol=1e-9))

    @staticmethod
    def hermitian_model_experiment(n: int = 2, m: int = 3, count: int = 8, seed: int = 0,
                                   budget: Optional[int] = None) -> DualModelReport:
        """Orthogonal projections on complex l2^n extended by zero to l2^n (+)_1 l1^m stay hermitian."""
        rng = np.random.default_rng(seed)
        hilbert = SpaceService.lp(2, n, ScalarField.COMPLEX)
        rest = SpaceService.lp(1, m, ScalarField.COMPLEX)
        projections = ExperimentService._projections(n, count, rng, True)
        verdicts = []
        space = None
        for p in projections:
            T = StructureService.extend_by_zero(Operator.on(hilbert, p), rest)
            space = T.domain
            verdicts.append(LieService.is_hermitian(space, T, budget=budget))
        yes = sum(v is Verdict.YES for v in verdicts)
        return DualModelReport(name="hermitian", space=space.label if space else hilbert.label,
                               value=yes / max(count, 1), reference=1.0, holds=yes == count,
                               members=ExperimentService._independent(projections))

    @staticmethod
    def dissipative_model_experiment(n: int = 2, m: int = 3, count: int = 8, seed: int = 0,
                                     budget: Optional[int] = None) -> DualModelReport:
        """Negated orthogonal projections on real l2^n extended by zero are dissipative, the projections are not."""
        rng = np.random.default_rng(seed)
        hilbert = SpaceService.lp(2, n)
        rest = SpaceService.lp(1, m)
        projections = ExperimentService._projections(n, count, rng, False)
        good, space = 0, None
        for p in projections:
            T = StructureService.extend_by_zero(Operator.on(hilbert, -p), rest)
            space = T.domain
            negative = LieService.is_dissipative(space, T, budget=budget) is Verdict.YES
            positive = LieService.is_dissipative(space, T.scaled(-1), budget=budget) is Verdict.NO
            good += negative and positive
        return DualModelReport(name="dissipative", space=space.label if space else hilbert.label,
                               value=good / max(count, 1), reference=1.0, holds=good == count,
                               members=ExperimentService._independent(projections))
