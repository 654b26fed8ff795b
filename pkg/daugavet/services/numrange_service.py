from typing import Optional, Sequence

import numpy as np

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import Exactness
from daugavet.models.operator import Operator
from daugavet.models.reports import (
    CircleCheckReport,
    CircleInstance,
    DaugavetReport,
    ExpFormulaReport,
    RangeSummary,
)
from daugavet.models.space import Estimate, Lp, NormedSpace, SupSubspace
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils import polytope_utils as pu
from daugavet.utils.parallel_utils import parallel_map
from daugavet.utils.sphere_utils import circle_maximize, sphere_maximize

_AGREEMENT_TOL = 1e-6
_STABLE_TOL = 1e-9


def _pair_value(f: np.ndarray, y: np.ndarray) -> complex:
    return complex(np.sum(np.conj(f) * y))


def _sgn(z: np.ndarray) -> np.ndarray:
    a = np.abs(z)
    return np.divide(z, a, out=np.ones_like(z), where=a > 0)


class NumRangeService:
    # ------------------------------------------------------------------ sup Re V(T)

    @staticmethod
    def sup_re(space: NormedSpace, T, budget: Optional[int] = None) -> Estimate:
        """sup Re V(T) with a state (witness, functional) attaining it and the attained element of V(T)."""
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T, dtype=space.dtype)
        view, perm = SpaceService.structural_view(space)
        mv = OperatorService.view_matrix(matrix, perm, perm)
        est = NumRangeService._sup_re_view(view, mv, budget)
        if perm is None:
            return est
        unpermute = SpaceService._unpermute
        return Estimate(est.value, est.exactness,
                        None if est.witness is None else unpermute(est.witness[None, :], perm)[0],
                        None if est.functional is None else unpermute(est.functional[None, :], perm)[0],
                        est.element, est.reduced_accuracy, est.note)

    @staticmethod
    def inf_re(space: NormedSpace, T, budget: Optional[int] = None) -> Estimate:
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T)
        est = NumRangeService.sup_re(space, -matrix, budget)
        element = None if est.element is None else -est.element
        return Estimate(-est.value, est.exactness, est.witness, est.functional, element, note=est.note)

    @staticmethod
    def _sup_re_view(view: NormedSpace, mv: np.ndarray, budget: Optional[int]) -> Estimate:
        d = view.descriptor
        if isinstance(d, Lp) and d.p in (1.0, 2.0, float("inf")):
            return NumRangeService._closed_form(d.p, mv)
        if view.is_sum and OperatorService.is_block_diagonal(view, mv):
            return NumRangeService._block_sup_re(view, mv, budget)
        dual = SpaceService.cheap_dual(view)
        primal_cost = SpaceService.families_cost(SpaceService.extreme_families(view))
        dual_cost = float("inf") if dual is None else SpaceService.families_cost(SpaceService.extreme_families(dual))
        if primal_cost == float("inf") and dual_cost == float("inf"):
            if isinstance(d, SupSubspace):
                return NumRangeService._face_lp(view, mv)
            return NumRangeService._sampled(view, mv, budget)
        if primal_cost <= dual_cost:
            est = SpaceService.maximize(view, lambda xs: SpaceService.directional_derivatives(view, xs, xs @ mv.T),
                                        budget)
            x = est.witness
            f = SpaceService.supporting_functionals(view, x[None, :], (mv @ x)[None, :])[0]
            return Estimate(est.value, est.exactness, x, f, _pair_value(f, mv @ x), note="extreme points")
        adj = mv.conj()
        est = SpaceService.maximize(dual, lambda gs: SpaceService.directional_derivatives(dual, gs, gs @ adj), budget)
        g = est.witness
        x = SpaceService.supporting_functionals(dual, g[None, :], (g @ adj)[None, :])[0]
        return Estimate(est.value, est.exactness, x, g, _pair_value(g, mv @ x), note="dual extreme points")

    @staticmethod
    def _block_sup_re(view: NormedSpace, mv: np.ndarray, budget: Optional[int]) -> Estimate:
        """The numerical range of a block-diagonal operator on an absolute sum is the hull of the blocks' ranges."""
        best, exactness = None, Exactness.EXACT
        for part, block in zip(view.parts, view.blocks):
            est = NumRangeService.sup_re(part, mv[block, block], budget)
            exactness = exactness & est.exactness
            if best is None or est.value > best[1].value:
                best = (block, est)
        block, est = best
        witness = np.zeros(view.dim, dtype=view.dtype)
        functional = np.zeros(view.dim, dtype=view.dtype)
        if est.witness is not None:
            witness[block] = est.witness
        if est.functional is not None:
            functional[block] = est.functional
        return Estimate(est.value, exactness, witness, functional, est.element, note="largest block")

    @staticmethod
    def _closed_form(p: float, mv: np.ndarray) -> Estimate:
        n = len(mv)
        if p == 2.0:
            h = (mv + mv.conj().T) / 2
            w, v = np.linalg.eigh(h)
            x = v[:, -1]
            return Estimate(float(w[-1]), Exactness.EXACT, x, x.copy(), _pair_value(x, mv @ x), note="hermitian part")
        off = np.abs(mv) * (1 - np.eye(n))
        if np.isinf(p):
            scores = np.real(np.diag(mv)) + off.sum(axis=1)
            i = int(np.argmax(scores))
            x = np.conj(_sgn(mv[i]))
            x[i] = 1.0
            x = x.astype(mv.dtype)
            f = np.zeros(n, dtype=mv.dtype)
            f[i] = 1.0
        else:
            scores = np.real(np.diag(mv)) + off.sum(axis=0)
            i = int(np.argmax(scores))
            x = np.zeros(n, dtype=mv.dtype)
            x[i] = 1.0
            f = _sgn(mv[:, i]).astype(mv.dtype)
            f[i] = 1.0
        return Estimate(float(scores[i]), Exactness.EXACT, x, f, _pair_value(f, mv @ x), note="closed form")

    @staticmethod
    def _face_lp(view: NormedSpace, mv: np.ndarray) -> Estimate:
        """One LP per node functional: max f_r(Tx) over the face {f_r = 1} of the ball."""
        basis = view.descriptor.basis
        best = (-np.inf, None, None)
        for row in basis:
            found = pu.face_lp_max(basis, row, row @ mv)
            if found is not None and found[0] > best[0]:
                best = (found[0], found[1], row)
        value, x, f = best
        return Estimate(float(value), Exactness.EXACT, x, f.astype(float), _pair_value(f, mv @ x), note="face LP")

    @staticmethod
    def _sampled(view: NormedSpace, mv: np.ndarray, budget: Optional[int]) -> Estimate:
        budget = budget or SETTINGS.default_budget
        value, x = sphere_maximize(lambda xs: SpaceService.directional_derivatives(view, xs, xs @ mv.T), view.dim,
                                   view.is_complex, max(8 * budget, 512), lambda xs: SpaceService.normalize(view, xs))
        f = SpaceService.supporting_functionals(view, x[None, :], (mv @ x)[None, :])[0]
        return Estimate(float(value), Exactness.SAMPLED, x, f, _pair_value(f, mv @ x), note="sampled")

    # ------------------------------------------------------------------ numerical radius

    @staticmethod
    def radius(space: NormedSpace, T, budget: Optional[int] = None) -> Estimate:
        """v(T); the real case is max(sup Re V(T), sup Re V(-T)), the complex case a refined theta grid."""
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T, dtype=space.dtype)
        if not space.is_complex:
            if space.is_hilbert:
                w = np.linalg.eigvalsh((matrix + matrix.T) / 2)
                return Estimate(float(np.max(np.abs(w))), Exactness.EXACT)
            up = NumRangeService.sup_re(space, matrix, budget)
            down = NumRangeService.inf_re(space, matrix, budget)
            best = up if up.value >= -down.value else down
            return Estimate(max(up.value, -down.value), up.exactness & down.exactness, best.witness,
                            best.functional, best.element)
        if space.is_hilbert:
            def values(thetas):
                rotated = np.exp(1j * np.asarray(thetas))[:, None, None] * matrix[None, :, :]
                herm = (rotated + np.conj(np.transpose(rotated, (0, 2, 1)))) / 2
                return np.linalg.eigvalsh(herm)[:, -1]
            exactness = Exactness.CONVERGED
        else:
            exactness = NumRangeService.sup_re(space, matrix, budget).exactness & Exactness.CONVERGED

            def values(thetas):
                return np.array(parallel_map(
                    lambda t: NumRangeService.sup_re(space, np.exp(1j * t) * matrix, budget).value, list(thetas)))
        grid, previous, reduced = SETTINGS.theta_grid_start, None, True
        value, theta = circle_maximize(values, grid)
        while grid < SETTINGS.theta_grid_cap:
            grid *= 2
            previous = value
            value, theta = circle_maximize(values, grid)
            value = max(value, previous)
            if abs(value - previous) < _STABLE_TOL:
                reduced = False
                break
        est = NumRangeService.sup_re(space, np.exp(1j * theta) * matrix, budget)
        element = None if est.element is None else est.element * np.exp(-1j * theta)
        return Estimate(float(value), exactness, est.witness, est.functional, element, reduced_accuracy=reduced)

    # ------------------------------------------------------------------ operations

    @staticmethod
    def range_summary(space: NormedSpace, T: Operator, budget: Optional[int] = None) -> RangeSummary:
        budget = budget or SETTINGS.default_budget
        pairs = SpaceService.duality_pairs(space, budget)
        samples = list(pairs.values(T.matrix))
        up = NumRangeService.sup_re(space, T, budget)
        down = NumRangeService.inf_re(space, T, budget)
        rad = NumRangeService.radius(space, T, budget)
        for element in (up.element, down.element, rad.element):
            if element is not None:
                samples.append(complex(element))
        sample_abs = max((abs(z) for z in samples), default=0.0)
        exactness = up.exactness & down.exactness & rad.exactness
        return RangeSummary(
            radius=max(rad.value, sample_abs, abs(up.value), abs(down.value)),
            sup_re=up.value,
            inf_re=down.value,
            samples=[complex(z) if space.is_complex else float(np.real(z)) for z in samples],
            witness=up.witness,
            functional=up.functional,
            reduced_accuracy=rad.reduced_accuracy,
            exactness=exactness,
            field_exactness={"samples": pairs.exactness},
        )

    @staticmethod
    def exp_formula(space: NormedSpace, T: Operator, budget: Optional[int] = None) -> ExpFormulaReport:
        """sup Re V(T) three ways: states, the one-sided derivative of the norm at Id, and the exponential growth."""
        lhs = NumRangeService.sup_re(space, T, budget)
        ident = np.eye(space.dim, dtype=space.dtype)
        matrix = T.matrix

        def norm_of(m: np.ndarray) -> Estimate:
            return OperatorService.op_norm_estimate(Operator(m, space, space), budget)

        exactness = lhs.exactness
        g = {}
        for j in range(10, 31):
            beta = 2.0**-j
            est = norm_of(ident + beta * matrix)
            exactness = exactness & est.exactness
            g[j] = (est.value - 1.0) / beta
        richardson = {j: 2 * g[j + 1] - g[j] for j in range(10, 30)}
        best_j = min(range(14, 27), key=lambda j: abs(richardson[j] - richardson[j + 1]))
        mid = richardson[best_j]

        def growth(alpha: float) -> float:
            nonlocal exactness
            est = norm_of(OperatorService.expm(matrix, alpha))
            exactness = exactness & est.exactness
            return float(np.log(est.value) / alpha)

        grid = [1e-3 * 2.0**k for k in range(0, 17)] + [1e2]
        grid_max = max(growth(a) for a in grid)
        a0 = 1e-3 / 2**8
        h1, h2, h4 = growth(a0), growth(2 * a0), growth(4 * a0)
        r_small, r_large = 2 * h1 - h2, 2 * h2 - h4
        extrapolated = (4 * r_small - r_large) / 3
        rhs = max(grid_max, extrapolated)
        agree = max(lhs.value, mid, rhs) - min(lhs.value, mid, rhs) <= _AGREEMENT_TOL
        return ExpFormulaReport(lhs=lhs.value, mid=mid, rhs=rhs, rhs_grid_max=grid_max,
                                mid_sequence=[g[j] for j in range(10, 31)], agree=agree, exactness=exactness)

    @staticmethod
    def check_daugavet(space: NormedSpace, T: Operator, tol: Optional[float] = None,
                       budget: Optional[int] = None) -> DaugavetReport:
        """Test ||Id + T|| = 1 + ||T|| directly and through sup Re V(T) = ||T||."""
        norm = OperatorService.op_norm_estimate(T, budget)
        ident = np.eye(space.dim, dtype=space.dtype)
        shifted = OperatorService.op_norm_estimate(Operator(ident + T.matrix, space, space), budget)
        sup = NumRangeService.sup_re(space, T, budget)
        exactness = norm.exactness & shifted.exactness & sup.exactness
        tol = SETTINGS.tolerance(exactness.is_certified) if tol is None else tol
        holds = abs(shifted.value - (1.0 + norm.value)) <= tol
        criterion = abs(sup.value - norm.value) <= tol
        return DaugavetReport(holds=holds, lhs=shifted.value, rhs=1.0 + norm.value, sup_re=sup.value,
                              op_norm=norm.value, range_criterion=criterion, consistent=holds == criterion,
                              degenerate=norm.value <= tol, exactness=exactness)

    @staticmethod
    def daugavet_circle_check(space: NormedSpace, T: Operator, lambdas: Sequence[complex],
                              tol: Optional[float] = None, budget: Optional[int] = None) -> CircleCheckReport:
        """For every unimodular lambda with lambda*T satisfying the Daugavet equation, check ||T|| lies in
        lambda times the closed convex hull of the sampled numerical range."""
        for lam in lambdas:
            if abs(abs(lam) - 1) > 1e-12 or (not space.is_complex and abs(np.imag(lam)) > 0):
                raise CapabilityError(f"lambda {lam} is not a unimodular scalar of the field")
        norm = OperatorService.op_norm_estimate(T, budget)
        pairs = SpaceService.duality_pairs(space, budget)
        samples = list(pairs.values(T.matrix))
        directions = pu.unit_directions(SETTINGS.support_directions)
        exactness = norm.exactness & pairs.exactness
        tol = SETTINGS.tolerance(exactness.is_certified) if tol is None else tol
        instances = []
        for lam in lambdas:
            lam = complex(lam)
            scaled = Operator(lam * T.matrix if space.is_complex else np.real(lam) * T.matrix, space, space)
            report = NumRangeService.check_daugavet(space, scaled, tol, budget)
            exactness = exactness & report.exactness
            if not report.holds:
                instances.append(CircleInstance(lam=lam, equation_holds=False, target=norm.value, distance=0.0,
                                                 verified=True, exactness=report.exactness))
                continue
            # the state maximising Re V(lambda*T) attains mu = f(lambda*T x); conj(lambda)*mu = f(Tx) lies in V(T)
            attained = NumRangeService.sup_re(space, scaled, budget)
            exactness = exactness & attained.exactness
            points = list(samples)
            if attained.element is not None:
                points.append(np.conj(lam) * attained.element)
            target = np.conj(lam) * norm.value
            gap = float(np.max(np.real(np.conj(directions) * target) - pu.support(points, directions)))
            distance = max(gap, 0.0)
            instances.append(CircleInstance(lam=lam, equation_holds=True, target=norm.value, distance=distance,
                                            verified=distance <= tol, exactness=report.exactness))
        return CircleCheckReport(op_norm=norm.value, instances=instances,
                                 counterexamples=sum(1 for i in instances if not i.verified), exactness=exactness)
