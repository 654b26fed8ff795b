import itertools
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import Exactness
from daugavet.models.operator import Operator
from daugavet.models.reports import DualInequalityReport, IndexReport, PolygonIndexRow, PolygonSearchReport
from daugavet.models.space import Lp, NormedSpace, Polyhedral
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils.parallel_utils import parallel_map

_EXACT_MAX_VERTICES = 8
_POLISHED_STARTS = 3
_INITIAL_STEP = 0.25
_GOOD_ENOUGH = 1e-12
_DUAL_SLACK = 2e-2
_ADJOINT_TOL = 1e-9


class _Objective:
    """v(T) / ||T|| on a fixed space, counting evaluations and tracking provenance."""

    def __init__(self, space: NormedSpace, budget: Optional[int]):
        self.space = space
        self.budget = budget
        self.evaluations = 0
        self.exactness = Exactness.EXACT

    def __call__(self, matrix: np.ndarray) -> float:
        self.evaluations += 1
        norm = OperatorService.op_norm_estimate(Operator.on(self.space, matrix), self.budget)
        if norm.value <= 1e-14:
            return np.inf
        radius = NumRangeService.radius(self.space, matrix, self.budget)
        self.exactness = self.exactness & norm.exactness & radius.exactness
        return float(radius.value / norm.value)


def _lexicographic(matrix: np.ndarray) -> tuple:
    flat = np.asarray(matrix).ravel()
    return tuple(np.round(np.concatenate([flat.real, flat.imag]), 12))


def _is_small_polygon(space: NormedSpace) -> bool:
    if space.is_complex or space.dim > 2:
        return False
    if space.dim == 1:
        return True
    d = space.descriptor
    if isinstance(d, Lp):
        return d.p in (1.0, float("inf"))
    if isinstance(d, Polyhedral):
        return len(d.vertices) <= _EXACT_MAX_VERTICES
    try:
        return SpaceService.extreme_count(space) <= _EXACT_MAX_VERTICES
    except CapabilityError:
        return False


def _known_index(space: NormedSpace) -> Optional[float]:
    d = space.descriptor
    if not isinstance(d, Lp):
        return None
    if d.p in (1.0, float("inf")) or space.dim == 1:
        return 1.0
    if d.p == 2.0:
        return 0.5 if space.is_complex else 0.0
    return None


class IndexService:
    @staticmethod
    def numerical_index_estimate(space: NormedSpace, budget: Optional[int] = None, seed: int = 0) -> IndexReport:
        """Upper bound for the numerical index: the least v(T)/||T|| found by a seeded multi-start search.

        Real polygons with at most eight vertices are solved exactly instead. For l1, l-infinity and
        Hilbert atoms the known index is reported as ``reference`` next to the searched bound.
        """
        budget = SETTINGS.default_budget if budget is None else budget
        if _is_small_polygon(space):
            return IndexService.exact_polygon_index(space)
        objective = _Objective(space, budget)
        starts = IndexService.structured_starts(space, budget, seed) + IndexService.random_starts(space, budget, seed)
        values = parallel_map(objective, starts)
        order = sorted(range(len(starts)), key=lambda i: (values[i], _lexicographic(starts[i])))
        best_value, best = values[order[0]], starts[order[0]]
        if space.dim <= SETTINGS.search_max_dim and best_value > _GOOD_ENOUGH:
            for i in order[:_POLISHED_STARTS]:
                value, matrix = IndexService.pattern_search(objective, starts[i], values[i])
                if (value, _lexicographic(matrix)) < (best_value, _lexicographic(best)):
                    best_value, best = value, matrix
        norm = OperatorService.op_norm(Operator.on(space, best))
        witness = best / norm
        provenance = {"upper": objective.exactness, "witness": objective.exactness}
        reference = _known_index(space)
        if reference is not None:
            provenance["reference"] = Exactness.EXACT
        return IndexReport(space=space.label, upper=float(best_value), estimate=float(best_value),
                           lower_bound=1 / np.e if space.is_complex else 0.0, witness=witness,
                           candidates=len(starts), evaluations=objective.evaluations, method="search",
                           reference=reference, exactness=Exactness.SAMPLED, field_exactness=provenance)

    # ------------------------------------------------------------------ candidates

    @staticmethod
    def structured_starts(space: NormedSpace, budget: int, seed: int) -> List[np.ndarray]:
        n = space.dim
        dtype = space.dtype
        starts = [np.eye(n, dtype=dtype)]
        for i, j in itertools.permutations(range(n), 2):
            nilpotent = np.zeros((n, n), dtype=dtype)
            nilpotent[i, j] = 1.0
            starts.append(nilpotent)
            if i < j:
                skew = np.zeros((n, n), dtype=dtype)
                skew[i, j], skew[j, i] = 1.0, -1.0
                starts.append(skew)
        if n <= 3:
            for perm in itertools.permutations(range(n)):
                if list(perm) == list(range(n)):
                    continue
                for signs in itertools.product([1.0, -1.0], repeat=n):
                    m = np.zeros((n, n), dtype=dtype)
                    m[np.arange(n), perm] = signs
                    starts.append(m)
        else:
            shift = np.roll(np.eye(n, dtype=dtype), 1, axis=1)
            starts.extend([shift, -shift, shift.T])
        if space.is_complex:
            starts.append(np.diag(np.exp(2j * np.pi * np.arange(n) / max(n, 2))))
        for part, block in zip(space.parts, space.blocks):
            if part.dim == 0:
                continue
            report = IndexService.numerical_index_estimate(part, budget, seed)
            if report.witness is None:
                continue
            m = np.zeros((n, n), dtype=dtype)
            m[block, block] = report.witness
            starts.append(m)
        return starts

    @staticmethod
    def random_starts(space: NormedSpace, budget: int, seed: int) -> List[np.ndarray]:
        """Entries uniform on [-1, 1], normalised in the Frobenius norm."""
        rng = np.random.default_rng(seed)
        n = space.dim
        out = []
        for _ in range(budget):
            m = rng.uniform(-1, 1, (n, n))
            if space.is_complex:
                m = m + 1j * rng.uniform(-1, 1, (n, n))
            out.append(m / np.linalg.norm(m))
        return out

    @staticmethod
    def pattern_search(objective, start: np.ndarray, value: float) -> tuple:
        """Coordinate pattern search on the (real) entries; the step halves after a failed sweep."""
        complex_field = np.iscomplexobj(start)
        shape = start.shape

        def unpack(z):
            if complex_field:
                half = z.size // 2
                return (z[:half] + 1j * z[half:]).reshape(shape)
            return z.reshape(shape)

        z = np.concatenate([start.real.ravel(), start.imag.ravel()]) if complex_field else start.ravel().copy()
        z = z / np.linalg.norm(z)
        step, shrinks, evaluations = _INITIAL_STEP, 0, 0
        while shrinks < SETTINGS.pattern_shrinks and evaluations < SETTINGS.max_evals and value > _GOOD_ENOUGH:
            improved = False
            for k in range(len(z)):
                for sign in (1.0, -1.0):
                    trial = z.copy()
                    trial[k] += sign * step
                    if not np.any(trial):
                        continue
                    trial_value = objective(unpack(trial))
                    evaluations += 1
                    if trial_value < value:
                        z, value, improved = trial / np.linalg.norm(trial), trial_value, True
                        break
                if evaluations >= SETTINGS.max_evals or value <= _GOOD_ENOUGH:
                    break
            if not improved:
                step /= 2
                shrinks += 1
        return float(value), unpack(z)

    # ------------------------------------------------------------------ exact polygons

    @staticmethod
    def exact_polygon_index(space: NormedSpace) -> IndexReport:
        """min v(T) over ||T|| = 1, one LP per norm-attaining (functional, vertex) pair."""
        n = space.dim
        if n == 1:
            return IndexReport(space=space.label, upper=1.0, estimate=1.0, lower_bound=1.0,
                               witness=np.eye(1), candidates=1, method="exact")
        pairs = SpaceService.duality_pairs(space)
        states = np.einsum("ki,kj->kij", pairs.fs, pairs.xs).reshape(len(pairs), -1)
        vertices = SpaceService.extreme_points(space)
        functionals = SpaceService.extreme_points(SpaceService.dual(space))
        rows, seen = [], []
        for f, v in itertools.product(functionals, vertices):
            b = np.outer(f, v).ravel()
            if any(np.allclose(b, s, atol=1e-12) for s in seen):
                continue
            seen.append(b)
            rows.append(b)
        norm_rows = np.array(rows)
        best, witness = np.inf, None
        width = n * n
        # variables (t, s): minimise s with |a.t| <= s, b'.t <= 1 and b.t = 1
        cost = np.zeros(width + 1)
        cost[-1] = 1.0
        a_ub = np.vstack([
            np.hstack([states, -np.ones((len(states), 1))]),
            np.hstack([-states, -np.ones((len(states), 1))]),
            np.hstack([norm_rows, np.zeros((len(norm_rows), 1))]),
        ])
        b_ub = np.concatenate([np.zeros(2 * len(states)), np.ones(len(norm_rows))])
        for b in norm_rows:
            res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=np.append(b, 0.0)[None, :], b_eq=[1.0],
                          bounds=[(None, None)] * width + [(0, None)], method="highs")
            if res.status == 0 and res.fun < best - 1e-12:
                best, witness = float(res.fun), res.x[:width].reshape(n, n)
        return IndexReport(space=space.label, upper=best, estimate=best, lower_bound=best, witness=witness,
                           candidates=len(norm_rows), evaluations=len(norm_rows), method="exact")

    @staticmethod
    def polygon_index_search(target: Optional[float] = None, steps: int = 50) -> PolygonSearchReport:
        """Exact index of regular 4-, 6- and 8-gons and of the hexagons conv{+-e1, +-e2, +-(t, t)}."""
        rows = []
        for k in (2, 3, 4):
            angles = np.pi * np.arange(k) / k
            space = SpaceService.polyhedral(np.stack([np.cos(angles), np.sin(angles)], axis=1))
            rows.append(PolygonIndexRow(name=f"regular-{2 * k}", vertices=len(space.descriptor.vertices),
                                        index=IndexService.exact_polygon_index(space).upper))
        for t in np.linspace(0.55, 3.0, steps):
            space = SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [t, t]])
            rows.append(PolygonIndexRow(name=f"hexagon-t={t:.4f}", vertices=len(space.descriptor.vertices),
                                        index=IndexService.exact_polygon_index(space).upper))
        if target is None:
            best = min(rows, key=lambda r: (r.index, r.name))
        else:
            best = min(rows, key=lambda r: (abs(r.index - target), r.name))
        return PolygonSearchReport(rows=rows, best_name=best.name, best_index=best.index)

    # ------------------------------------------------------------------ duality

    @staticmethod
    def verify_dual_inequality(space: NormedSpace, trials: int = 100, seed: int = 0,
                               budget: Optional[int] = None) -> DualInequalityReport:
        """v(T) = v(T*) on random operators, and the index of the dual against the index of the space."""
        rng = np.random.default_rng(seed)
        exactness = Exactness.EXACT
        gaps = []
        for _ in range(trials):
            T = OperatorService.random(space, rng)
            primal = NumRangeService.radius(space, T, budget)
            adj = OperatorService.adjoint(T)
            dual = NumRangeService.radius(adj.domain, adj, budget)
            exactness = exactness & primal.exactness & dual.exactness
            gaps.append(abs(primal.value - dual.value))
        index = IndexService.numerical_index_estimate(space, budget, seed)
        dual_index = IndexService.numerical_index_estimate(SpaceService.dual(space), budget, seed)
        violations = sum(1 for g in gaps if g > _ADJOINT_TOL)
        return DualInequalityReport(space=space.label, trials=trials, violations=violations,
                                    max_gap=max(gaps, default=0.0), index=index.upper, dual_index=dual_index.upper,
                                    holds=violations == 0 and dual_index.upper <= index.upper + _DUAL_SLACK,
                                    exactness=exactness & index.exactness & dual_index.exactness)
