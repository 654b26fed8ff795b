from typing import Optional

import numpy as np
import scipy.linalg

from daugavet.exceptions import ConstructionError, DimensionMismatchError
from daugavet.models.enums import Exactness
from daugavet.models.operator import Operator
from daugavet.models.reports import OperatorNormReport
from daugavet.models.space import Estimate, Lp, NormedSpace, SupSubspace
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils import polytope_utils as pu
from daugavet.utils.sphere_utils import sphere_maximize


def parse_matrix(rows) -> np.ndarray:
    """Matrix from nested lists; complex entries are written as [re, im] pairs."""
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ConstructionError("matrix is a nonempty list of rows")
    out = []
    is_complex = False
    for row in rows:
        parsed = []
        for entry in row:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ConstructionError("complex entries are [re, im] pairs", str(entry))
                parsed.append(complex(float(entry[0]), float(entry[1])))
                is_complex = True
            else:
                parsed.append(float(entry))
        out.append(parsed)
    if len({len(r) for r in out}) != 1:
        raise ConstructionError("matrix rows have equal length")
    return np.array(out, dtype=complex if is_complex else float)


def matrix_to_json(matrix: np.ndarray) -> list:
    if np.iscomplexobj(matrix):
        return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]
    return np.asarray(matrix, dtype=float).tolist()


class OperatorService:
    @staticmethod
    def make_operator(descriptor: dict, space: Optional[NormedSpace] = None) -> Operator:
        """Operator from ``{"matrix": [...], "space": <descriptor>}``; ``space`` wins over the embedded one."""
        if not isinstance(descriptor, dict) or "matrix" not in descriptor:
            raise ConstructionError("operator descriptor has a matrix")
        matrix = parse_matrix(descriptor["matrix"])
        if space is None:
            embedded = descriptor.get("space")
            if not isinstance(embedded, dict):
                raise ConstructionError("operator descriptor names its space")
            space = SpaceService.make_space(embedded)
        return Operator.on(space, matrix)

    @staticmethod
    def describe(T: Operator) -> dict:
        return {"matrix": matrix_to_json(T.matrix), "space": SpaceService.describe(T.domain)}

    @staticmethod
    def identity(space: NormedSpace) -> Operator:
        return Operator.on(space, np.eye(space.dim, dtype=space.dtype))

    @staticmethod
    def random(space: NormedSpace, rng: np.random.Generator) -> Operator:
        """Entries uniform on [-1, 1] (real and imaginary parts independently on complex spaces)."""
        shape = (space.dim, space.dim)
        m = rng.uniform(-1, 1, shape)
        if space.is_complex:
            m = m + 1j * rng.uniform(-1, 1, shape)
        return Operator.on(space, m)

    @staticmethod
    def view_matrix(matrix: np.ndarray, domain_perm, codomain_perm) -> np.ndarray:
        rows = slice(None) if codomain_perm is None else codomain_perm
        cols = slice(None) if domain_perm is None else domain_perm
        return np.asarray(matrix)[rows][:, cols]

    @staticmethod
    def op_norm(T: Operator) -> float:
        return OperatorService.op_norm_estimate(T).value

    @staticmethod
    def op_norm_estimate(T: Operator, budget: Optional[int] = None) -> Estimate:
        """Operator norm with provenance and a maximising unit vector.

        The maximum of ||Tx|| over the extreme set of the domain ball is taken
        either directly or through the adjoint on the dual side, whichever
        extreme description is smaller.
        """
        matrix = T.matrix
        if not np.any(matrix):
            return Estimate(0.0, Exactness.EXACT, np.zeros(T.domain.dim, dtype=T.domain.dtype))
        dom, cod = T.domain, T.codomain
        if dom.is_hilbert and cod.is_hilbert:
            _, s, vh = np.linalg.svd(matrix)
            return Estimate(float(s[0]), Exactness.EXACT, vh[0].conj())
        dview, dperm = SpaceService.structural_view(dom)
        cview, cperm = SpaceService.structural_view(cod)
        mv = OperatorService.view_matrix(matrix, dperm, cperm)
        special = OperatorService._norm_special(dview, cview, mv, budget)
        if special is not None:
            if dperm is not None and special.witness is not None:
                witness = SpaceService._unpermute(special.witness[None, :], dperm)[0]
                special = Estimate(special.value, special.exactness, witness, note=special.note)
            return special
        dual_dom, dual_cod = SpaceService.cheap_dual(dview), SpaceService.cheap_dual(cview)
        primal_cost = SpaceService.families_cost(SpaceService.extreme_families(dview))
        dual_cost = float("inf")
        if dual_dom is not None and dual_cod is not None:
            dual_cost = SpaceService.families_cost(SpaceService.extreme_families(dual_cod))
        if primal_cost == float("inf") and dual_cost == float("inf"):
            est = OperatorService._norm_without_extremes(dview, cview, mv, budget)
        elif primal_cost <= dual_cost:
            est = SpaceService.maximize(dview, lambda xs: SpaceService.norms(cview, xs @ mv.T), budget)
        else:
            est = SpaceService.maximize(dual_cod, lambda gs: SpaceService.norms(dual_dom, gs @ mv.conj()), budget)
            h = (est.witness @ mv.conj())[None, :]
            x = SpaceService.norming_functionals(dual_dom, h)[0]
            est = Estimate(est.value, est.exactness, x)
        if dperm is not None and est.witness is not None:
            est = Estimate(est.value, est.exactness, SpaceService._unpermute(est.witness[None, :], dperm)[0])
        return est

    @staticmethod
    def is_block_diagonal(space: NormedSpace, matrix: np.ndarray) -> bool:
        """True when ``matrix`` maps every part of the sum ``space`` into itself."""
        if not space.is_sum:
            return False
        mask = np.ones(matrix.shape, dtype=bool)
        for block in space.blocks:
            mask[block, block] = False
        return not np.any(matrix[mask])

    @staticmethod
    def _norm_special(dview: NormedSpace, cview: NormedSpace, mv: np.ndarray,
                      budget: Optional[int]) -> Optional[Estimate]:
        """Closed forms: block-diagonal operators on sums, and l1 / linf atoms."""
        if dview is cview and OperatorService.is_block_diagonal(dview, mv):
            best, exactness = None, Exactness.EXACT
            for part, block in zip(dview.parts, dview.blocks):
                est = OperatorService.op_norm_estimate(Operator.on(part, mv[block, block]), budget)
                exactness = exactness & est.exactness
                if best is None or est.value > best[0]:
                    best = (est.value, block, est.witness)
            witness = np.zeros(dview.dim, dtype=dview.dtype)
            witness[best[1]] = best[2]
            return Estimate(float(best[0]), exactness, witness, note="largest block")
        d, c = dview.descriptor, cview.descriptor
        if not (isinstance(d, Lp) and isinstance(c, Lp) and d.p == c.p and d.p in (1.0, float("inf"))):
            return None
        absolute = np.abs(mv)
        if d.p == 1:
            sums = absolute.sum(axis=0)
            j = int(np.argmax(sums))
            witness = np.zeros(dview.dim, dtype=dview.dtype)
            witness[j] = 1.0
        else:
            sums = absolute.sum(axis=1)
            j = int(np.argmax(sums))
            row = mv[j]
            witness = np.where(absolute[j] > 0, np.conj(row) / np.where(absolute[j] > 0, absolute[j], 1.0), 1.0)
            witness = witness.astype(dview.dtype)
        return Estimate(float(sums[j]), Exactness.EXACT, witness, note="closed form")

    @staticmethod
    def _norm_without_extremes(dview: NormedSpace, cview: NormedSpace, mv: np.ndarray,
                               budget: Optional[int]) -> Estimate:
        if isinstance(cview.descriptor, SupSubspace) and isinstance(dview.descriptor, SupSubspace):
            functionals = cview.descriptor.basis @ mv
            best, witness = -np.inf, None
            for row in functionals:
                value, x = pu.body_lp_max(dview.descriptor.basis, row)
                if value > best:
                    best, witness = value, x
            return Estimate(float(best), Exactness.EXACT, witness, note="face LP")
        budget = budget or SETTINGS.default_budget
        value, x = sphere_maximize(lambda xs: SpaceService.norms(cview, xs @ mv.T), dview.dim, dview.is_complex,
                                   max(8 * budget, 512), lambda xs: SpaceService.normalize(dview, xs))
        return Estimate(float(value), Exactness.SAMPLED, x, note="sampled with local ascent")

    @staticmethod
    def adjoint(T: Operator) -> Operator:
        """Conjugate transpose acting from the dual of the codomain to the dual of the domain."""
        return Operator(T.matrix.conj().T, SpaceService.dual(T.codomain), SpaceService.dual(T.domain),
                        T.provenance)

    @staticmethod
    def expm(T, rho: float = 1.0) -> np.ndarray:
        return OperatorService.expm_with_accuracy(T, rho)[0]

    @staticmethod
    def expm_with_accuracy(T, rho: float = 1.0) -> tuple:
        """exp(rho * T) by scaling and squaring (Pade kernel).

        The second item flags arguments with ||rho T||_1 above the accuracy bound.
        """
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError("square matrix", matrix.shape)
        scaled = rho * matrix
        reduced = bool(np.linalg.norm(scaled, 1) > SETTINGS.expm_accuracy_bound)
        result = scipy.linalg.expm(scaled)
        if not np.iscomplexobj(matrix):
            result = np.real(result)
        return result, reduced

    @staticmethod
    def norm_report(T: Operator, budget: Optional[int] = None, adjoint: bool = False) -> OperatorNormReport:
        est = OperatorService.op_norm_estimate(T, budget)
        exactness = est.exactness
        adjoint_norm = None
        if adjoint:
            star = OperatorService.op_norm_estimate(OperatorService.adjoint(T), budget)
            adjoint_norm, exactness = star.value, exactness & star.exactness
        return OperatorNormReport(space=T.domain.label, norm=est.value, witness=est.witness,
                                  adjoint_norm=adjoint_norm, exactness=exactness)
