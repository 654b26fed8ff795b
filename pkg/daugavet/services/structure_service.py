from typing import Optional, Sequence

import numpy as np

from daugavet.exceptions import DimensionMismatchError, PreconditionError
from daugavet.models.enums import Exactness, ExtensionMode, SumKind
from daugavet.models.operator import Operator
from daugavet.models.reports import ContainmentReport, ExtensionReport
from daugavet.models.space import NormedSpace
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils import polytope_utils as pu
from daugavet.utils.sphere_utils import sphere_directions

_ISOMETRY_TOL = 1e-9


class StructureService:
    @staticmethod
    def l1_sum(parts: Sequence[NormedSpace]) -> NormedSpace:
        parts = list(parts)
        if len(parts) == 1:
            return parts[0]
        return SpaceService.direct_sum(SumKind.L1, parts)

    @staticmethod
    def linf_sum(parts: Sequence[NormedSpace]) -> NormedSpace:
        parts = list(parts)
        if len(parts) == 1:
            return parts[0]
        return SpaceService.direct_sum(SumKind.LINF, parts)

    @staticmethod
    def block(space: NormedSpace, index: int) -> slice:
        if not space.is_sum:
            if index != 0:
                raise DimensionMismatchError("part index 0", index)
            return slice(0, space.dim)
        blocks = space.blocks
        if not 0 <= index < len(blocks):
            raise DimensionMismatchError(f"part index below {len(blocks)}", index)
        return blocks[index]

    @staticmethod
    def inject(space: NormedSpace, index: int, y) -> np.ndarray:
        """Embed a vector of part ``index`` into the sum."""
        b = StructureService.block(space, index)
        y = np.asarray(y)
        if y.shape != (b.stop - b.start,):
            raise DimensionMismatchError((b.stop - b.start,), y.shape)
        out = np.zeros(space.dim, dtype=space.dtype)
        out[b] = y
        return out

    @staticmethod
    def project(space: NormedSpace, index: int, x) -> np.ndarray:
        x = SpaceService.check_vector(space, x)
        return x[StructureService.block(space, index)].copy()

    @staticmethod
    def extend_by_zero(S: Operator, Z: NormedSpace) -> Operator:
        """(y, z) -> (Sy, 0) on Y (+)_1 Z; same norm as S, numerical range inside [0, 1] V(S)."""
        space = SpaceService.direct_sum(SumKind.L1, [S.domain, Z])
        n = S.domain.dim
        matrix = np.zeros((space.dim, space.dim), dtype=space.dtype)
        matrix[:n, :n] = S.matrix
        return Operator.on(space, matrix, {"construction": "extend_by_zero", "summand": S.domain.label,
                                           "complement": Z.label})

    @staticmethod
    def extend_isometry(S: Operator, Z: NormedSpace, budget: Optional[int] = None) -> Operator:
        """(y, z) -> (Sy, z) on Y (+)_1 Z for an isometry S of Y; anything else is rejected with a witness."""
        witness = StructureService.isometry_witness(S, budget)
        if witness is not None:
            raise PreconditionError(f"operator is not an isometry of {S.domain.label}", witness)
        space = SpaceService.direct_sum(SumKind.L1, [S.domain, Z])
        n = S.domain.dim
        matrix = np.eye(space.dim, dtype=space.dtype)
        matrix[:n, :n] = S.matrix
        return Operator.on(space, matrix, {"construction": "extend_isometry", "summand": S.domain.label,
                                           "complement": Z.label})

    @staticmethod
    def isometry_witness(S: Operator, budget: Optional[int] = None) -> Optional[np.ndarray]:
        """A unit vector x with ||Sx|| != 1, or None when S preserves the norm.

        Standard basis vectors are tried first, then the norm of S and of its inverse.
        """
        space = S.domain
        eye = SpaceService.normalize(space, np.eye(space.dim, dtype=space.dtype))
        drift = np.abs(SpaceService.norms(space, eye @ S.matrix.T) - 1.0)
        if np.max(drift) > _ISOMETRY_TOL:
            return np.eye(space.dim, dtype=space.dtype)[int(np.argmax(drift))]
        upper = OperatorService.op_norm_estimate(S, budget)
        if upper.value > 1 + _ISOMETRY_TOL:
            return upper.witness
        u, s, vh = np.linalg.svd(S.matrix)
        if s[-1] <= 1e-12:
            return SpaceService.normalize(space, vh[-1].conj()[None, :])[0]
        inverse = Operator.on(space, np.linalg.inv(S.matrix))
        lower = OperatorService.op_norm_estimate(inverse, budget)
        if lower.value > 1 + _ISOMETRY_TOL:
            y = inverse.matrix @ lower.witness
            return SpaceService.normalize(space, y[None, :])[0]
        return None

    @staticmethod
    def sample_isometry(T: Operator, count: int = 1000, seed: int = 0) -> float:
        """Largest | ||Tx|| - ||x|| | over ``count`` random vectors."""
        rng = np.random.default_rng(seed)
        xs = rng.standard_normal((count, T.domain.dim))
        if T.domain.is_complex:
            xs = xs + 1j * rng.standard_normal((count, T.domain.dim))
        before = SpaceService.norms(T.domain, xs)
        after = SpaceService.norms(T.codomain, xs @ T.matrix.T)
        return float(np.max(np.abs(after - before)))

    @staticmethod
    def range_containment(S: Operator, Z: NormedSpace, budget: Optional[int] = None,
                          tol: float = 1e-8) -> ContainmentReport:
        """Support-function check that V(extend_by_zero(S)) lies in conv({0} u [0, 1] V(S))."""
        budget = budget or SETTINGS.default_budget
        T = StructureService.extend_by_zero(S, Z)
        directions = pu.unit_directions(SETTINGS.support_directions)
        sum_pairs = SpaceService.duality_pairs(T.domain, budget)
        inner = pu.support(sum_pairs.values(T.matrix), directions)
        part = S.domain
        if part.is_complex:
            part_pairs = SpaceService.duality_pairs(part, budget)
            points = list(part_pairs.values(S.matrix))
            extras = [NumRangeService.sup_re(part, np.conj(u) * S.matrix, budget).element
                      for u in sphere_directions(1, 16, True)[:, 0]]
            points += [z for z in extras if z is not None]
            exactness = Exactness.SAMPLED
        else:
            up = NumRangeService.sup_re(part, S, budget)
            down = NumRangeService.inf_re(part, S, budget)
            points = [up.value, down.value]
            exactness = up.exactness & down.exactness & sum_pairs.exactness
        outer = np.maximum(pu.support(points, directions), 0.0)
        violation = float(np.max(inner - outer))
        radius_sum = NumRangeService.radius(T.domain, T, budget)
        radius_part = NumRangeService.radius(part, S, budget)
        return ContainmentReport(holds=violation <= tol and radius_sum.value <= radius_part.value + SETTINGS.tol_exact,
                                 max_violation=max(violation, 0.0), radius_sum=radius_sum.value,
                                 radius_part=radius_part.value, directions=len(directions),
                                 exactness=exactness & radius_sum.exactness & radius_part.exactness)

    @staticmethod
    def extension_report(S: Operator, Z: NormedSpace, mode: ExtensionMode = ExtensionMode.ZERO,
                         budget: Optional[int] = None) -> ExtensionReport:
        if mode is ExtensionMode.ISOMETRY:
            T = StructureService.extend_isometry(S, Z, budget)
        else:
            T = StructureService.extend_by_zero(S, Z)
        whole = OperatorService.op_norm_estimate(T, budget)
        part = OperatorService.op_norm_estimate(S, budget)
        return ExtensionReport(mode=mode.value, operator=OperatorService.describe(T), construction=T.provenance,
                               op_norm=whole.value, part_norm=part.value, exactness=whole.exactness & part.exactness)
