from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import Exactness, LieMethod, Verdict
from daugavet.models.operator import Operator
from daugavet.models.reports import ClassificationReport, LieReport, SemigroupReport
from daugavet.models.space import Lp, NormedSpace, PairSet, Polyhedral, Sum, SupSubspace
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils.parallel_utils import parallel_map

_CHUNK_ROWS = 4096


def _verdict(ok: bool, exactness: Exactness) -> Verdict:
    """Sampled evidence can refute a property but never confirm it."""
    if not ok:
        return Verdict.NO
    return Verdict.YES if exactness.is_certified else Verdict.UNKNOWN


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    out = np.array(vectors)
    for k in range(out.shape[1]):
        col = out[:, k]
        nonzero = np.flatnonzero(np.abs(col) > 1e-12)
        if len(nonzero) and np.real(col[nonzero[0]]) < 0:
            out[:, k] = -col
    return out


def _chunked_null_space(rows_iter, width: int, tol: float) -> np.ndarray:
    """Null space of a tall system given in row chunks, reduced with QR to a square triangle first."""
    r = np.zeros((0, width))
    for chunk in rows_iter:
        stacked = np.vstack([r, chunk])
        if len(stacked) > width:
            r = scipy.linalg.qr(stacked, mode="r")[0][:width]
        else:
            r = stacked
    if len(r) == 0:
        return np.eye(width)
    return scipy.linalg.null_space(r, rcond=tol)


def _pair_rows(pairs: PairSet, complex_field: bool):
    """Rows of the real-linear map T -> Re x*(Tx), in chunks."""
    for start in range(0, len(pairs), _CHUNK_ROWS):
        xs = pairs.xs[start:start + _CHUNK_ROWS]
        fs = pairs.fs[start:start + _CHUNK_ROWS]
        c = np.einsum("ki,kj->kij", fs.conj(), xs).reshape(len(xs), -1)
        if complex_field:
            yield np.hstack([c.real, -c.imag])
        else:
            yield np.real(c)


class LieService:
    # ------------------------------------------------------------------ classification

    @staticmethod
    def is_skew_hermitian(space: NormedSpace, T, tol: Optional[float] = None,
                          budget: Optional[int] = None) -> Verdict:
        """Re V(T) = {0}; on real spaces the same as v(T) = 0."""
        tol = SETTINGS.tol_exact if tol is None else tol
        up = NumRangeService.sup_re(space, T, budget)
        down = NumRangeService.inf_re(space, T, budget)
        return _verdict(up.value <= tol and down.value >= -tol, up.exactness & down.exactness)

    @staticmethod
    def is_dissipative(space: NormedSpace, T, tol: Optional[float] = None,
                       budget: Optional[int] = None) -> Verdict:
        """Re V(T) <= 0, cross-checked with ||exp(rho T)|| <= 1 on the positive half of the rho grid."""
        tol = SETTINGS.tol_exact if tol is None else tol
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T)
        up = NumRangeService.sup_re(space, matrix, budget)
        exactness = up.exactness
        ok = up.value <= tol
        if ok:
            rhos = [r for r in SETTINGS.rho_grid if r > 0]
            norms = parallel_map(
                lambda r: OperatorService.op_norm_estimate(Operator.on(space, OperatorService.expm(matrix, r)),
                                                           budget), rhos)
            for est in norms:
                exactness = exactness & est.exactness
            ok = max(est.value for est in norms) <= 1 + tol
        return _verdict(ok, exactness)

    @staticmethod
    def is_hermitian(space: NormedSpace, T, tol: Optional[float] = None, budget: Optional[int] = None) -> Verdict:
        """V(T) is real, i.e. iT is skew-hermitian."""
        if not space.is_complex:
            raise CapabilityError("hermitian operators are defined on complex spaces")
        tol = SETTINGS.tol_exact if tol is None else tol
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T)
        samples = SpaceService.duality_pairs(space, budget).values(matrix)
        if len(samples) and np.max(np.abs(np.imag(samples))) > tol:
            return Verdict.NO
        return LieService.is_skew_hermitian(space, 1j * matrix, tol, budget)

    @staticmethod
    def classify(space: NormedSpace, T: Operator, tol: Optional[float] = None,
                 budget: Optional[int] = None) -> ClassificationReport:
        up = NumRangeService.sup_re(space, T, budget)
        down = NumRangeService.inf_re(space, T, budget)
        rad = NumRangeService.radius(space, T, budget)
        return ClassificationReport(
            space=space.label,
            skew_hermitian=LieService.is_skew_hermitian(space, T, tol, budget),
            dissipative=LieService.is_dissipative(space, T, tol, budget),
            hermitian=LieService.is_hermitian(space, T, tol, budget) if space.is_complex else None,
            sup_re=up.value,
            inf_re=down.value,
            radius=rad.value,
            exactness=up.exactness & down.exactness & rad.exactness,
        )

    # ------------------------------------------------------------------ semigroups

    @staticmethod
    def semigroup_verify(space: NormedSpace, T, rho_grid: Optional[Sequence[float]] = None,
                         tol: Optional[float] = None, budget: Optional[int] = None) -> SemigroupReport:
        """Largest deviation of ||exp(rho T)|| from 1 over the rho grid."""
        tol = SETTINGS.tol_exact if tol is None else tol
        matrix = T.matrix if isinstance(T, Operator) else np.asarray(T)
        rhos = list(SETTINGS.rho_grid if rho_grid is None else rho_grid)

        def drift(rho: float):
            expm, reduced = OperatorService.expm_with_accuracy(matrix, rho)
            est = OperatorService.op_norm_estimate(Operator.on(space, expm), budget)
            return abs(est.value - 1.0), est.exactness, reduced

        results = parallel_map(drift, rhos)
        exactness = Exactness.EXACT
        for _, e, _ in results:
            exactness = exactness & e
        drifts = np.array([d for d, _, _ in results])
        worst = int(np.argmax(drifts))
        return SemigroupReport(space=space.label, max_drift=float(drifts[worst]), worst_rho=float(rhos[worst]),
                               rho_count=len(rhos), isometric=_verdict(bool(drifts[worst] <= tol), exactness),
                               reduced_accuracy=any(r for _, _, r in results), exactness=exactness)

    # ------------------------------------------------------------------ Lie algebra

    @staticmethod
    def lie_algebra_basis(space: NormedSpace, tol: Optional[float] = None, method: LieMethod = LieMethod.AUTO,
                          budget: Optional[int] = None, verify: bool = True) -> LieReport:
        """Basis (Frobenius-orthonormal) of the operators generating groups of isometries."""
        tol = SETTINGS.tol_exact if tol is None else tol
        if method is LieMethod.PAIRS:
            basis, exactness, note = LieService._pairs_basis(space, tol, budget)
        else:
            basis, exactness, note = LieService._auto_basis(space, tol, budget)
        residuals = []
        if verify:
            for b in basis:
                report = LieService.semigroup_verify(space, b, tol=tol, budget=budget)
                residuals.append(report.max_drift)
                exactness = exactness & report.exactness
        return LieReport(space=space.label, dimension=len(basis), basis=basis, residuals=residuals,
                         method=method.value, note=note, exactness=exactness)

    @staticmethod
    def _pairs_basis(space: NormedSpace, tol: float, budget: Optional[int]) -> tuple:
        pairs = SpaceService.duality_pairs(space, budget)
        n = space.dim
        width = 2 * n * n if space.is_complex else n * n
        null = _sign_normalize(_chunked_null_space(_pair_rows(pairs, space.is_complex), width, tol))
        basis = []
        for k in range(null.shape[1]):
            v = null[:, k]
            m = v[:n * n] + 1j * v[n * n:] if space.is_complex else v
            basis.append(m.reshape(n, n))
        return basis, pairs.exactness, f"null space of {len(pairs)} states"

    @staticmethod
    def _auto_basis(space: NormedSpace, tol: float, budget: Optional[int]) -> tuple:
        view, perm = SpaceService.structural_view(space)
        if perm is not None:
            basis, exactness, note = LieService._auto_basis(view, tol, budget)
            out = []
            for b in basis:
                full = np.zeros_like(b)
                full[np.ix_(perm, perm)] = b
                out.append(full)
            return out, exactness, note
        d = space.descriptor
        n = space.dim
        if isinstance(d, Sum):
            basis, exactness, notes = [], Exactness.EXACT, []
            for part, block in zip(d.parts, space.blocks):
                part_basis, part_exactness, part_note = LieService._auto_basis(part, tol, budget)
                exactness = exactness & part_exactness
                notes.append(part_note)
                for b in part_basis:
                    full = np.zeros((n, n), dtype=space.dtype)
                    full[block, block] = b
                    basis.append(full)
            return basis, exactness, "block diagonal: " + "; ".join(notes)
        if isinstance(d, Lp):
            return LieService._lp_basis(space, d)
        return LieService._polytope_basis(space, tol)

    @staticmethod
    def _lp_basis(space: NormedSpace, d: Lp) -> tuple:
        n = space.dim
        if space.is_complex and (n == 1 or d.p == 2):
            return LieService._skew_hermitian_basis(n), Exactness.EXACT, "skew-hermitian matrices"
        if space.is_complex:
            raise CapabilityError(f"{space.label}: no exact Lie algebra computation for complex non-Hilbert atoms")
        if d.p == 2:
            return LieService._skew_symmetric_basis(n), Exactness.EXACT, "skew-symmetric matrices"
        if n == 1 or d.p in (1.0, float("inf")):
            return [], Exactness.EXACT, "finite isometry group"
        raise CapabilityError(f"{space.label}: smooth non-Hilbert norm, only sampled pairs are available")

    @staticmethod
    def _skew_symmetric_basis(n: int) -> List[np.ndarray]:
        basis = []
        for i in range(n):
            for j in range(i + 1, n):
                m = np.zeros((n, n))
                m[i, j], m[j, i] = 1 / np.sqrt(2), -1 / np.sqrt(2)
                basis.append(m)
        return basis

    @staticmethod
    def _skew_hermitian_basis(n: int) -> List[np.ndarray]:
        basis = []
        for i in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, i] = 1j
            basis.append(m)
        for i in range(n):
            for j in range(i + 1, n):
                real = np.zeros((n, n), dtype=complex)
                real[i, j], real[j, i] = 1 / np.sqrt(2), -1 / np.sqrt(2)
                imag = np.zeros((n, n), dtype=complex)
                imag[i, j] = imag[j, i] = 1j / np.sqrt(2)
                basis.extend([real, imag])
        return basis

    @staticmethod
    def _polytope_basis(space: NormedSpace, tol: float) -> tuple:
        if not isinstance(space.descriptor, (Polyhedral, SupSubspace)):
            raise CapabilityError(f"{space.label}: unsupported descriptor")
        pairs = SpaceService._exact_atom_pairs(space)
        if pairs is None:
            # the isometries of a polytope permute its vertices, so the group is finite
            return [], Exactness.EXACT, "finite isometry group of a polytope"
        n = space.dim
        null = _sign_normalize(_chunked_null_space(_pair_rows(pairs, False), n * n, tol))
        return [null[:, k].reshape(n, n) for k in range(null.shape[1])], Exactness.EXACT, \
            f"null space of {len(pairs)} extreme states"
