from typing import Optional, Sequence

import numpy as np

from daugavet.exceptions import ConstructionError
from daugavet.models.cantor import CantorGrid, PLSpace
from daugavet.models.enums import EmbeddingKind
from daugavet.models.reports import BumpReport, EmbedReport, GapFunctionalReport, GridReport, QuotientReport
from daugavet.services.space_service import SpaceService
from daugavet.settings import SETTINGS
from daugavet.utils import polytope_utils as pu
from daugavet.utils.console import log_task


def _no_ternary_one(a: int, digits: int) -> bool:
    for _ in range(digits):
        if a % 3 == 1:
            return False
        a //= 3
    return True


class CantorService:
    @staticmethod
    def cantor_grid(k: int, m: int) -> CantorGrid:
        """Classify the nodes i/m against the closed level-k Cantor set."""
        if k < 0:
            raise ConstructionError("Cantor level is nonnegative", f"k={k}")
        if m <= 0 or m % 3**k:
            raise ConstructionError("grid size is a positive multiple of 3^k", f"m={m}, k={k}")
        q = m // 3**k
        mask = np.zeros(m + 1, dtype=bool)
        for i in range(m + 1):
            a0 = i // q
            left = a0 < 3**k and _no_ternary_one(a0, k)
            right = i % q == 0 and a0 >= 1 and _no_ternary_one(a0 - 1, k)
            mask[i] = left or right
        mask.setflags(write=False)
        return CantorGrid(k, m, mask)

    @staticmethod
    def grid_report(grid: CantorGrid) -> GridReport:
        return GridReport(m=grid.m, k=grid.level, cantor_nodes=len(grid.cantor_nodes), gap_nodes=len(grid.gap_nodes),
                          coverage=grid.coverage)

    # ------------------------------------------------------------------ E and X(E)

    @staticmethod
    def embed_l2_in_sup(count: int) -> np.ndarray:
        """Rows (cos t_i, sin t_i), t_i = i*pi/count: a sup-norm copy of the Euclidean plane up to (pi / 2count)^2."""
        if count < 3:
            raise ConstructionError("the Euclidean embedding needs at least 3 nodes", f"got {count}")
        thetas = np.pi * np.arange(count) / count
        return np.stack([np.cos(thetas), np.sin(thetas)], axis=1)

    @staticmethod
    def embedding_error_bound(count: int) -> float:
        return float((np.pi / (2 * count)) ** 2)

    @staticmethod
    def embed_report(count: int, directions: int = 720) -> EmbedReport:
        basis = CantorService.embed_l2_in_sup(count)
        angles = 2 * np.pi * np.arange(directions) / directions
        units = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        sup = np.max(np.abs(units @ basis.T), axis=1)
        return EmbedReport(m=count, kind=EmbeddingKind.L2_2.value, dim=2, max_error=float(np.max(1 - sup)),
                           error_bound=CantorService.embedding_error_bound(count))

    @staticmethod
    def e_basis(kind: EmbeddingKind, count: int) -> np.ndarray:
        if kind is EmbeddingKind.L2_2:
            return CantorService.embed_l2_in_sup(count)
        if kind is EmbeddingKind.CONSTANTS:
            return np.ones((count, 1))
        if kind is EmbeddingKind.FULL:
            return np.eye(count)
        return np.zeros((count, 0))

    @staticmethod
    def build_XE(grid: CantorGrid, e_basis) -> PLSpace:
        """Piecewise-linear functions whose restriction to the Cantor nodes lies in span(e_basis)."""
        e_basis = np.atleast_2d(np.asarray(e_basis, dtype=float))
        if e_basis.size == 0:
            e_basis = np.zeros((len(grid.cantor_nodes), 0))
        if e_basis.shape[0] != len(grid.cantor_nodes):
            raise ConstructionError("E basis has one row per Cantor node",
                                    f"{e_basis.shape[0]} rows, {len(grid.cantor_nodes)} nodes")
        if e_basis.shape[1] and np.linalg.matrix_rank(e_basis) < e_basis.shape[1]:
            raise ConstructionError("E basis has full column rank")
        dim_e, gaps = e_basis.shape[1], len(grid.gap_nodes)
        rows = np.zeros((grid.size, dim_e + gaps))
        rows[grid.cantor_nodes, :dim_e] = e_basis
        rows[grid.gap_nodes, dim_e + np.arange(gaps)] = 1.0
        keep = np.any(rows != 0, axis=1)
        if not np.any(keep):
            raise ConstructionError("X(E) is nonzero", "E = {0} on a grid without gap nodes")
        nodes = tuple(float(t) for t in grid.positions[keep])
        space = SpaceService.sup_subspace(nodes, rows[keep])
        return PLSpace(grid, e_basis, space)

    @staticmethod
    def build_kind(k: int, m: int, kind: EmbeddingKind) -> PLSpace:
        grid = CantorService.cantor_grid(k, m)
        return CantorService.build_XE(grid, CantorService.e_basis(kind, len(grid.cantor_nodes)))

    @staticmethod
    def linf_form(xe: PLSpace) -> tuple:
        """X(E) in its own coordinates as E_disc (+)inf linf^gaps, with the coordinate permutation."""
        return SpaceService.structural_view(xe.space)

    # ------------------------------------------------------------------ bumps

    @staticmethod
    def urysohn_bump(xe: PLSpace, interval: Sequence[float]) -> Optional[np.ndarray]:
        """Hat function at a gap node whose two grid neighbours lie strictly inside the interval.

        Picks the eligible node closest to the interval's midpoint (smaller index on ties);
        None when no node is eligible at this resolution.
        """
        lo, hi = float(interval[0]), float(interval[1])
        grid = xe.grid
        mid = (lo + hi) / 2
        eligible = [i for i in grid.gap_nodes if (i - 1) / grid.m > lo and (i + 1) / grid.m < hi]
        if not eligible:
            return None
        node = min(eligible, key=lambda i: (abs(i / grid.m - mid), i))
        coords = np.zeros(xe.dim)
        coords[xe.dim_e + int(np.searchsorted(grid.gap_nodes, node))] = 1.0
        return coords

    @staticmethod
    def bump_node(xe: PLSpace, bump: np.ndarray) -> int:
        return int(xe.grid.gap_nodes[int(np.argmax(bump[xe.dim_e:]))])

    @staticmethod
    def bump_report(xe: PLSpace, interval: Sequence[float]) -> BumpReport:
        bump = CantorService.urysohn_bump(xe, interval)
        if bump is None:
            return BumpReport(m=xe.grid.m, interval=list(interval), found=False, attempts=[xe.grid.m])
        node = CantorService.bump_node(xe, bump)
        return BumpReport(m=xe.grid.m, interval=list(interval), found=True, node=node, position=node / xe.grid.m,
                          attempts=[xe.grid.m])

    @staticmethod
    def refine_bump(k: int, m: int, interval: Sequence[float], kind: EmbeddingKind = EmbeddingKind.CONSTANTS,
                    max_m: int = 3**9, verbose: bool = False) -> BumpReport:
        """Triple the resolution until the interval admits a bump."""
        attempts = []
        while m <= max_m:
            attempts.append(m)
            xe = CantorService.build_kind(k, m, kind)
            report = CantorService.bump_report(xe, interval)
            log_task(f"bump search at m={m}: {'found' if report.found else 'none'}", verbose)
            if report.found:
                report.attempts = attempts
                return report
            m *= 3
        return BumpReport(m=attempts[-1] if attempts else m, interval=list(interval), found=False, attempts=attempts)

    # ------------------------------------------------------------------ quotient map

    @staticmethod
    def affine_extension(xe: PLSpace, coeffs) -> np.ndarray:
        """X(E) coordinates of the piecewise-linear interpolation across gap runs of g = E coeffs."""
        coeffs = np.asarray(coeffs, dtype=float)
        grid = xe.grid
        values = np.zeros(grid.size)
        values[grid.cantor_nodes] = xe.e_basis @ coeffs if xe.dim_e else 0.0
        for first, last in grid.gap_runs:
            left, right = first - 1, last + 1
            idx = np.arange(first, last + 1)
            weight = (idx - left) / (right - left)
            values[idx] = (1 - weight) * values[left] + weight * values[right]
        return np.concatenate([coeffs, values[grid.gap_nodes]])

    @staticmethod
    def quotient_isometry_check(xe: PLSpace, samples: Optional[Sequence] = None, tol: float = 1e-10,
                                count: int = 64, seed: int = 0) -> QuotientReport:
        """The restriction map carries the open unit ball of X(E) onto the open unit ball of E.

        Every sample g (E-coefficients, sup norm below 1) gets a preimage of equal norm by affine
        extension, and random unit vectors of X(E) restrict into the unit ball of E.
        """
        rng = np.random.default_rng(seed)
        if samples is None:
            samples = []
            for _ in range(count):
                c = rng.standard_normal(xe.dim_e)
                size = np.max(np.abs(xe.e_basis @ c)) if xe.dim_e else 0.0
                samples.append(c * (rng.uniform(0, 0.999) / size) if size > 0 else c)
        worst = 0.0
        for c in samples:
            c = np.asarray(c, dtype=float).reshape(xe.dim_e)
            g_norm = float(np.max(np.abs(xe.e_basis @ c))) if xe.dim_e else 0.0
            f = CantorService.affine_extension(xe, c)
            worst = max(worst, abs(SpaceService.norm(xe.space, f) - g_norm))
            if not np.array_equal(xe.restrict(f), c):
                worst = max(worst, np.inf)
        xs = SpaceService.normalize(xe.space, rng.standard_normal((count, xe.dim)))
        if xe.dim_e:
            restricted = np.max(np.abs(xs[:, : xe.dim_e] @ xe.e_basis.T), axis=1)
            worst = max(worst, float(np.max(restricted - 1.0)))
        return QuotientReport(m=xe.grid.m, max_error=float(worst), holds=worst <= tol)

    # ------------------------------------------------------------------ evaluation functionals

    @staticmethod
    def evaluation_norm(xe: PLSpace, node: int) -> float:
        """Norm of the evaluation at grid node ``node`` restricted to X(E)."""
        row = xe.node_rows[node]
        if not np.any(row):
            return 0.0
        value, _ = pu.body_lp_max(xe.space.descriptor.basis, row)
        return value

    @staticmethod
    def gap_functional_norms(xe: PLSpace, tol: Optional[float] = None) -> GapFunctionalReport:
        """Norms of the gap-node evaluations (sup-norm bound against the LP value, bump lower bound),
        and the share of grid nodes whose evaluation is extreme in the dual ball."""
        tol = SETTINGS.tol_exact if tol is None else tol
        grid = xe.grid
        norms, witnessed = [], 0
        for j, node in enumerate(grid.gap_nodes):
            bump = np.zeros(xe.dim)
            bump[xe.dim_e + j] = 1.0
            lower = 1.0 / SpaceService.norm(xe.space, bump)
            upper = CantorService.evaluation_norm(xe, int(node))
            witnessed += abs(upper - lower) <= tol
            norms.append(upper)
        extreme = len(grid.gap_nodes) + CantorService._extreme_cantor_rows(xe)
        return GapFunctionalReport(m=grid.m, gap_nodes=len(grid.gap_nodes), min_norm=min(norms, default=0.0),
                                   max_norm=max(norms, default=0.0), witnessed=int(witnessed),
                                   extreme_fraction=extreme / grid.size)

    @staticmethod
    def _extreme_cantor_rows(xe: PLSpace) -> int:
        """Cantor nodes whose evaluation is an extreme point of conv(+-rows); only E coordinates matter."""
        if not xe.dim_e:
            return 0
        rows = xe.e_basis
        unique = pu.dedupe(pu.symmetrize(rows, SETTINGS.dedup_tol), SETTINGS.dedup_tol)
        count = 0
        for row in rows:
            if not np.any(row):
                continue
            others = unique[np.max(np.abs(unique - row), axis=1) > SETTINGS.dedup_tol]
            if len(others) == 0 or not pu.in_hull(row, others):
                count += 1
        return count
