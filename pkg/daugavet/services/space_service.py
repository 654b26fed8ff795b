import itertools
from typing import Callable, Optional, Sequence

import numpy as np

from daugavet.exceptions import CapabilityError, ConstructionError, DimensionMismatchError
from daugavet.models.enums import Exactness, ScalarField, SumKind
from daugavet.models.reports import NormReport, PairsReport, SpaceReport
from daugavet.models.space import (
    Estimate,
    ExtremeFamily,
    Lp,
    NormedSpace,
    PairSet,
    Polyhedral,
    Sum,
    SupSubspace,
)
from daugavet.settings import SETTINGS
from daugavet.utils import polytope_utils as pu
from daugavet.utils.sphere_utils import circle_maximize, sphere_directions, sphere_maximize

_ACTIVE_TOL = 1e-9
_PAIR_TOL = 1e-9
_MAX_PAIR_ENTRIES = 4_000_000


def _sgn(z: np.ndarray) -> np.ndarray:
    a = np.abs(z)
    return np.divide(z, a, out=np.zeros_like(z), where=a > 0)


def _active(values: np.ndarray, top: np.ndarray) -> np.ndarray:
    return values >= top[:, None] - _ACTIVE_TOL * np.maximum(1.0, np.abs(top))[:, None]


def _parse_p(raw) -> float:
    if isinstance(raw, str):
        if raw.strip().lower() in ("inf", "infinity", "oo"):
            return float("inf")
        return float(raw)
    return float(raw)


class SpaceService:
    # ------------------------------------------------------------------ construction

    @staticmethod
    def lp(p, dim: int, field: ScalarField = ScalarField.REAL) -> NormedSpace:
        p = _parse_p(p)
        if not p >= 1:
            raise ConstructionError("Lp exponent p >= 1", f"got p={p}")
        if int(dim) < 1:
            raise ConstructionError("dimension is positive", f"got dim={dim}")
        return NormedSpace(int(dim), field, Lp(p, int(dim)))

    @staticmethod
    def polyhedral(vertices, canonical: bool = False) -> NormedSpace:
        """Real polyhedral space whose unit ball is the hull of +-vertices.

        Vertices are symmetrized, de-duplicated and stripped of hull-redundant
        points unless ``canonical`` says they already are.
        """
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.size == 0:
            raise ConstructionError("Polyhedral vertex list is nonempty")
        if np.iscomplexobj(vertices):
            raise ConstructionError("Polyhedral spaces are real")
        dim = v.shape[1]
        if np.linalg.matrix_rank(v) < dim:
            raise ConstructionError("Polyhedral vertices span the space", f"rank {np.linalg.matrix_rank(v)} < {dim}")
        if not canonical:
            v = pu.symmetrize(v, SETTINGS.dedup_tol)
            if dim > 1:
                v = pu.reduce_symmetric(v)
            else:
                v = np.array([[np.max(np.abs(v))], [-np.max(np.abs(v))]])
        v.setflags(write=False)
        return NormedSpace(dim, ScalarField.REAL, Polyhedral(v))

    @staticmethod
    def sup_subspace(nodes: Sequence, basis) -> NormedSpace:
        b = np.atleast_2d(np.asarray(basis, dtype=float))
        if b.ndim != 2 or b.shape[1] == 0:
            raise ConstructionError("SupSubspace basis has at least one column")
        if len(nodes) != b.shape[0]:
            raise ConstructionError("SupSubspace basis has one row per node", f"{len(nodes)} nodes, {b.shape[0]} rows")
        if np.linalg.matrix_rank(b) < b.shape[1]:
            raise ConstructionError("SupSubspace basis has full column rank")
        b.setflags(write=False)
        return NormedSpace(b.shape[1], ScalarField.REAL, SupSubspace(tuple(nodes), b))

    @staticmethod
    def direct_sum(kind: SumKind, parts: Sequence[NormedSpace]) -> NormedSpace:
        parts = tuple(parts)
        if not parts:
            raise ConstructionError("Sum has at least one part")
        fields = {p.field for p in parts}
        if len(fields) > 1:
            raise ConstructionError("Sum parts share the scalar field")
        return NormedSpace(sum(p.dim for p in parts), parts[0].field, Sum(kind, parts))

    @staticmethod
    def make_space(descriptor: dict, field: Optional[ScalarField] = None) -> NormedSpace:
        """Build a space from its JSON/YAML descriptor.

        Accepts ``{"field": ..., "descriptor": {...}}`` or a bare descriptor, in
        which case the field is inherited (sum parts) or defaults to real.
        """
        if not isinstance(descriptor, dict):
            raise ConstructionError("descriptor is a mapping", type(descriptor).__name__)
        if "descriptor" in descriptor:
            field = ScalarField(descriptor.get("field", (field or ScalarField.REAL).value))
            descriptor = descriptor["descriptor"]
        field = field or ScalarField.REAL
        if len(descriptor) != 1:
            raise ConstructionError("descriptor has exactly one kind", ", ".join(descriptor))
        (kind, body), = descriptor.items()
        try:
            if kind == "lp":
                return SpaceService.lp(body["p"], body["dim"], field)
            if kind in ("polyhedral", "sup_subspace") and field is ScalarField.COMPLEX:
                raise ConstructionError(f"{kind} spaces are real")
            if kind == "polyhedral":
                return SpaceService.polyhedral(body["vertices"])
            if kind == "sup_subspace":
                return SpaceService.sup_subspace(body["nodes"], body["basis"])
            if kind == "sum":
                parts = [SpaceService.make_space(part, field) for part in body["parts"]]
                return SpaceService.direct_sum(SumKind(body["kind"]), parts)
        except (KeyError, TypeError) as exc:
            raise ConstructionError("descriptor well-formed", f"{kind}: missing or invalid {exc}") from exc
        raise ConstructionError("descriptor kind is lp|polyhedral|sum|sup_subspace", kind)

    @staticmethod
    def describe(space: NormedSpace) -> dict:
        """Inverse of :meth:`make_space`."""
        d = space.descriptor
        if isinstance(d, Lp):
            body = {"lp": {"p": "inf" if np.isinf(d.p) else d.p, "dim": d.dim}}
        elif isinstance(d, Polyhedral):
            body = {"polyhedral": {"vertices": d.vertices.tolist()}}
        elif isinstance(d, SupSubspace):
            body = {"sup_subspace": {"nodes": list(d.nodes), "basis": d.basis.tolist()}}
        else:
            body = {"sum": {"kind": d.kind.value, "parts": [SpaceService.describe(p) for p in d.parts]}}
        return {"field": space.field.value, "descriptor": body}

    # ------------------------------------------------------------------ norms

    @staticmethod
    def check_vector(space: NormedSpace, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (space.dim,):
            raise DimensionMismatchError((space.dim,), x.shape)
        if not space.is_complex and np.iscomplexobj(x):
            if np.any(x.imag != 0):
                raise ConstructionError("vector entries belong to the scalar field")
            x = x.real
        return x.astype(space.dtype)

    @staticmethod
    def norm(space: NormedSpace, x) -> float:
        x = SpaceService.check_vector(space, x)
        if isinstance(space.descriptor, Polyhedral):
            return pu.minkowski_norm(space.descriptor.vertices, x)
        return float(SpaceService.norms(space, x[None, :])[0])

    @staticmethod
    def norms(space: NormedSpace, xs: np.ndarray) -> np.ndarray:
        """Row-wise norms of a batch of vectors."""
        xs = np.atleast_2d(xs)
        d = space.descriptor
        if isinstance(d, Lp):
            return np.linalg.norm(xs, ord=d.p, axis=1)
        if isinstance(d, SupSubspace):
            return np.max(np.abs(xs @ d.basis.T), axis=1)
        if isinstance(d, Polyhedral):
            facets = SpaceService.facets(space)
            if facets is not None:
                return np.maximum(np.max(xs @ facets.T, axis=1), 0.0)
            return np.array([pu.minkowski_norm(d.vertices, x) for x in xs])
        block_norms = np.stack([SpaceService.norms(p, xs[:, b]) for p, b in zip(d.parts, space.blocks)], axis=1)
        return block_norms.sum(axis=1) if d.kind is SumKind.L1 else block_norms.max(axis=1)

    @staticmethod
    def normalize(space: NormedSpace, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        n = SpaceService.norms(space, xs)
        n = np.where(n > 0, n, 1.0)
        return xs / n[:, None]

    @staticmethod
    def facets(space: NormedSpace) -> Optional[np.ndarray]:
        """Outer facet normals (= dual-ball vertices) of a Polyhedral ball, when enumerable."""
        d = space.descriptor
        if not isinstance(d, Polyhedral):
            return None

        def compute():
            if space.dim > SETTINGS.max_enum_dim:
                return None
            return pu.polar_vertices(d.vertices, SETTINGS.merge_tol)

        return space.cached("facets", compute)

    # ------------------------------------------------------------------ duality

    @staticmethod
    def dual_space(space: NormedSpace) -> NormedSpace:
        """A freshly computed dual space (no cached back-reference)."""
        return SpaceService._compute_dual(space, linked=False)

    @staticmethod
    def dual(space: NormedSpace) -> NormedSpace:
        """Cached dual whose own dual is ``space`` again."""
        return space.cached("dual", lambda: SpaceService._compute_dual(space, linked=True))

    @staticmethod
    def cheap_dual(space: NormedSpace) -> Optional[NormedSpace]:
        """The cached dual, unless building it needs a polar enumeration above the dimension cap."""
        known = space.peek("dual")
        if known is not None:
            return known
        d = space.descriptor
        if isinstance(d, Polyhedral) and space.dim > SETTINGS.max_enum_dim:
            return None
        if isinstance(d, Sum) and any(SpaceService.cheap_dual(p) is None for p in d.parts):
            return None
        return SpaceService.dual(space)

    @staticmethod
    def _compute_dual(space: NormedSpace, linked: bool) -> NormedSpace:
        d = space.descriptor
        if isinstance(d, Lp):
            if d.p == 1:
                q = float("inf")
            elif np.isinf(d.p):
                q = 1.0
            else:
                q = d.p / (d.p - 1)
            out = SpaceService.lp(q, d.dim, space.field)
        elif isinstance(d, Polyhedral):
            facets = SpaceService.facets(space) if linked else None
            if facets is None:
                facets = pu.polar_vertices(d.vertices, SETTINGS.merge_tol)
            out = SpaceService.polyhedral(facets, canonical=True)
            if linked:
                out.seed_cache("facets", d.vertices)
        elif isinstance(d, Sum):
            part_duals = [SpaceService.dual(p) if linked else SpaceService.dual_space(p) for p in d.parts]
            other = SumKind.LINF if d.kind is SumKind.L1 else SumKind.L1
            out = SpaceService.direct_sum(other, part_duals)
        else:
            out = SpaceService.polyhedral(SpaceService._sup_dual_vertices(space), canonical=True)
            if linked:
                ext = space.peek("extreme_points")
                if ext is not None:
                    out.seed_cache("facets", ext)
        if linked:
            out.seed_cache("dual", space)
        return out

    @staticmethod
    def _sup_dual_vertices(space: NormedSpace) -> np.ndarray:
        view, perm = SpaceService.structural_view(space)
        if perm is None:
            rows = pu.symmetrize(space.descriptor.basis, SETTINGS.dedup_tol)
            if space.dim == 1:
                r = float(np.max(np.abs(rows)))
                return np.array([[r], [-r]])
            return pu.reduce_symmetric(rows)
        pts = SpaceService.extreme_points(SpaceService.dual(view))
        return SpaceService._unpermute(pts, perm)

    # ------------------------------------------------------------------ structure

    @staticmethod
    def _unpermute(rows: np.ndarray, perm: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rows)
        out[:, perm] = rows
        return out

    @staticmethod
    def structural_view(space: NormedSpace) -> tuple:
        """Split sup-norm subspaces into their independent coordinate blocks.

        Returns ``(view, perm)`` where ``view`` is an equivalent space in which
        coordinate ``i`` is original coordinate ``perm[i]``; ``perm`` is None
        when nothing splits.
        """
        return space.cached("view", lambda: SpaceService._build_view(space))

    @staticmethod
    def _build_view(space: NormedSpace) -> tuple:
        d = space.descriptor
        if isinstance(d, Sum):
            views = [SpaceService.structural_view(p) for p in d.parts]
            if all(perm is None for _, perm in views):
                return space, None
            perm, offset = [], 0
            for part, (_, p) in zip(d.parts, views):
                perm.append(offset + (np.arange(part.dim) if p is None else p))
                offset += part.dim
            return SpaceService.direct_sum(d.kind, [v for v, _ in views]), np.concatenate(perm)
        if not isinstance(d, SupSubspace):
            return space, None
        comps = SpaceService._coordinate_components(d.basis)
        if len(comps) == 1:
            return space, None
        parts, perm, unit_coords = [], [], []
        for coords in comps:
            rows = np.flatnonzero(np.any(d.basis[:, coords] != 0, axis=1))
            sub = d.basis[np.ix_(rows, coords)]
            if len(coords) == 1 and np.all(np.abs(sub) == 1.0):
                unit_coords.append(coords[0])
                continue
            parts.append(SpaceService.sup_subspace(tuple(d.nodes[r] for r in rows), sub))
            perm.extend(coords)
        if unit_coords:
            parts.append(SpaceService.lp(float("inf"), len(unit_coords)))
            perm.extend(unit_coords)
        view = parts[0] if len(parts) == 1 else SpaceService.direct_sum(SumKind.LINF, parts)
        return view, np.asarray(perm, dtype=int)

    @staticmethod
    def _coordinate_components(basis: np.ndarray) -> list:
        """Connected components of coordinates linked by sharing a nonzero row."""
        dim = basis.shape[1]
        parent = list(range(dim))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for row in basis:
            support = np.flatnonzero(row)
            for j in support[1:]:
                a, b = find(support[0]), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict = {}
        for i in range(dim):
            groups.setdefault(find(i), []).append(i)
        return [groups[k] for k in sorted(groups)]

    # ------------------------------------------------------------------ extreme points

    @staticmethod
    def extreme_count(space: NormedSpace) -> float:
        d = space.descriptor
        if isinstance(d, Lp):
            if not space.is_complex and d.dim == 1:
                return 2.0
            if space.is_complex or d.p not in (1.0, float("inf")):
                return float("inf")
            return 2.0 * d.dim if d.p == 1 else 2.0 ** d.dim
        if isinstance(d, Polyhedral):
            return float(len(d.vertices))
        if isinstance(d, Sum):
            counts = [SpaceService.extreme_count(p) for p in d.parts]
            return float(sum(counts)) if d.kind is SumKind.L1 else float(np.prod(counts))
        view, perm = SpaceService.structural_view(space)
        if perm is not None:
            return SpaceService.extreme_count(view)
        if space.dim > SETTINGS.max_enum_dim:
            return float("inf")
        return float(len(SpaceService.extreme_points(space)))

    @staticmethod
    def extreme_points(space: NormedSpace) -> np.ndarray:
        """Exact extreme points of the unit ball of a real polytopal space."""
        return space.cached("extreme_points", lambda: SpaceService._extreme_points(space))

    @staticmethod
    def _extreme_points(space: NormedSpace) -> np.ndarray:
        d = space.descriptor
        if space.is_complex:
            raise CapabilityError(f"{space.label}: complex unit balls have no finite extreme set")
        if isinstance(d, Lp):
            if d.dim == 1:
                return np.array([[1.0], [-1.0]])
            if d.p == 1:
                eye = np.eye(d.dim)
                out = np.empty((2 * d.dim, d.dim))
                out[0::2], out[1::2] = eye, -eye
                return out
            if np.isinf(d.p):
                if 2**d.dim > SETTINGS.max_vertices:
                    raise CapabilityError(f"{space.label}: 2^{d.dim} vertices exceed the enumeration cap")
                return np.array(list(itertools.product([1.0, -1.0], repeat=d.dim)))
            raise CapabilityError(f"{space.label}: extreme points of a smooth ball are not finite")
        if isinstance(d, Polyhedral):
            return np.array(d.vertices)
        if isinstance(d, SupSubspace):
            view, perm = SpaceService.structural_view(space)
            if perm is not None:
                return SpaceService._unpermute(SpaceService.extreme_points(view), perm)
            if space.dim > SETTINGS.max_enum_dim:
                raise CapabilityError(f"{space.label}: dimension {space.dim} exceeds the vertex enumeration cap")
            pts = pu.halfspace_vertices(d.basis, SETTINGS.merge_tol)
            if len(pts) > SETTINGS.max_vertices:
                raise CapabilityError(f"{space.label}: {len(pts)} vertices exceed the enumeration cap")
            return pts
        if SpaceService.extreme_count(space) > SETTINGS.max_vertices:
            raise CapabilityError(f"{space.label}: extreme set exceeds the enumeration cap")
        part_pts = [SpaceService.extreme_points(p) for p in d.parts]
        if d.kind is SumKind.L1:
            rows = []
            for pts, block in zip(part_pts, space.blocks):
                padded = np.zeros((len(pts), space.dim))
                padded[:, block] = pts
                rows.append(padded)
            return np.vstack(rows)
        return np.array([np.concatenate(combo) for combo in itertools.product(*part_pts)])

    @staticmethod
    def extreme_families(space: NormedSpace, full: bool = False) -> Optional[list]:
        """Pieces of the extreme set sufficient to maximise scalar-invariant functions.

        With ``full`` false, complex extreme sets may be given up to unimodular
        multiples. Returns None when no affordable description exists.
        """
        key = f"families:{int(full)}"
        return space.cached(key, lambda: SpaceService._extreme_families(space, full))

    @staticmethod
    def _extreme_families(space: NormedSpace, full: bool) -> Optional[list]:
        d = space.descriptor
        n = space.dim
        if isinstance(d, Lp):
            if n == 1:
                if not space.is_complex:
                    return [ExtremeFamily("points", 1, points=np.array([[1.0], [-1.0]]))]
                if not full:
                    return [ExtremeFamily("points", 1, points=np.array([[1.0 + 0j]]))]
                return [ExtremeFamily("curve", 1, block=slice(0, 1), part=space)]
            if not space.is_complex and d.p in (1.0, float("inf")):
                if SpaceService.extreme_count(space) > SETTINGS.max_vertices:
                    return None
                return [ExtremeFamily("points", n, points=SpaceService.extreme_points(space))]
            if space.is_complex and d.p == 1:
                if not full:
                    return [ExtremeFamily("points", n, points=np.eye(n, dtype=complex))]
                unit = SpaceService.lp(2, 1, ScalarField.COMPLEX)
                return [ExtremeFamily("curve", n, block=slice(i, i + 1), part=unit) for i in range(n)]
            if space.is_complex and np.isinf(d.p):
                return None
            if space.real_dim == 2:
                return [ExtremeFamily("curve", n, block=slice(0, n), part=space)]
            return [ExtremeFamily("sphere", n, block=slice(0, n), part=space)]
        if isinstance(d, Polyhedral):
            return [ExtremeFamily("points", n, points=np.array(d.vertices))]
        if isinstance(d, SupSubspace):
            view, perm = SpaceService.structural_view(space)
            if perm is not None:
                fams = SpaceService.extreme_families(view, full)
                if fams is None:
                    return None
                if any(f.kind != "points" for f in fams):
                    return None
                return [ExtremeFamily("points", n, points=SpaceService._unpermute(f.points, perm)) for f in fams]
            if SpaceService.extreme_count(space) > SETTINGS.max_vertices:
                return None
            return [ExtremeFamily("points", n, points=SpaceService.extreme_points(space))]
        if d.kind is SumKind.L1:
            out = []
            for part, block in zip(d.parts, space.blocks):
                fams = SpaceService.extreme_families(part, full)
                if fams is None:
                    return None
                for f in fams:
                    out.append(SpaceService._inject_family(f, block, n))
            return out
        part_fams = [SpaceService.extreme_families(p, True) for p in d.parts]
        if any(f is None or len(f) != 1 or f[0].kind != "points" for f in part_fams):
            return None
        if np.prod([len(f[0].points) for f in part_fams], dtype=float) > SETTINGS.max_vertices:
            return None
        pts = np.array([np.concatenate(c) for c in itertools.product(*[f[0].points for f in part_fams])])
        return [ExtremeFamily("points", n, points=pts)]

    @staticmethod
    def _inject_family(family: ExtremeFamily, block: slice, dim: int) -> ExtremeFamily:
        if family.kind == "points":
            pts = np.zeros((len(family.points), dim), dtype=family.points.dtype)
            pts[:, block] = family.points
            return ExtremeFamily("points", dim, points=pts)
        inner = family.block
        shifted = slice(block.start + inner.start, block.start + inner.stop)
        return ExtremeFamily(family.kind, dim, block=shifted, part=family.part)

    @staticmethod
    def families_cost(families: Optional[list]) -> float:
        if families is None:
            return float("inf")
        return float(sum(f.cost for f in families))

    @staticmethod
    def maximize(space: NormedSpace, fn: Callable[[np.ndarray], np.ndarray], budget: Optional[int] = None,
                 full: bool = False) -> Estimate:
        """Maximise a batch function of unit vectors over the extreme set of the ball.

        ``fn`` must be invariant under the unimodular scalars when ``full`` is false.
        """
        families = SpaceService.extreme_families(space, full)
        if families is None:
            raise CapabilityError(f"{space.label}: no finite description of the extreme set")
        budget = budget or SETTINGS.default_budget
        best, witness, exactness = -np.inf, None, Exactness.EXACT
        for family in families:
            value, point = SpaceService._maximize_family(family, fn, budget, space.dtype)
            exactness = exactness & family.exactness
            if value > best:
                best, witness = value, point
        return Estimate(float(best), exactness, witness)

    @staticmethod
    def _maximize_family(family: ExtremeFamily, fn, budget: int, dtype) -> tuple:
        dim = family.ambient_dim
        if family.kind == "points":
            values = np.asarray(fn(family.points), dtype=float)
            i = int(np.argmax(values))
            return float(values[i]), family.points[i]
        part, block = family.part, family.block

        def embed(local: np.ndarray) -> np.ndarray:
            full_rows = np.zeros((len(local), dim), dtype=dtype)
            full_rows[:, block] = local
            return full_rows

        def normalize(local):
            return SpaceService.normalize(part, local)

        if family.kind == "curve":
            def on_angles(thetas):
                if part.is_complex:
                    local = np.exp(1j * thetas)[:, None]
                else:
                    local = normalize(np.stack([np.cos(thetas), np.sin(thetas)], axis=1))
                return fn(embed(local))

            value, theta = circle_maximize(on_angles, SETTINGS.circle_grid)
            if part.is_complex:
                local = np.array([[np.exp(1j * theta)]])
            else:
                local = normalize(np.array([[np.cos(theta), np.sin(theta)]]))
            return value, embed(local)[0]
        value, point = sphere_maximize(lambda local: fn(embed(local)), part.dim, part.is_complex,
                                       max(8 * budget, 512), normalize)
        return value, embed(point[None, :])[0]

    # ------------------------------------------------------------------ supporting functionals

    @staticmethod
    def supporting_functionals(space: NormedSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """For each row pair (x, y): a functional f in the dual ball with f(x) = ||x|| maximising Re f(y).

        Re f(y) is then the one-sided derivative of the norm at x in direction y.
        Zero rows of ``xs`` yield the zero functional.
        """
        xs, ys = np.atleast_2d(xs), np.atleast_2d(ys)
        d = space.descriptor
        if isinstance(d, Lp):
            return SpaceService._lp_support(d.p, xs, ys)
        if isinstance(d, SupSubspace):
            vx, vy = xs @ d.basis.T, ys @ d.basis.T
            ax = np.abs(vx)
            top = ax.max(axis=1)
            scores = np.where(_active(ax, top), np.sign(vx) * vy, -np.inf)
            r = np.argmax(scores, axis=1)
            rows = np.arange(len(xs))
            out = np.sign(vx[rows, r])[:, None] * d.basis[r]
            out[top == 0] = 0.0
            return out
        if isinstance(d, Polyhedral):
            facets = SpaceService.facets(space)
            if facets is None:
                return SpaceService._polyhedral_support_lp(space, xs, ys)
            sx, sy = xs @ facets.T, ys @ facets.T
            top = sx.max(axis=1)
            scores = np.where(_active(sx, top), sy, -np.inf)
            out = facets[np.argmax(scores, axis=1)].copy()
            out[top <= 0] = 0.0
            return out
        return SpaceService._sum_support(space, xs, ys)

    @staticmethod
    def _lp_support(p: float, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        ax = np.abs(xs)
        if p == 1:
            nx = ax.sum(axis=1)
            nonzero = ax > 1e-12 * np.maximum(nx, 1e-300)[:, None]
            out = np.where(nonzero, _sgn(xs), _sgn(ys))
        elif np.isinf(p):
            top = ax.max(axis=1)
            scores = np.where(_active(ax, top), np.real(np.conj(_sgn(xs)) * ys), -np.inf)
            idx = np.argmax(scores, axis=1)
            out = np.zeros_like(xs)
            rows = np.arange(len(xs))
            out[rows, idx] = _sgn(xs[rows, idx])
            nx = top
        else:
            nx = np.linalg.norm(xs, ord=p, axis=1)
            safe = np.where(nx > 0, nx, 1.0)
            out = _sgn(xs) * ax ** (p - 1) / safe[:, None] ** (p - 1)
        out = np.array(out)
        out[nx == 0] = 0
        return out

    @staticmethod
    def _polyhedral_support_lp(space: NormedSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        vertices = space.descriptor.vertices
        out = np.zeros_like(xs, dtype=float)
        for k, (x, y) in enumerate(zip(xs, ys)):
            nx = pu.minkowski_norm(vertices, x)
            if nx == 0:
                continue
            found = pu.face_lp_max(vertices, x / nx, y)
            if found is not None:
                out[k] = found[1]
        return out

    @staticmethod
    def _sum_support(space: NormedSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        d = space.descriptor
        out = np.zeros_like(xs, dtype=np.result_type(xs, ys))
        block_norms = np.stack([SpaceService.norms(p, xs[:, b]) for p, b in zip(d.parts, space.blocks)], axis=1)
        total = block_norms.sum(axis=1) if d.kind is SumKind.L1 else block_norms.max(axis=1)
        if d.kind is SumKind.L1:
            for j, (part, block) in enumerate(zip(d.parts, space.blocks)):
                nonzero = block_norms[:, j] > 1e-14 * np.maximum(total, 1e-300)
                anchor = np.where(nonzero[:, None], xs[:, block], ys[:, block])
                out[:, block] = SpaceService.supporting_functionals(part, anchor, ys[:, block])
            out[total == 0] = 0
            return out
        active = _active(block_norms, total)
        scores = np.full(block_norms.shape, -np.inf)
        candidates = []
        for j, (part, block) in enumerate(zip(d.parts, space.blocks)):
            f = SpaceService.supporting_functionals(part, xs[:, block], ys[:, block])
            candidates.append(f)
            scores[:, j] = np.where(active[:, j], np.real(np.sum(np.conj(f) * ys[:, block], axis=1)), -np.inf)
        choice = np.argmax(scores, axis=1)
        for j, block in enumerate(space.blocks):
            rows = choice == j
            out[np.ix_(rows, np.arange(block.start, block.stop))] = candidates[j][rows]
        out[total == 0] = 0
        return out

    @staticmethod
    def directional_derivatives(space: NormedSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """One-sided derivative of the norm at each (unit) x in direction y."""
        f = SpaceService.supporting_functionals(space, xs, ys)
        return np.real(np.sum(np.conj(f) * np.atleast_2d(ys), axis=1))

    @staticmethod
    def norming_functionals(space: NormedSpace, xs: np.ndarray) -> np.ndarray:
        """Unit functionals f with f(x) = ||x||, for each nonzero row x."""
        return SpaceService.supporting_functionals(space, xs, xs)

    # ------------------------------------------------------------------ duality pairs

    @staticmethod
    def duality_pairs(space: NormedSpace, budget: Optional[int] = None, points=None) -> PairSet:
        """States (x, x*) of the space: exact extreme pairs for polytopal spaces, sampled otherwise.

        ``points`` are extra caller-supplied vectors added to sampled modes.
        """
        budget = budget or SETTINGS.default_budget
        extra = None
        if points is not None and len(points):
            extra = np.atleast_2d(np.asarray(points, dtype=space.dtype))
            extra = extra[np.any(extra != 0, axis=1)]
        return SpaceService._pairs(space, budget, extra)

    @staticmethod
    def _pairs(space: NormedSpace, budget: int, extra: Optional[np.ndarray]) -> PairSet:
        d = space.descriptor
        if isinstance(d, SupSubspace):
            view, perm = SpaceService.structural_view(space)
            if perm is not None:
                inner = SpaceService._pairs(view, budget, None if extra is None else extra[:, perm])
                return PairSet(SpaceService._unpermute(inner.xs, perm), SpaceService._unpermute(inner.fs, perm),
                               inner.exactness)
        if isinstance(d, Sum):
            return SpaceService._sum_pairs(space, budget)
        exact = SpaceService._exact_atom_pairs(space)
        if exact is not None:
            return exact
        xs = SpaceService.normalize(space, sphere_directions(space.dim, budget, space.is_complex))
        if extra is not None and len(extra):
            xs = np.vstack([xs, SpaceService.normalize(space, extra)])
        if space.is_hilbert:
            return PairSet(xs, xs.copy(), Exactness.SAMPLED)
        if isinstance(d, (Polyhedral, SupSubspace)):
            return PairSet(xs, SpaceService.norming_functionals(space, xs), Exactness.SAMPLED)
        return PairSet(xs, SpaceService.norming_functionals(space, xs), Exactness.SAMPLED)

    @staticmethod
    def _exact_atom_pairs(space: NormedSpace) -> Optional[PairSet]:
        if space.is_complex:
            return None
        d = space.descriptor
        if isinstance(d, Lp) and d.p not in (1.0, float("inf")) and d.dim > 1:
            return None
        try:
            if SpaceService.extreme_count(space) > SETTINGS.max_vertices:
                return None
            ext = SpaceService.extreme_points(space)
            dual = SpaceService.dual(space)
            if SpaceService.extreme_count(dual) * len(ext) > _MAX_PAIR_ENTRIES:
                return None
            dual_ext = SpaceService.extreme_points(dual)
        except CapabilityError:
            return None
        incidence = ext @ dual_ext.T >= 1.0 - _PAIR_TOL
        i, j = np.nonzero(incidence)
        return PairSet(ext[i], dual_ext[j], Exactness.EXACT)

    @staticmethod
    def _slot_values(part: NormedSpace, budget: int, dual_side: bool) -> tuple:
        """Extreme points of a part (or of its dual), exact when finite, else a covering."""
        target = SpaceService.dual(part) if dual_side else part
        try:
            if not target.is_complex and SpaceService.extreme_count(target) <= SETTINGS.max_vertices:
                return SpaceService.extreme_points(target), Exactness.EXACT
        except CapabilityError:
            pass
        pts = SpaceService.normalize(target, sphere_directions(target.dim, budget, target.is_complex))
        return pts, Exactness.SAMPLED

    @staticmethod
    def _sum_pairs(space: NormedSpace, budget: int) -> PairSet:
        d = space.descriptor
        rng = np.random.default_rng(0)
        blocks = space.blocks
        part_pairs = [SpaceService._pairs(p, budget, None) for p in d.parts]
        free_side = d.kind is SumKind.L1
        slots = [SpaceService._slot_values(p, budget, dual_side=free_side) for p in d.parts]
        exactness = Exactness.EXACT
        for pairs, (_, slot_exactness) in zip(part_pairs, slots):
            exactness = exactness & pairs.exactness & slot_exactness
        total_pairs = sum(len(p) for p in part_pairs)
        cap = max(1, SETTINGS.max_vertices // max(1, total_pairs))
        xs_out, fs_out = [], []
        for i, pairs in enumerate(part_pairs):
            others = [j for j in range(len(d.parts)) if j != i]
            combos_total = int(np.prod([len(slots[j][0]) for j in others], dtype=float)) if others else 1
            if combos_total <= cap:
                combos = list(itertools.product(*[range(len(slots[j][0])) for j in others]))
            else:
                exactness = Exactness.SAMPLED
                combos = [tuple(int(rng.integers(len(slots[j][0]))) for j in others) for _ in range(cap)]
            for x_i, f_i in zip(pairs.xs, pairs.fs):
                for combo in combos:
                    x = np.zeros(space.dim, dtype=space.dtype)
                    f = np.zeros(space.dim, dtype=space.dtype)
                    if free_side:
                        x[blocks[i]], f[blocks[i]] = x_i, f_i
                        for j, k in zip(others, combo):
                            f[blocks[j]] = slots[j][0][k]
                    else:
                        x[blocks[i]], f[blocks[i]] = x_i, f_i
                        for j, k in zip(others, combo):
                            x[blocks[j]] = slots[j][0][k]
                    xs_out.append(x)
                    fs_out.append(f)
        return PairSet(np.array(xs_out), np.array(fs_out), exactness)

    # ------------------------------------------------------------------ reports

    @staticmethod
    def space_report(space: NormedSpace, dual: bool = False) -> SpaceReport:
        target = SpaceService.dual(space) if dual else space
        return SpaceReport(descriptor=SpaceService.describe(target), label=target.label, dim=target.dim,
                           field_name=target.field.value, extreme_count=SpaceService.extreme_count(target),
                           dual_label=space.label if dual else None)

    @staticmethod
    def extremes_report(space: NormedSpace) -> PairsReport:
        points = SpaceService.extreme_points(space)
        return PairsReport(space=space.label, count=len(points), xs=points, fs=np.zeros((len(points), 0)))

    @staticmethod
    def pairs_report(space: NormedSpace, budget: Optional[int] = None) -> PairsReport:
        pairs = SpaceService.duality_pairs(space, budget)
        return PairsReport(space=space.label, count=len(pairs), xs=pairs.xs, fs=pairs.fs, exactness=pairs.exactness)

    @staticmethod
    def norm_report(space: NormedSpace, x) -> NormReport:
        x = SpaceService.check_vector(space, x)
        return NormReport(space=space.label, vector=list(x), norm=SpaceService.norm(space, x))
