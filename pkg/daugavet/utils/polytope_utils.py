"""Centrally symmetric polytopes: canonical V-representations, polars and face LPs.

The double-description code path goes through pycddlib (exact rational
arithmetic for small inputs with simple coordinates); when ``cdd`` cannot be
imported or fails on an input, scipy's Qhull wrappers are used instead.
"""
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

try:
    import cdd

    HAVE_CDD = True
except ImportError:  # pragma: no cover - exercised only without pycddlib
    cdd = None
    HAVE_CDD = False

from scipy.spatial import ConvexHull, HalfspaceIntersection

_FRACTION_MAX_POINTS = 64
_FRACTION_MAX_DENOMINATOR = 1000


def dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    """Drop rows within ``tol`` (max-norm) of an earlier row, keeping the first occurrence."""
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return points
    kept = [points[0]]
    for p in points[1:]:
        if np.min(np.max(np.abs(np.asarray(kept) - p), axis=1)) > tol:
            kept.append(p)
    return np.asarray(kept)


def symmetrize(points: np.ndarray, tol: float) -> np.ndarray:
    """Rows of ``points`` and their negatives, de-duplicated, as (+v, -v) consecutive pairs."""
    points = np.asarray(points, dtype=float)
    half = []
    for p in points:
        if np.max(np.abs(p)) <= tol:
            continue
        if any(np.max(np.abs(q - p)) <= tol or np.max(np.abs(q + p)) <= tol for q in half):
            continue
        half.append(p)
    if not half:
        return np.zeros((0, points.shape[1] if points.ndim == 2 else 0))
    half = np.asarray(half)
    out = np.empty((2 * len(half), half.shape[1]))
    out[0::2] = half
    out[1::2] = -half
    return out


def in_hull(point: np.ndarray, others: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether ``point`` lies in the convex hull of the rows of ``others`` (feasibility LP)."""
    if len(others) == 0:
        return False
    k = len(others)
    a_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([point, [1.0]])
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    if res.status != 0:
        return False
    return bool(np.max(np.abs(a_eq @ res.x - b_eq)) <= tol)


def reduce_symmetric(points: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Remove (+v, -v) pairs that lie in the hull of the remaining points.

    ``points`` must come from :func:`symmetrize`.
    """
    half = list(points[0::2])
    i = 0
    while i < len(half):
        rest = [q for j, q in enumerate(half) if j != i]
        others = np.vstack(rest + [-q for q in rest]) if rest else np.zeros((0, points.shape[1]))
        if in_hull(half[i], others, tol):
            half.pop(i)
        else:
            i += 1
    half = np.asarray(half)
    out = np.empty((2 * len(half), points.shape[1]))
    out[0::2] = half
    out[1::2] = -half
    return out


def _as_fractions(points: np.ndarray) -> Optional[list]:
    """Exact rational rows when every coordinate is a simple fraction, else None."""
    if len(points) > _FRACTION_MAX_POINTS:
        return None
    rows = []
    for p in points:
        row = []
        for value in p:
            frac = Fraction(float(value)).limit_denominator(_FRACTION_MAX_DENOMINATOR)
            if abs(float(frac) - value) > 1e-13:
                return None
            row.append(frac)
        rows.append(row)
    return rows


def _cdd_matrix(rows, exact: bool, rep_type):
    matrix = cdd.Matrix(rows, number_type="fraction" if exact else "float")
    matrix.rep_type = rep_type
    return matrix


def _rows_to_array(cdd_rows) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in cdd_rows], dtype=float)


def polar_vertices(vertices: np.ndarray, merge_tol: float = 1e-9) -> np.ndarray:
    """Vertices of the polar {f : f.v <= 1 for all v} of a symmetric polytope given by vertices.

    Equivalently, the outer facet normals of conv(vertices), scaled to f.v = 1 on the facet.
    """
    vertices = np.asarray(vertices, dtype=float)
    dim = vertices.shape[1]
    if dim == 1:
        r = float(np.max(np.abs(vertices[:, 0])))
        return np.array([[1.0 / r], [-1.0 / r]])
    normals = None
    if HAVE_CDD:
        try:
            normals = _polar_cdd(vertices)
        except Exception:  # noqa: BLE001 - cdd raises plain RuntimeError on numerical trouble
            normals = None
    if normals is None:
        normals = _polar_qhull(vertices)
    return symmetrize(dedupe(normals, merge_tol), merge_tol)


def _polar_cdd(vertices: np.ndarray) -> np.ndarray:
    exact_rows = _as_fractions(vertices)
    exact = exact_rows is not None
    coords = exact_rows if exact else vertices.tolist()
    rows = [[1] + list(p) for p in coords]
    poly = cdd.Polyhedron(_cdd_matrix(rows, exact, cdd.RepType.GENERATOR))
    ineq = _rows_to_array(poly.get_inequalities())
    # rows are [b, -a] meaning a.x <= b; b > 0 since the origin is interior
    b, a = ineq[:, 0], -ineq[:, 1:]
    keep = b > 1e-12
    return a[keep] / b[keep, None]


def _polar_qhull(vertices: np.ndarray) -> np.ndarray:
    hull = ConvexHull(vertices)
    normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
    return normals / (-offsets)[:, None]


def halfspace_vertices(rows: np.ndarray, merge_tol: float = 1e-9) -> np.ndarray:
    """Vertices of {x : |r.x| <= 1 for every row r}, a bounded symmetric polytope."""
    rows = np.asarray(rows, dtype=float)
    dim = rows.shape[1]
    if dim == 1:
        r = float(np.max(np.abs(rows[:, 0])))
        return np.array([[1.0 / r], [-1.0 / r]])
    points = None
    if HAVE_CDD:
        try:
            points = _halfspace_cdd(rows)
        except Exception:  # noqa: BLE001
            points = None
    if points is None:
        points = _halfspace_qhull(rows)
    return symmetrize(dedupe(points, merge_tol), merge_tol)


def _halfspace_cdd(rows: np.ndarray) -> np.ndarray:
    exact_rows = _as_fractions(rows)
    exact = exact_rows is not None
    coords = exact_rows if exact else rows.tolist()
    ineqs = [[1] + [-v for v in r] for r in coords] + [[1] + list(r) for r in coords]
    poly = cdd.Polyhedron(_cdd_matrix(ineqs, exact, cdd.RepType.INEQUALITY))
    gen = _rows_to_array(poly.get_generators())
    if not np.all(gen[:, 0] == 1):
        raise ValueError("unbounded sup-norm ball")
    return gen[:, 1:]


def _halfspace_qhull(rows: np.ndarray) -> np.ndarray:
    dim = rows.shape[1]
    halfspaces = np.vstack([np.hstack([rows, -np.ones((len(rows), 1))]), np.hstack([-rows, -np.ones((len(rows), 1))])])
    hs = HalfspaceIntersection(halfspaces, np.zeros(dim))
    return hs.intersections


def minkowski_norm(vertices: np.ndarray, x: np.ndarray) -> float:
    """Gauge of conv(vertices) at x: min sum(lam) with lam >= 0 and vertices.T @ lam = x."""
    if not np.any(x):
        return 0.0
    k = len(vertices)
    res = linprog(np.ones(k), A_eq=vertices.T, b_eq=x, bounds=[(0, None)] * k, method="highs")
    if res.status != 0:
        raise ArithmeticError(f"gauge LP failed: {res.message}")
    return float(res.fun)


def face_lp_max(constraints: np.ndarray, anchor: np.ndarray, objective: np.ndarray) -> Optional[tuple]:
    """max objective.z subject to |constraints @ z| <= 1 and anchor.z = 1.

    Returns (value, z) or None when the face {anchor = 1} misses the body.
    """
    dim = constraints.shape[1]
    a_ub = np.vstack([constraints, -constraints])
    b_ub = np.ones(2 * len(constraints))
    res = linprog(-objective, A_ub=a_ub, b_ub=b_ub, A_eq=anchor[None, :], b_eq=[1.0],
                  bounds=[(None, None)] * dim, method="highs")
    if res.status != 0:
        return None
    return float(-res.fun), res.x


def body_lp_max(constraints: np.ndarray, objective: np.ndarray) -> tuple:
    """max objective.z over {|constraints @ z| <= 1}."""
    dim = constraints.shape[1]
    a_ub = np.vstack([constraints, -constraints])
    b_ub = np.ones(2 * len(constraints))
    res = linprog(-objective, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * dim, method="highs")
    if res.status != 0:
        raise ArithmeticError(f"support LP failed: {res.message}")
    return float(-res.fun), res.x


def support(points: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Support function of conv(points) in the plane, points given as complex numbers."""
    points = np.asarray(points, dtype=complex).ravel()
    if len(points) == 0:
        return np.full(len(directions), -np.inf)
    return np.max(np.real(np.conj(directions)[:, None] * points[None, :]), axis=1)


def unit_directions(count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def same_vertex_set(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    if a.shape != b.shape:
        return False
    for p in a:
        if np.min(np.max(np.abs(b - p), axis=1)) > tol:
            return False
    return True
