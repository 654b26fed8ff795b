"""Deterministic sphere coverings and maximisation over curves and spheres."""
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

BatchFn = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=64)
def _halton_gaussians(real_dim: int, count: int) -> np.ndarray:
    sampler = qmc.Halton(d=real_dim, scramble=False)
    # the first Halton point is the origin, which the inverse CDF maps to -inf
    cube = sampler.random(count + 1)[1:]
    cube = np.clip(cube, 1e-12, 1 - 1e-12)
    return normal_dist.ppf(cube)


def sphere_directions(dim: int, count: int, complex_field: bool = False) -> np.ndarray:
    """``count`` deterministic unit vectors (Euclidean) from a low-discrepancy covering."""
    real_dim = 2 * dim if complex_field else dim
    g = _halton_gaussians(real_dim, count)
    if complex_field:
        g = g[:, :dim] + 1j * g[:, dim:]
    lengths = np.linalg.norm(g, axis=1)
    lengths[lengths == 0] = 1.0
    return g / lengths[:, None]


def circle_maximize(fn: BatchFn, grid: int, polish: int = 3, xatol: float = 1e-12) -> tuple:
    """Maximise a 2*pi-periodic function of theta: dense grid, then bounded Brent around the best peaks.

    ``fn`` maps an array of angles to values. Returns (value, theta).
    """
    thetas = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    values = np.asarray(fn(thetas), dtype=float)
    best_value, best_theta = float(np.max(values)), float(thetas[int(np.argmax(values))])
    h = 2 * np.pi / grid
    for idx in np.argsort(values)[::-1][:polish]:
        centre = thetas[idx]
        res = minimize_scalar(lambda t: -float(fn(np.array([t]))[0]), bounds=(centre - h, centre + h),
                              method="bounded", options={"xatol": xatol})
        if res.success and -res.fun > best_value:
            best_value, best_theta = float(-res.fun), float(res.x)
    return best_value, best_theta


def sphere_maximize(fn: BatchFn, dim: int, complex_field: bool, count: int, normalize: Callable,
                    polish: int = 3) -> tuple:
    """Sampled maximisation over a unit sphere: covering plus Nelder-Mead from the best samples.

    ``normalize`` maps raw vectors (rows) onto the sphere of the relevant norm.
    Returns (value, maximiser).
    """
    points = normalize(sphere_directions(dim, count, complex_field))
    values = np.asarray(fn(points), dtype=float)
    order = np.argsort(values)[::-1]
    best_value, best_point = float(values[order[0]]), points[order[0]]

    def unpack(z):
        return z[:dim] + 1j * z[dim:] if complex_field else z

    def objective(z):
        v = unpack(z)
        if not np.any(v):
            return np.inf
        return -float(fn(normalize(v[None, :]))[0])

    for idx in order[:polish]:
        start = points[idx]
        z0 = np.concatenate([start.real, start.imag]) if complex_field else start
        res = minimize(objective, z0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        if np.isfinite(res.fun) and -res.fun > best_value:
            best_value, best_point = float(-res.fun), normalize(unpack(res.x)[None, :])[0]
    return best_value, best_point
