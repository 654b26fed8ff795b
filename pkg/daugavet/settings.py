"""Runtime configuration.

Numeric defaults live in ``SETTINGS``; the environment (and an optional ``.env``
file in the working directory) can only override the worker thread count.
"""
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from dotenv import dotenv_values, load_dotenv

load_dotenv(dotenv_path=Path("./.env"), override=False)
ENVVARS = {**dotenv_values(".env"), **os.environ}


def _threads_from_env() -> int:
    raw = ENVVARS.get("DAUGAVET_THREADS")
    if raw is None or str(raw).strip() == "":
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Settings:
    tol_exact: float = 1e-9
    tol_sampled: float = 1e-6
    dedup_tol: float = 1e-12
    merge_tol: float = 1e-9
    default_budget: int = 64
    max_vertices: int = 20000
    max_enum_dim: int = 12
    circle_grid: int = 256
    theta_grid_start: int = 64
    theta_grid_cap: int = 2**16
    expm_accuracy_bound: float = 100.0
    rho_min: float = -10.0
    rho_max: float = 10.0
    rho_points: int = 201
    search_max_dim: int = 12
    pattern_shrinks: int = 40
    max_evals: int = 1500
    support_directions: int = 360
    threads: int = field(default_factory=_threads_from_env)

    def tolerance(self, certified: bool) -> float:
        return self.tol_exact if certified else self.tol_sampled

    @property
    def rho_grid(self) -> np.ndarray:
        return np.linspace(self.rho_min, self.rho_max, self.rho_points)


SETTINGS = Settings()
