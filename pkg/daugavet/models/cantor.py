from dataclasses import dataclass
from functools import cached_property

import numpy as np

from daugavet.models.space import NormedSpace


@dataclass(frozen=True, eq=False)
class CantorGrid:
    """Nodes i/m, 0 <= i <= m, split by membership in the level-``level`` Cantor set (closed intervals)."""

    level: int
    m: int
    cantor_mask: np.ndarray

    @property
    def size(self) -> int:
        return self.m + 1

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m

    @cached_property
    def cantor_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.cantor_mask)

    @cached_property
    def gap_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.cantor_mask)

    @cached_property
    def gap_runs(self) -> list:
        """Maximal runs of consecutive gap nodes as (first, last) node indices."""
        runs, start = [], None
        for i in range(self.size):
            if not self.cantor_mask[i] and start is None:
                start = i
            if self.cantor_mask[i] and start is not None:
                runs.append((start, i - 1))
                start = None
        return runs

    @property
    def coverage(self) -> float:
        """Share of grid nodes that can carry a bump (gap nodes)."""
        return len(self.gap_nodes) / self.size


@dataclass(frozen=True, eq=False)
class PLSpace:
    """Piecewise-linear functions on the grid whose Cantor-node values lie in span(``e_basis``).

    Coordinates are the E-coefficients followed by the values at the gap nodes.
    """

    grid: CantorGrid
    e_basis: np.ndarray
    space: NormedSpace

    @property
    def dim_e(self) -> int:
        return self.e_basis.shape[1]

    @property
    def dim(self) -> int:
        return self.space.dim

    @cached_property
    def node_rows(self) -> np.ndarray:
        """Evaluation functionals of all grid nodes, zero rows included, in X(E) coordinates."""
        rows = np.zeros((self.grid.size, self.dim))
        rows[self.grid.cantor_nodes, : self.dim_e] = self.e_basis
        rows[self.grid.gap_nodes, self.dim_e + np.arange(len(self.grid.gap_nodes))] = 1.0
        return rows

    def node_values(self, coords: np.ndarray) -> np.ndarray:
        """Values at all grid nodes of the function with coordinates ``coords``."""
        return self.node_rows @ np.asarray(coords)

    def restrict(self, coords: np.ndarray) -> np.ndarray:
        """The restriction map onto E, in E-coefficients."""
        return np.asarray(coords)[: self.dim_e]
