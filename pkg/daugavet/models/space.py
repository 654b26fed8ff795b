import threading
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional, Union

import numpy as np

from daugavet.models.enums import Exactness, ScalarField, SumKind


@dataclass(frozen=True, eq=False)
class Lp:
    p: float
    dim: int


@dataclass(frozen=True, eq=False)
class Polyhedral:
    """Unit ball = convex hull of ``vertices`` (rows, closed under negation)."""

    vertices: np.ndarray


@dataclass(frozen=True, eq=False)
class Sum:
    kind: SumKind
    parts: tuple


@dataclass(frozen=True, eq=False)
class SupSubspace:
    """Column span of ``basis`` inside the sup-normed functions on ``nodes``; row r evaluates at node r."""

    nodes: tuple
    basis: np.ndarray


Descriptor = Union[Lp, Polyhedral, Sum, SupSubspace]


class NormedSpace:
    """An immutable finite-dimensional normed space.

    Derived data (dual space, facets, extreme families) is cached on the instance
    behind a re-entrant lock, so instances can be shared between worker threads.
    """

    def __init__(self, dim: int, field: ScalarField, descriptor: Descriptor):
        self.dim = dim
        self.field = field
        self.descriptor = descriptor
        self._cache: dict = {}
        self._lock = threading.RLock()

    def cached(self, key: str, factory: Callable[[], Any]) -> Any:
        if key in self._cache:
            return self._cache[key]
        with self._lock:
            if key not in self._cache:
                self._cache[key] = factory()
            return self._cache[key]

    def peek(self, key: str) -> Any:
        return self._cache.get(key)

    def seed_cache(self, key: str, value: Any) -> None:
        with self._lock:
            self._cache.setdefault(key, value)

    @property
    def is_complex(self) -> bool:
        return self.field is ScalarField.COMPLEX

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    @property
    def real_dim(self) -> int:
        return 2 * self.dim if self.is_complex else self.dim

    @property
    def kind(self) -> str:
        return {Lp: "lp", Polyhedral: "polyhedral", Sum: "sum", SupSubspace: "sup_subspace"}[type(self.descriptor)]

    @property
    def is_hilbert(self) -> bool:
        return isinstance(self.descriptor, Lp) and self.descriptor.p == 2

    @property
    def is_sum(self) -> bool:
        return isinstance(self.descriptor, Sum)

    @property
    def parts(self) -> tuple:
        return self.descriptor.parts if self.is_sum else ()

    @property
    def blocks(self) -> list:
        """Coordinate slices of the parts of a sum."""
        out, start = [], 0
        for part in self.parts:
            out.append(slice(start, start + part.dim))
            start += part.dim
        return out

    @property
    def label(self) -> str:
        d = self.descriptor
        prefix = "c" if self.is_complex else ""
        if isinstance(d, Lp):
            p = "inf" if np.isinf(d.p) else f"{d.p:g}"
            return f"{prefix}l{p}^{self.dim}"
        if isinstance(d, Polyhedral):
            return f"poly{len(d.vertices)}^{self.dim}"
        if isinstance(d, SupSubspace):
            return f"sup[{len(d.nodes)}]^{self.dim}"
        joiner = " (+)1 " if d.kind is SumKind.L1 else " (+)inf "
        return "(" + joiner.join(part.label for part in d.parts) + ")"

    def __repr__(self) -> str:
        return f"NormedSpace({self.label})"


@dataclass(frozen=True, eq=False)
class ExtremeFamily:
    """A piece of the extreme set of a unit ball, in full-space coordinates.

    ``points``: finitely many extreme points.
    ``curve``: the unit sphere of a smooth part of real dimension 2 sitting in ``block``.
    ``sphere``: the unit sphere of a higher-dimensional smooth part (sampled only).
    """

    kind: str
    ambient_dim: int
    points: Optional[np.ndarray] = None
    block: Optional[slice] = None
    part: Any = None

    @property
    def cost(self) -> float:
        if self.kind == "points":
            return float(len(self.points))
        if self.kind == "curve":
            return 300.0
        return float("inf")

    @property
    def exactness(self) -> Exactness:
        if self.kind == "curve":
            return Exactness.CONVERGED
        return Exactness.SAMPLED if self.kind == "sphere" else Exactness.EXACT


@dataclass(frozen=True)
class DualityPair:
    x: np.ndarray
    xstar: np.ndarray


@dataclass(frozen=True, eq=False)
class PairSet:
    """Normalized states (x, x*) with x*(x) = 1, stored row-wise."""

    xs: np.ndarray
    fs: np.ndarray
    exactness: Exactness

    def __len__(self) -> int:
        return len(self.xs)

    def __iter__(self) -> Iterator[DualityPair]:
        for x, f in zip(self.xs, self.fs):
            yield DualityPair(x, f)

    def values(self, matrix: np.ndarray) -> np.ndarray:
        """x*(Tx) for every pair, with the pairing sum(conj(f) * x)."""
        if len(self.xs) == 0:
            return np.zeros(0)
        return np.einsum("ki,ki->k", self.fs.conj(), self.xs @ np.asarray(matrix).T)


@dataclass(frozen=True, eq=False)
class Estimate:
    """A maximum with its provenance.

    ``witness`` is a maximising unit vector; when the maximum is over states,
    ``functional`` completes it to a state and ``element`` is the attained
    numerical-range value.
    """

    value: float
    exactness: Exactness
    witness: Optional[np.ndarray] = None
    functional: Optional[np.ndarray] = None
    element: Optional[complex] = None
    reduced_accuracy: bool = False
    note: str = ""

    @property
    def exact(self) -> bool:
        return self.exactness.is_exact
