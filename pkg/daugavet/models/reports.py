"""Report dataclasses returned by the services and serialised by the CLI."""
from dataclasses import dataclass, field, fields
from enum import Enum
from numbers import Number
from typing import Any, Dict, List, Optional

import numpy as np

from daugavet.models.enums import Exactness, Verdict


def _finite(x: float) -> Optional[float]:
    x = float(x)
    return x if np.isfinite(x) else None


def plain(value: Any) -> Any:
    """Convert numpy, complex and enum values into JSON-ready Python types; non-finite floats become None."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Report):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_finite(value.real), _finite(value.imag)]
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return _finite(value)
    return value


def _is_numeric(value: Any) -> bool:
    if isinstance(value, (bool, np.bool_)):
        return False
    if isinstance(value, (Number, np.number)):
        return True
    return isinstance(value, (list, tuple, np.ndarray)) and len(value) > 0 and all(_is_numeric(v) for v in value)


@dataclass
class Report:
    """Base of every report.

    ``exactness`` is the provenance of the report's numeric fields; a subclass
    overrides single fields through ``field_exactness``.
    """

    exactness: Exactness = field(default=Exactness.EXACT, kw_only=True)
    field_exactness: Dict[str, Exactness] = field(default_factory=dict, kw_only=True)

    def provenance(self) -> Dict[str, str]:
        out = {}
        for f in fields(self):
            if f.name in ("exactness", "field_exactness"):
                continue
            if _is_numeric(getattr(self, f.name)):
                out[f.name] = self.field_exactness.get(f.name, self.exactness).value
        return out

    def to_dict(self) -> Dict[str, Any]:
        body = {f.name: plain(getattr(self, f.name)) for f in fields(self)
                if f.name not in ("exactness", "field_exactness")}
        body["exact"] = self.exactness.is_exact
        body["provenance"] = self.provenance()
        return body

    def csv_rows(self) -> Optional[List[Dict[str, Any]]]:
        return None


@dataclass
class SpaceReport(Report):
    descriptor: dict
    label: str
    dim: int
    field_name: str
    extreme_count: float
    dual_label: Optional[str] = None


@dataclass
class NormReport(Report):
    space: str
    vector: list
    norm: float


@dataclass
class PairsReport(Report):
    space: str
    count: int
    xs: np.ndarray
    fs: np.ndarray

    def csv_rows(self):
        rows = []
        for x, f in zip(self.xs, self.fs):
            row = {f"x{i}": plain(v) for i, v in enumerate(x)}
            row.update({f"xstar{i}": plain(v) for i, v in enumerate(f)})
            rows.append(row)
        return rows


@dataclass
class OperatorNormReport(Report):
    space: str
    norm: float
    witness: Optional[np.ndarray] = None
    adjoint_norm: Optional[float] = None


@dataclass
class RangeSummary(Report):
    radius: float
    sup_re: float
    inf_re: float
    samples: List[complex]
    witness: Optional[np.ndarray] = None
    functional: Optional[np.ndarray] = None
    reduced_accuracy: bool = False

    @property
    def exact(self) -> bool:
        return self.exactness.is_exact

    def csv_rows(self):
        return [{"re": float(np.real(z)), "im": float(np.imag(z))} for z in self.samples]


@dataclass
class ExpFormulaReport(Report):
    lhs: float
    mid: float
    rhs: float
    rhs_grid_max: float
    mid_sequence: List[float]
    agree: bool


@dataclass
class DaugavetReport(Report):
    holds: bool
    lhs: float
    rhs: float
    sup_re: float
    op_norm: float
    range_criterion: bool
    consistent: bool
    degenerate: bool


@dataclass
class CircleInstance(Report):
    lam: complex
    equation_holds: bool
    target: float
    distance: float
    verified: bool


@dataclass
class CircleCheckReport(Report):
    op_norm: float
    instances: List[CircleInstance]
    counterexamples: int

    def csv_rows(self):
        return [{"lam_re": float(np.real(i.lam)), "lam_im": float(np.imag(i.lam)), "equation_holds": i.equation_holds,
                 "distance": i.distance, "verified": i.verified} for i in self.instances]


@dataclass
class LieReport(Report):
    space: str
    dimension: int
    basis: List[np.ndarray]
    residuals: List[float]
    method: str
    note: str = ""


@dataclass
class ClassificationReport(Report):
    space: str
    skew_hermitian: Verdict
    dissipative: Verdict
    hermitian: Optional[Verdict]
    sup_re: float
    inf_re: float
    radius: float


@dataclass
class SemigroupReport(Report):
    space: str
    max_drift: float
    worst_rho: float
    rho_count: int
    isometric: Verdict
    reduced_accuracy: bool = False


@dataclass
class ContainmentReport(Report):
    holds: bool
    max_violation: float
    radius_sum: float
    radius_part: float
    directions: int


@dataclass
class ExtensionReport(Report):
    mode: str
    operator: dict
    construction: dict
    op_norm: float
    part_norm: float


@dataclass
class IndexReport(Report):
    space: str
    upper: float
    estimate: float
    lower_bound: float
    witness: Optional[np.ndarray] = None
    candidates: int = 0
    evaluations: int = 0
    method: str = ""
    reference: Optional[float] = None


@dataclass
class DualInequalityReport(Report):
    space: str
    trials: int
    violations: int
    max_gap: float
    index: float
    dual_index: float
    holds: bool


@dataclass
class PolygonIndexRow(Report):
    name: str
    vertices: int
    index: float


@dataclass
class PolygonSearchReport(Report):
    rows: List[PolygonIndexRow]
    best_name: str
    best_index: float

    def csv_rows(self):
        return [{"name": r.name, "vertices": r.vertices, "index": r.index} for r in self.rows]


@dataclass
class GridReport(Report):
    m: int
    k: int
    cantor_nodes: int
    gap_nodes: int
    coverage: float


@dataclass
class BumpReport(Report):
    m: int
    interval: List[float]
    found: bool
    node: Optional[int] = None
    position: Optional[float] = None
    attempts: List[int] = field(default_factory=list)


@dataclass
class EmbedReport(Report):
    m: int
    kind: str
    dim: int
    max_error: float
    error_bound: float


@dataclass
class QuotientReport(Report):
    m: int
    max_error: float
    holds: bool


@dataclass
class GapFunctionalReport(Report):
    m: int
    gap_nodes: int
    min_norm: float
    max_norm: float
    witnessed: int
    extreme_fraction: float


@dataclass
class TrendRecord(Report):
    m: int
    kind: str
    dim_x: int
    nodes: int
    index_upper: float
    lie_dim_primal: int
    lie_dim_dual_model: int
    bump_coverage_fraction: float
    dual_rotation_drift: float
    daugavet_fraction: float


@dataclass
class TrendReport(Report):
    records: List[TrendRecord]
    assertions: Dict[str, bool]

    def csv_rows(self):
        keys = ("m", "kind", "dim_x", "nodes", "index_upper", "lie_dim_primal", "lie_dim_dual_model",
                "bump_coverage_fraction", "dual_rotation_drift", "daugavet_fraction")
        return [{k: plain(getattr(r, k)) for k in keys} for r in self.records]


@dataclass
class DualModelReport(Report):
    name: str
    space: str
    value: float
    reference: float
    holds: bool
    members: int = 0
    note: str = ""
