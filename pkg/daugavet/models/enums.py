from enum import Enum


class ScalarField(Enum):
    REAL = "real"
    COMPLEX = "complex"


class SumKind(Enum):
    L1 = "l1"
    LINF = "linf"


class Exactness(Enum):
    """Provenance of a numeric value.

    ``converged`` marks a maximum over a one-parameter curve of extreme points: a
    dense angle grid polished by bounded Brent steps to an angle tolerance of
    1e-12, so the value is accurate to solver precision without being a finite
    enumeration. A combination carries the weakest provenance of its inputs.
    """

    EXACT = "exact"
    CONVERGED = "converged"
    SAMPLED = "sampled"

    def __and__(self, other: "Exactness") -> "Exactness":
        return min(self, other, key=_STRENGTH.index)

    @property
    def is_exact(self) -> bool:
        return self is Exactness.EXACT

    @property
    def is_certified(self) -> bool:
        """Exact or converged: strong enough to confirm a property, not only to refute it."""
        return self is not Exactness.SAMPLED


_STRENGTH = (Exactness.SAMPLED, Exactness.CONVERGED, Exactness.EXACT)


class Verdict(Enum):
    """Three-valued answer; sampled certificates can refute but never confirm."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.YES if value else cls.NO


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


class EmbeddingKind(Enum):
    """Subspaces E of the sup-normed functions on the Cantor nodes."""

    L2_2 = "l2_2"
    CONSTANTS = "constants"
    FULL = "full"
    ZERO = "zero"


class ExtensionMode(Enum):
    ZERO = "zero"
    ISOMETRY = "isometry"


class LieMethod(Enum):
    AUTO = "auto"
    PAIRS = "pairs"
