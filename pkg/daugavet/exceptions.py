from typing import Optional

import numpy as np


class DaugavetError(ValueError):
    """Base class of every error raised by the toolkit."""

    exit_code = 1
    kind = "error"


class ConstructionError(DaugavetError):
    """A space, operator or grid descriptor violates one of its invariants."""

    exit_code = 2
    kind = "construction"

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        message = f"{invariant}: {detail}" if detail else invariant
        super().__init__(message)


class DimensionMismatchError(DaugavetError):
    exit_code = 2
    kind = "dimension"

    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"expected shape {expected}, got {got}")


class CapabilityError(DaugavetError):
    """The requested computation is not available for this descriptor or mode."""

    exit_code = 3
    kind = "capability"


class PreconditionError(DaugavetError):
    """A precondition was refuted; ``witness`` holds the refuting vector when there is one."""

    exit_code = 4
    kind = "precondition"

    def __init__(self, message: str, witness: Optional[np.ndarray] = None):
        self.witness = witness
        super().__init__(message)


class CheckFailure(DaugavetError):
    exit_code = 4
    kind = "check"
