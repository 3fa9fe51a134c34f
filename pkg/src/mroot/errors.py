"""Exception hierarchy shared across the package."""


class MrootError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MrootError):
    """Operands disagree on the number of variables or sizes."""


class NotARootError(MrootError):
    """The supplied point does not satisfy the residual tolerance."""


class MaxDepthExceeded(MrootError):
    """Dual-space iteration did not stabilize before the depth limit.

    Usually means the point is not an isolated root at this depth, or
    the tolerances are inconsistent with the accuracy of the point.
    """


class SingularMatrixError(MrootError):
    """A matrix required to be invertible is numerically singular."""


class PivotSelectionError(MrootError):
    """Pivoting could not find enough independent columns at tolerance."""


class DegenerateInputError(MrootError):
    """The input has no admissible singular structure for the operation."""


class StageError(MrootError):
    """Failure inside a multi-stage pipeline, tagged with the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class ProblemParseError(MrootError):
    """Syntax or semantic error in a problem file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
