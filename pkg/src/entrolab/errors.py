"""Exception taxonomy shared across the package.

Every error that a caller is expected to catch and react to has its own class;
plain precondition breaches (wrong argument types, out-of-range parameters not
tied to a named contract) raise ValueError.
"""

from __future__ import annotations


class EntrolabError(Exception):
    """Base class for all package-specific errors."""


# -- metric space validation ------------------------------------------------


class EmptySpace(EntrolabError):
    """Distance matrix has no points."""


class MetricAsymmetric(EntrolabError):
    def __init__(self, i: int, j: int, dij: float, dji: float):
        self.coords = (i, j)
        super().__init__(
            f"distance matrix asymmetric at ({i},{j}): {dij!r} vs {dji!r}"
        )


class TriangleViolation(EntrolabError):
    def __init__(self, i: int, j: int, k: int, lhs: float, rhs: float):
        self.coords = (i, j, k)
        super().__init__(
            f"triangle inequality violated: d[{i}][{k}]={lhs!r} > "
            f"d[{i}][{j}]+d[{j}][{k}]={rhs!r}"
        )


class InvalidHorizon(EntrolabError):
    """Refinement horizon n must be >= 1 (the n=0 maximum is over an empty set)."""


# -- covers ------------------------------------------------------------------


class SpaceMismatch(EntrolabError):
    """Two covers (or a cover and a map) refer to different underlying spaces."""


class IncompleteCover(EntrolabError):
    """Union of the pieces does not reach every point."""


class ExactBudgetExceeded(EntrolabError):
    """Exact branch-and-bound ran out of its node budget.

    Carries the best bound found so far so callers can fall back to it.
    """

    def __init__(self, best: int, nodes: int):
        self.best = best
        self.nodes = nodes
        super().__init__(f"exact search exceeded node budget ({nodes} nodes); best bound {best}")


class PieceBudgetExceeded(EntrolabError):
    """Dynamical refinement produced more pieces than the configured cap."""

    def __init__(self, pieces: int, cap: int):
        self.pieces = pieces
        self.cap = cap
        super().__init__(f"refined cover exceeded piece budget: {pieces} > {cap}")


# -- order kernel ------------------------------------------------------------


class SignatureMismatch(EntrolabError):
    """Two maps do not share the domain/codomain required by the operation."""


class CodomainMismatch(EntrolabError):
    """Comma construction requires maps into the same codomain."""


class AdjointMissing(EntrolabError):
    """The functor has no post-right adjoint, so the check is vacuous."""


class PreconditionFailed(EntrolabError):
    """One or more entanglement edges failed their side conditions."""

    def __init__(self, edges: list):
        self.edges = list(edges)
        super().__init__(f"edge preconditions failed: {self.edges}")


# -- complexity --------------------------------------------------------------


class EmptySubset(EntrolabError):
    """Span/separation of the empty subset is undefined."""


class WindowEmpty(EntrolabError):
    """Log-limit window selects no entries."""


class InsufficientGrid(EntrolabError):
    """Extrapolation needs at least three grain values."""


# -- systems / input ---------------------------------------------------------


class ParamOutOfRange(EntrolabError):
    """System parameter outside its documented range."""


class FileMalformed(EntrolabError):
    def __init__(self, path, row: int, detail: str, col: int | None = None):
        self.path = str(path)
        self.row = row
        self.col = col
        where = f"row {row}" if col is None else f"row {row}, column {col}"
        super().__init__(f"{path}: {where}: {detail}")


class DuplicatePoints(UserWarning):
    """Warning category for collapsed duplicate trajectory rows."""
