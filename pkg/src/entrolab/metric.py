"""Finite metric phase spaces, self-maps and the orbit-refinement metrics.

A space is a validated symmetric distance matrix normalized to diameter at
most 1.  A self-map is a total index map.  The refinement metric at horizon n
takes, for each pair, the largest distance seen along the first n steps of the
two orbits; it is again a metric and grows entrywise with n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    EmptySpace,
    FileMalformed,
    InvalidHorizon,
    MetricAsymmetric,
    TriangleViolation,
)

TOLERANCE = 1e-12

# Full O(N^3) triangle validation is skipped above this size; trusted
# constructors (built-in systems) document why their metrics are exact.
TRIANGLE_CHECK_LIMIT = 4096


@dataclass(frozen=True)
class FiniteMetricSpace:
    points: tuple
    dist: np.ndarray = field(repr=False)
    scale: float = 1.0

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def __eq__(self, other) -> bool:
        return self is other

    def __hash__(self) -> int:
        return id(self)


@dataclass(frozen=True)
class EndoMap:
    image: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.image)


@dataclass(frozen=True)
class BowenMetric:
    base: FiniteMetricSpace
    map: EndoMap
    horizon: int
    dist_n: np.ndarray = field(repr=False)


def validate_space(
    dist, points: Sequence | None = None, *, check_triangle: bool = True
) -> FiniteMetricSpace:
    """Validate a raw distance matrix and normalize it to diameter <= 1.

    A maximum entry above 1 rescales the whole matrix by 1/max; the applied
    factor is recorded on the returned space.  Asymmetry or a triangle
    violation beyond ``TOLERANCE`` is an error, as is an empty matrix.
    """
    mat = np.asarray(dist, dtype=float)
    if mat.size == 0:
        raise EmptySpace("distance matrix has no entries")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("distance matrix contains non-finite entries")
    if (mat < 0).any():
        i, j = np.argwhere(mat < 0)[0]
        raise ValueError(f"negative distance at ({i},{j})")

    asym = np.abs(mat - mat.T)
    if asym.max() > TOLERANCE:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise MetricAsymmetric(int(i), int(j), float(mat[i, j]), float(mat[j, i]))
    diag = np.abs(np.diagonal(mat))
    if diag.max() > TOLERANCE:
        i = int(np.argmax(diag))
        raise ValueError(f"nonzero diagonal entry at ({i},{i}): {mat[i, i]!r}")

    n = mat.shape[0]
    mx = float(mat.max())
    scale = 1.0
    if mx > 1.0:
        scale = 1.0 / mx
        mat = mat * scale

    if check_triangle and n <= TRIANGLE_CHECK_LIMIT:
        _assert_triangle(mat)

    mat = mat.copy()
    mat.flags.writeable = False
    pts = tuple(points) if points is not None else tuple(range(n))
    if len(pts) != n:
        raise ValueError(f"{len(pts)} labels for {n} points")
    return FiniteMetricSpace(points=pts, dist=mat, scale=scale)


def _assert_triangle(mat: np.ndarray) -> None:
    hit = None
    try:
        from . import _kernels_c

        hit = _kernels_c.triangle_violation(np.ascontiguousarray(mat), TOLERANCE)
        if hit is None:
            return
    except ImportError:
        n = mat.shape[0]
        buf = np.empty_like(mat)
        for j in range(n):
            np.add(mat[:, j][:, None], mat[j, :][None, :], out=buf)
            np.subtract(buf, mat, out=buf)
            if buf.min() < -TOLERANCE:
                i, k = np.unravel_index(np.argmin(buf), buf.shape)
                hit = (int(i), int(j), int(k))
                break
        if hit is None:
            return
    i, j, k = hit
    raise TriangleViolation(
        int(i), int(j), int(k), float(mat[i, k]), float(mat[i, j] + mat[j, k])
    )


def validate_map(space: FiniteMetricSpace, image) -> EndoMap:
    """Check totality of a self-map given as an index array."""
    arr = np.asarray(image, dtype=np.intp)
    if arr.ndim != 1 or len(arr) != space.size:
        raise ValueError(f"map must assign one image per point, got shape {arr.shape}")
    if len(arr) and (arr.min() < 0 or arr.max() >= space.size):
        bad = int(np.argmax((arr < 0) | (arr >= space.size)))
        raise ValueError(f"map image out of range at index {bad}: {arr[bad]}")
    arr = arr.copy()
    arr.flags.writeable = False
    return EndoMap(image=arr)


def bowen_metric(space: FiniteMetricSpace, emap: EndoMap, n: int) -> BowenMetric:
    """Refinement metric d_n(x, y) = max over 0 <= t < n of d(f^t x, f^t y)."""
    if n < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n}")
    for last in bowen_ladder(space, emap, n):
        pass
    return last


def bowen_ladder(
    space: FiniteMetricSpace, emap: EndoMap, n_max: int
) -> Iterator[BowenMetric]:
    """Yield the refinement metrics for n = 1..n_max, sharing the incremental
    build: d_{n+1} = max(d_n, d pulled back along f^n)."""
    if n_max < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n_max}")
    if emap.size != space.size:
        raise ValueError("map and space sizes differ")
    dist = space.dist
    current = dist.copy()
    frontier = np.arange(space.size)
    for n in range(1, n_max + 1):
        if n > 1:
            frontier = emap.image[frontier]
            np.maximum(current, dist[np.ix_(frontier, frontier)], out=current)
        snap = current.copy()
        snap.flags.writeable = False
        yield BowenMetric(base=space, map=emap, horizon=n, dist_n=snap)


def orbit(space: FiniteMetricSpace, emap: EndoMap, start: int, length: int) -> list[int]:
    """Forward orbit: start, f(start), ..., of the requested length."""
    if length < 1:
        raise ValueError(f"orbit length must be >= 1, got {length}")
    if not 0 <= start < space.size:
        raise ValueError(f"start index {start} out of range")
    seq = [int(start)]
    for _ in range(length - 1):
        seq.append(int(emap.image[seq[-1]]))
    return seq


def is_isometry(space: FiniteMetricSpace, emap: EndoMap) -> bool:
    """True when the map preserves every pairwise distance exactly."""
    f = emap.image
    return bool(np.array_equal(space.dist, space.dist[np.ix_(f, f)]))


# -- CSV ingestion -----------------------------------------------------------


def load_distance_csv(path) -> np.ndarray:
    """Read an N x N decimal matrix; malformed cells report row and column."""
    path = Path(path)
    rows: list[list[float]] = []
    with path.open() as fh:
        for r, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            parsed = []
            for c, cell in enumerate(cells):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise FileMalformed(path, r, f"not a number: {cell!r}", col=c)
            rows.append(parsed)
    if not rows:
        raise FileMalformed(path, 0, "file holds no rows")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise FileMalformed(path, r, f"expected {width} columns, got {len(row)}")
    return np.asarray(rows, dtype=float)


def load_map_csv(path, n_points: int) -> np.ndarray:
    """Read a single-column 0-based index map of length ``n_points``."""
    path = Path(path)
    values: list[int] = []
    with path.open() as fh:
        for r, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                v = int(line)
            except ValueError:
                raise FileMalformed(path, r, f"not an integer: {line!r}", col=0)
            if not 0 <= v < n_points:
                raise FileMalformed(path, r, f"index {v} out of range [0,{n_points})", col=0)
            values.append(v)
    if len(values) != n_points:
        raise FileMalformed(path, len(values), f"expected {n_points} rows, got {len(values)}")
    return np.asarray(values, dtype=np.intp)
