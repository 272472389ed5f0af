"""Built-in finite dynamical systems and trajectory ingestion.

The built-ins provide known growth behaviour for exercising the estimators:
circle doubling on a dyadic grid (growth rate ln 2), rigid rotations (rate 0,
exact isometries), truncated full shifts (rate ln k in the pre-wrap regime)
and the tent map on a dyadic interval grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicatePoints, FileMalformed, ParamOutOfRange
from .metric import EndoMap, FiniteMetricSpace, validate_map, validate_space

KINDS = ("dyadic_doubling", "rotation", "full_shift", "tent", "custom")

_MAX_POINTS = 20_000


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParamOutOfRange(f"unknown system kind {self.kind!r}")


def dyadic_doubling(m: int) -> SystemSpec:
    return SystemSpec("dyadic_doubling", {"m": m})


def rotation(p: int, q: int) -> SystemSpec:
    return SystemSpec("rotation", {"p": p, "q": q})


def full_shift(k: int, L: int) -> SystemSpec:
    return SystemSpec("full_shift", {"k": k, "L": L})


def tent(m: int) -> SystemSpec:
    return SystemSpec("tent", {"m": m})


def _circle_metric(n: int, table: np.ndarray) -> np.ndarray:
    idx = np.arange(n)
    k = np.abs(idx[:, None] - idx[None, :])
    return table[np.minimum(k, n - k)]


def _int_param(params: dict, name: str, minimum: int) -> int:
    if name not in params:
        raise ParamOutOfRange(f"missing parameter {name!r}")
    value = params[name]
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ParamOutOfRange(f"parameter {name!r} must be an integer, got {value!r}")
    if value < minimum:
        raise ParamOutOfRange(f"parameter {name!r} must be >= {minimum}, got {value}")
    return int(value)


def build_system(spec: SystemSpec) -> tuple[FiniteMetricSpace, EndoMap]:
    """Materialize the spec as a validated space plus total self-map."""
    params = spec.params
    if spec.kind == "dyadic_doubling":
        m = _int_param(params, "m", 2)
        n = 1 << m
        if n > _MAX_POINTS:
            raise ParamOutOfRange(f"grid of 2^{m} points exceeds the {_MAX_POINTS} cap")
        # circle distance in grid steps, rescaled so antipodes sit at 1
        table = 2.0 * np.arange(n // 2 + 1) / n
        dist = _circle_metric(n, table)
        space = validate_space(dist, points=tuple(j / n for j in range(n)))
        image = (2 * np.arange(n)) % n
        return space, validate_map(space, image)

    if spec.kind == "rotation":
        p = _int_param(params, "p", 1)
        q = _int_param(params, "q", 2)
        if not p < q:
            raise ParamOutOfRange(f"rotation requires 1 <= p < q, got p={p}, q={q}")
        if q > _MAX_POINTS:
            raise ParamOutOfRange(f"{q} points exceeds the {_MAX_POINTS} cap")
        table = 2.0 * np.arange(q // 2 + 1) / q
        dist = _circle_metric(q, table)
        space = validate_space(dist, points=tuple(j / q for j in range(q)))
        image = (np.arange(q) + p) % q
        return space, validate_map(space, image)

    if spec.kind == "full_shift":
        k = _int_param(params, "k", 2)
        L = _int_param(params, "L", 2)
        n = k**L
        if n > _MAX_POINTS:
            raise ParamOutOfRange(f"{k}^{L} words exceeds the {_MAX_POINTS} cap")
        codes = np.arange(n)
        dist = np.ones((n, n))
        for i in range(1, L):
            prefix = codes // (k ** (L - i))
            same = prefix[:, None] == prefix[None, :]
            dist[same] = float(k) ** (-i)
        np.fill_diagonal(dist, 0.0)
        labels = tuple(np.base_repr(c, base=k).zfill(L) for c in codes)
        space = validate_space(dist, points=labels)
        # left shift, last symbol refilled cyclically from the first
        image = (codes % (k ** (L - 1))) * k + codes // (k ** (L - 1))
        return space, validate_map(space, image)

    if spec.kind == "tent":
        m = _int_param(params, "m", 2)
        n = (1 << m) + 1
        if n > _MAX_POINTS:
            raise ParamOutOfRange(f"grid of 2^{m}+1 points exceeds the {_MAX_POINTS} cap")
        grid = np.arange(n)
        dist = np.abs(grid[:, None] - grid[None, :]) / (n - 1)
        space = validate_space(dist, points=tuple(j / (n - 1) for j in range(n)))
        half = 1 << (m - 1)
        image = np.where(grid <= half, 2 * grid, 2 * (n - 1) - 2 * grid)
        image = np.clip(image, 0, n - 1)
        return space, validate_map(space, image)

    raise ParamOutOfRange(
        "custom systems are built from files via ingest_trajectory"
    )


# ---------------------------------------------------------------------------
# trajectory ingestion
# ---------------------------------------------------------------------------

MAP_RULES = ("successor", "nearest-image")


def _read_points_csv(path: Path) -> np.ndarray:
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
            if rows and len(parsed) != len(rows[0]):
                raise FileMalformed(
                    path, r, f"expected {len(rows[0])} coordinates, got {len(parsed)}"
                )
            rows.append(parsed)
    if not rows:
        raise FileMalformed(path, 0, "file holds no rows")
    return np.asarray(rows, dtype=float)


def ingest_trajectory(
    points_path, map_rule: str = "successor"
) -> tuple[FiniteMetricSpace, EndoMap]:
    """Build a system from observed trajectory rows.

    Pairwise Euclidean distances are normalized to diameter 1 (the scale
    factor is recorded on the space).  Exact duplicate rows collapse to one
    point with a DuplicatePoints warning.  Map rules:

    * ``successor``: row t maps to row t+1, last row is fixed; for collapsed
      duplicates the earliest occurrence decides the successor.
    * ``nearest-image``: each point maps to the stored point nearest to its
      successor's coordinates (ties to the lowest index).
    """
    if map_rule not in MAP_RULES:
        raise ParamOutOfRange(f"map rule must be one of {MAP_RULES}, got {map_rule!r}")
    path = Path(points_path)
    raw = _read_points_csv(path)

    rep_of_row: list[int] = []
    key_to_rep: dict[bytes, int] = {}
    coords: list[np.ndarray] = []
    for row in raw:
        key = row.tobytes()
        if key in key_to_rep:
            rep_of_row.append(key_to_rep[key])
        else:
            key_to_rep[key] = len(coords)
            rep_of_row.append(len(coords))
            coords.append(row)
    if len(coords) < len(raw):
        warnings.warn(
            f"{len(raw) - len(coords)} duplicate rows collapsed", DuplicatePoints
        )
    pts = np.asarray(coords)
    n = len(pts)

    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    space = validate_space(dist, points=tuple(map(tuple, pts.tolist())))

    image = np.full(n, -1, dtype=np.intp)
    last = len(raw) - 1
    for t, rep in enumerate(rep_of_row):
        if image[rep] >= 0:
            continue
        if map_rule == "successor":
            image[rep] = rep_of_row[t + 1] if t < last else rep
        else:
            target = raw[t + 1] if t < last else raw[t]
            image[rep] = int(np.argmin(np.linalg.norm(pts - target, axis=1)))
    return space, validate_map(space, image)
