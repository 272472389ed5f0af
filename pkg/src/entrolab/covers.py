"""Covers of a finite metric space as a preorder.

Pieces are bitsets over point indices.  ``coarser_than(a, b)`` holds when
every piece of ``b`` sits inside some piece of ``a``; the join (all pairwise
intersections) is the coproduct for this order.  Pulling a cover back through
the dynamics and joining across a horizon yields the refined cover whose
minimal subcover size is the cover-counting complexity.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import (
    ExactBudgetExceeded,
    IncompleteCover,
    InvalidHorizon,
    PieceBudgetExceeded,
    SpaceMismatch,
)
from .metric import EndoMap, FiniteMetricSpace

_WORD = (1 << 64) - 1

# joins larger than this switch to word-bucket candidate pruning
_DIRECT_JOIN_LIMIT = 65536


class CountResult(NamedTuple):
    """Count plus how it was obtained. ``mode`` is "exact" or "greedy" (an
    upper bound for minimisation problems, a lower bound for maximisation)."""

    value: int
    mode: str
    nodes: int


def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


def mask_to_indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_to_bool(mask: int, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def bool_to_mask(members: np.ndarray) -> int:
    packed = np.packbits(members.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class Cover:
    """A finite family of non-empty point subsets whose union is the space.

    Pieces are deduplicated preserving first occurrence; order is otherwise
    kept, so covers built the same way compare identically.
    """

    __slots__ = ("space", "pieces")

    def __init__(self, space: FiniteMetricSpace, pieces: Iterable):
        full = (1 << space.size) - 1
        seen: dict[int, None] = {}
        union = 0
        for piece in pieces:
            mask = piece if isinstance(piece, int) else indices_to_mask(piece)
            if mask == 0:
                raise ValueError("cover pieces must be non-empty")
            if mask & ~full:
                raise ValueError("piece references points outside the space")
            seen.setdefault(mask)
            union |= mask
        if not seen:
            raise ValueError("a cover needs at least one piece")
        if union != full:
            missing = mask_to_indices(full & ~union)
            raise IncompleteCover(f"points {missing} not covered")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "pieces", tuple(seen))

    def __setattr__(self, name, value):
        raise AttributeError("covers are immutable")

    def __len__(self) -> int:
        return len(self.pieces)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cover)
            and self.space is other.space
            and set(self.pieces) == set(other.pieces)
        )

    def __hash__(self) -> int:
        return hash((id(self.space), frozenset(self.pieces)))

    def __repr__(self) -> str:
        return f"Cover({len(self.pieces)} pieces over {self.space.size} points)"


class UniformDiskCover(Cover):
    """Cover consisting of every closed ball of one fixed radius (the grain)."""

    __slots__ = ("grain",)

    def __init__(self, space: FiniteMetricSpace, pieces: Iterable, grain: float):
        super().__init__(space, pieces)
        object.__setattr__(self, "grain", float(grain))

    def __repr__(self) -> str:
        return f"UniformDiskCover(grain={self.grain}, {len(self.pieces)} pieces)"


def _same_space(a: Cover, b: Cover) -> None:
    if a.space is not b.space:
        raise SpaceMismatch("covers refer to different spaces")


def coarser_than(a: Cover, b: Cover) -> bool:
    """True when every piece of ``b`` is contained in some piece of ``a``."""
    _same_space(a, b)
    for pb in b.pieces:
        if not any(pb & ~pa == 0 for pa in a.pieces):
            return False
    return True


def join(a: Cover, b: Cover) -> Cover:
    """All non-empty pairwise intersections; the coproduct of the two covers."""
    _same_space(a, b)
    out: dict[int, None] = {}
    if len(a.pieces) * len(b.pieces) <= _DIRECT_JOIN_LIMIT:
        for pa in a.pieces:
            for pb in b.pieces:
                inter = pa & pb
                if inter:
                    out.setdefault(inter)
    else:
        n = a.space.size
        words = (n + 63) >> 6
        buckets: list[list[int]] = [[] for _ in range(words)]
        for jdx, pb in enumerate(b.pieces):
            for wi in range(words):
                if (pb >> (wi << 6)) & _WORD:
                    buckets[wi].append(jdx)
        for pa in a.pieces:
            cand: set[int] = set()
            for wi in range(words):
                if (pa >> (wi << 6)) & _WORD:
                    cand.update(buckets[wi])
            for jdx in sorted(cand):
                inter = pa & b.pieces[jdx]
                if inter:
                    out.setdefault(inter)
    return Cover(a.space, out)


def pullback(emap: EndoMap, a: Cover) -> Cover:
    """Preimages of the pieces under the map, empty preimages dropped."""
    if emap.size != a.space.size:
        raise SpaceMismatch("map and cover sizes differ")
    n = a.space.size
    image = emap.image
    out: dict[int, None] = {}
    for piece in a.pieces:
        members = mask_to_bool(piece, n)
        pre = members[image]
        if pre.any():
            out.setdefault(bool_to_mask(pre))
    return Cover(a.space, out)


def dyn_refine(emap: EndoMap, n: int, a: Cover, max_pieces: int | None = None) -> Cover:
    """Join of the pullbacks of ``a`` along the first ``n`` iterates.

    ``max_pieces`` caps the refined cover's size; exceeding it raises
    PieceBudgetExceeded so sweeps can flag the cell instead of exhausting
    memory.
    """
    if n < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n}")
    if n == 1:
        return a
    result = a
    pulled = a
    for _ in range(1, n):
        pulled = pullback(emap, pulled)
        result = join(result, pulled)
        if max_pieces is not None and len(result.pieces) > max_pieces:
            raise PieceBudgetExceeded(len(result.pieces), max_pieces)
    return result


def _reduce_to_maximal(masks, n_points: int) -> list[int]:
    """Maximal pieces only (dedup included), processed by descending size so a
    single containment pass suffices; word buckets narrow the candidates and
    the size order allows an early break (a container is never smaller)."""
    words = max(1, (n_points + 63) >> 6)
    ordered = sorted(enumerate(masks), key=lambda kv: (-kv[1].bit_count(), kv[0]))
    buckets: list[list[int]] = [[] for _ in range(words)]
    accepted: list[int] = []
    sizes: list[int] = []
    for _, mask in ordered:
        size = mask.bit_count()
        touched = [wi for wi in range(words) if (mask >> (wi << 6)) & _WORD]
        cand = min((buckets[wi] for wi in touched), key=len)
        subsumed = False
        for idx in cand:
            if sizes[idx] < size:
                break
            if mask & ~accepted[idx] == 0:
                subsumed = True
                break
        if subsumed:
            continue
        pos = len(accepted)
        accepted.append(mask)
        sizes.append(size)
        for wi in touched:
            buckets[wi].append(pos)
    return accepted


def _join_maximal(a: Cover, b: Cover) -> Cover:
    """Maximal pieces of join(a, b) without materialising the full join.

    Word buckets narrow the partners of each piece when pieces are localized;
    when they span most words the plain double loop is cheaper, so the
    strategy is picked from the estimated candidate volume.  Both paths
    enumerate partners in ascending index order and agree exactly.
    """
    n = a.space.size
    words = (n + 63) >> 6
    by_word: list[list[int]] = [[] for _ in range(words)]
    for jdx, pb in enumerate(b.pieces):
        for wi in range(words):
            if (pb >> (wi << 6)) & _WORD:
                by_word[wi].append(jdx)
    touched_a: list[list[int]] = []
    for pa in a.pieces:
        touched_a.append([wi for wi in range(words) if (pa >> (wi << 6)) & _WORD])
    bucket_cost = sum(len(by_word[wi]) for ws in touched_a for wi in ws)
    plain_cost = len(a.pieces) * len(b.pieces)

    def local_maximal(distinct: dict) -> list[int]:
        # distinct intersections for one piece, largest first
        local: list[int] = []
        for inter in sorted(distinct, key=lambda m: (-m.bit_count(), distinct[m])):
            if not any(inter & ~seen == 0 for seen in local):
                local.append(inter)
        return local

    generated: list[int] = []
    if bucket_cost < plain_cost // 2:
        for pa, ws in zip(a.pieces, touched_a):
            cand: set[int] = set()
            for wi in ws:
                cand.update(by_word[wi])
            distinct: dict[int, int] = {}
            for jdx in sorted(cand):
                inter = pa & b.pieces[jdx]
                if inter and inter not in distinct:
                    distinct[inter] = len(distinct)
            generated.extend(local_maximal(distinct))
    else:
        for pa in a.pieces:
            distinct = {}
            for pb in b.pieces:
                inter = pa & pb
                if inter and inter not in distinct:
                    distinct[inter] = len(distinct)
            generated.extend(local_maximal(distinct))
    return Cover(a.space, _reduce_to_maximal(generated, n))


def dyn_refine_maximal(
    emap: EndoMap, n: int, a: Cover, max_pieces: int | None = None
) -> Cover:
    """Refinement keeping only maximal pieces at every stage.

    Subsumed pieces never help a minimal subcover and their descendants stay
    subsumed under further intersections, so this cover has exactly the
    maximal pieces of dyn_refine's output and the same minimal subcover size,
    at a fraction of the memory.
    """
    if n < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n}")
    result = Cover(a.space, _reduce_to_maximal(a.pieces, a.space.size))
    if n == 1:
        return result
    pulled = result
    for _ in range(1, n):
        pulled = pullback(emap, pulled)
        result = _join_maximal(result, pulled)
        if max_pieces is not None and len(result.pieces) > max_pieces:
            raise PieceBudgetExceeded(len(result.pieces), max_pieces)
    return result


def min_subcover_size(
    a: Cover, mode: str = "exact", budget: int = kernels.DEFAULT_BUDGET
) -> CountResult:
    """Smallest number of pieces of ``a`` that still cover the space.

    Exact mode runs branch and bound and raises ExactBudgetExceeded when the
    node budget runs out (the exception carries the best upper bound found);
    greedy mode returns the greedy upper bound, flagged as such.
    """
    if mode not in ("exact", "greedy"):
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    n = a.space.size
    universe = (1 << n) - 1
    if mode == "greedy":
        chosen = kernels.greedy_set_cover(a.pieces, universe, n)
        return CountResult(len(chosen), "greedy", 0)
    value, exact, nodes = kernels.set_cover_exact(a.pieces, universe, n, budget)
    if not exact:
        raise ExactBudgetExceeded(value, nodes)
    return CountResult(value, "exact", nodes)


def diameter(a: Cover) -> float:
    """Largest pairwise distance inside any piece; singletons contribute 0."""
    D = a.space.dist
    worst = 0.0
    for piece in a.pieces:
        idx = mask_to_indices(piece)
        if len(idx) > 1:
            worst = max(worst, float(D[np.ix_(idx, idx)].max()))
    return worst


def lebesgue_number(a: Cover) -> float:
    """min over points x of (max over pieces containing x of the distance from
    x to the piece's complement); a piece equal to the whole space counts as 1.

    Every ball of radius strictly below the result sits inside some piece.
    """
    n = a.space.size
    D = a.space.dist
    full = (1 << n) - 1
    best = np.full(n, -np.inf)
    for piece in a.pieces:
        if piece == full:
            best[:] = np.maximum(best, 1.0)
            continue
        members = mask_to_bool(piece, n)
        inside = np.flatnonzero(members)
        outside = np.flatnonzero(~members)
        isolation = D[np.ix_(inside, outside)].min(axis=1)
        best[inside] = np.maximum(best[inside], isolation)
    return float(best.min())


def free_udc(space: FiniteMetricSpace, eps: float) -> UniformDiskCover:
    """The cover made of every closed ball of radius ``eps``."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"grain must lie in (0, 1], got {eps}")
    D = space.dist
    pieces = [bool_to_mask(D[i] <= eps) for i in range(space.size)]
    return UniformDiskCover(space, pieces, grain=eps)


def expand(udc: UniformDiskCover, factor: float = 2.01) -> UniformDiskCover:
    """Same centers, radius scaled by ``factor`` and capped at 1."""
    if factor <= 1.0:
        raise ValueError(f"expansion factor must exceed 1, got {factor}")
    return free_udc(udc.space, min(factor * udc.grain, 1.0))


# -- serialization -----------------------------------------------------------


def cover_to_json(a: Cover) -> dict:
    return {
        "schema_version": "1",
        "pieces": [mask_to_indices(p) for p in a.pieces],
    }


def cover_from_json(space: FiniteMetricSpace, obj: dict) -> Cover:
    return Cover(space, [indices_to_mask(p) for p in obj["pieces"]])
