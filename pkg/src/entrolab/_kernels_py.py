"""Pure-Python search kernels over bitset masks.

Exact and greedy solvers for minimum set cover (which also handles minimum
dominating sets via closed-neighbourhood masks) and maximum independent set.
Bitsets are plain Python ints, one bit per element.

This module is the reference implementation.  ``entrolab._kernels_c`` is a
compiled twin with the same traversal order, bounds, tie-breaking and node
accounting, so both backends return identical values, flags and node counts.
Any change here must be mirrored there.
"""

from __future__ import annotations

from typing import Sequence

DEFAULT_BUDGET = 10_000_000


def _bits(mask: int):
    """Yield set bit positions, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _first_owners(masks: Sequence[int], targets: int) -> dict[int, int]:
    """Lowest piece index containing each target element."""
    owners: dict[int, int] = {}
    left = targets
    for j, mask in enumerate(masks):
        hit = mask & left
        for e in _bits(hit):
            owners[e] = j
        left &= ~mask
        if not left:
            break
    return owners


def greedy_set_cover(masks: Sequence[int], universe: int) -> list[int]:
    """Greedy cover: repeatedly take the piece covering the most uncovered
    elements, ties broken by lowest piece index.  Returns chosen indices.

    When every remaining piece gains at most one element the loop collapses:
    each uncovered element is assigned its lowest-index owner in one pass.
    """
    uncovered = universe
    chosen: list[int] = []
    while uncovered:
        best_gain = 0
        best_j = -1
        for j, mask in enumerate(masks):
            gain = (mask & uncovered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_j = j
        if best_gain == 0:
            raise ValueError("pieces do not cover the universe")
        if best_gain == 1:
            owners = _first_owners(masks, uncovered)
            for e in _bits(uncovered):
                chosen.append(owners[e])
            break
        chosen.append(best_j)
        uncovered &= ~masks[best_j]
    return chosen


def set_cover_exact(
    masks: Sequence[int], universe: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, bool, int]:
    """Minimum set cover size by branch and bound.

    Pieces are ordered by descending covered size (index breaks ties); the
    search branches on the uncovered element with the fewest candidate pieces
    and prunes with the greedy incumbent and the ceil(uncovered / max-gain)
    counting bound.  Returns ``(size, exact, nodes)``; ``exact`` is False when
    the node budget ran out, in which case ``size`` is the incumbent upper
    bound.
    """
    m = len(masks)
    eff = [masks[j] & universe for j in range(m)]
    best = len(greedy_set_cover(masks, universe))
    sizes = [p.bit_count() for p in eff]
    order = sorted(range(m), key=lambda j: (-sizes[j], j))

    candidates: dict[int, list[int]] = {e: [] for e in _bits(universe)}
    for j in order:
        for e in _bits(eff[j]):
            candidates[e].append(j)
    max_static = max(sizes, default=0)

    state = {"best": best, "nodes": 0, "aborted": False}

    def recurse(uncovered: int, depth: int) -> None:
        state["nodes"] += 1
        if state["nodes"] > budget:
            state["aborted"] = True
            return
        if uncovered == 0:
            if depth < state["best"]:
                state["best"] = depth
            return
        u = uncovered.bit_count()
        bound = state["best"]
        if max_static == 0 or depth + -(-u // max_static) >= bound:
            return
        # exact max gain; the static size orders the scan so it can stop early
        max_gain = 0
        for j in order:
            if sizes[j] <= max_gain:
                break
            g = (eff[j] & uncovered).bit_count()
            if g > max_gain:
                max_gain = g
        if max_gain == 0:
            return
        if max_gain == 1:
            if depth + u < state["best"]:
                state["best"] = depth + u
            return
        if depth + -(-u // max_gain) >= state["best"]:
            return
        pick = -1
        pick_width = m + 1
        for e in _bits(uncovered):
            width = len(candidates[e])
            if width < pick_width:
                pick_width = width
                pick = e
        for j in candidates[pick]:
            if state["aborted"]:
                return
            recurse(uncovered & ~eff[j], depth + 1)

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, m + 1000))
    try:
        recurse(universe, 0)
    finally:
        sys.setrecursionlimit(old_limit)
    return state["best"], not state["aborted"], state["nodes"]


def greedy_independent_set(adj: Sequence[int], n: int) -> list[int]:
    """Maximal independent set: repeatedly take the lowest-index vertex of
    minimum remaining degree (all isolated vertices at once when any exist),
    removing its closed neighbourhood."""
    remaining = (1 << n) - 1
    chosen: list[int] = []
    while remaining:
        isolated = 0
        best_v = -1
        best_d = n + 1
        for v in _bits(remaining):
            d = (adj[v] & remaining).bit_count()
            if d == 0:
                isolated |= 1 << v
            elif d < best_d:
                best_d = d
                best_v = v
        if isolated:
            for v in _bits(isolated):
                chosen.append(v)
            remaining &= ~isolated
            continue
        chosen.append(best_v)
        remaining &= ~(adj[best_v] | (1 << best_v))
    return chosen


def independent_set_exact(
    adj: Sequence[int], n: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, bool, int]:
    """Maximum independent set size by branch and bound.

    Incumbent from the greedy maximal set; upper bound from a greedy clique
    cover of the remaining vertices (an independent set takes at most one
    vertex per clique).  Branches on the highest-degree remaining vertex,
    include-branch first.  Returns ``(size, exact, nodes)``.
    """
    best = len(greedy_independent_set(adj, n))
    state = {"best": best, "nodes": 0, "aborted": False}

    def clique_cover_bound(remaining: int, limit: int) -> int:
        # stop as soon as the bound provably cannot prune (count > limit)
        cliques: list[int] = []
        for v in _bits(remaining):
            placed = False
            for idx, members in enumerate(cliques):
                if members & ~adj[v] == 0:
                    cliques[idx] = members | (1 << v)
                    placed = True
                    break
            if not placed:
                cliques.append(1 << v)
                if len(cliques) > limit:
                    return limit + 1
        return len(cliques)

    def recurse(remaining: int, size: int) -> None:
        state["nodes"] += 1
        if state["nodes"] > budget:
            state["aborted"] = True
            return
        isolated = 0
        for v in _bits(remaining):
            if adj[v] & remaining == 0:
                isolated |= 1 << v
        if isolated:
            size += isolated.bit_count()
            remaining &= ~isolated
        if size > state["best"]:
            state["best"] = size
        if remaining == 0:
            return
        if size + remaining.bit_count() <= state["best"]:
            return
        if size + clique_cover_bound(remaining, state["best"] - size) <= state["best"]:
            return
        pick = -1
        pick_deg = -1
        for v in _bits(remaining):
            d = (adj[v] & remaining).bit_count()
            if d > pick_deg:
                pick_deg = d
                pick = v
        recurse(remaining & ~adj[pick] & ~(1 << pick), size + 1)
        if state["aborted"]:
            return
        recurse(remaining & ~(1 << pick), size)

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n + 1000))
    try:
        recurse((1 << n) - 1, 0)
    finally:
        sys.setrecursionlimit(old_limit)
    return state["best"], not state["aborted"], state["nodes"]
