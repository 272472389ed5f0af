"""Backend selection for the search kernels.

The compiled extension (``entrolab._kernels_c``) is preferred when it imported
cleanly; the pure-Python module is the fallback.  Setting ``ENTROLAB_PURE=1``
forces the fallback, which is useful for parity testing and benchmarking.
Both backends implement identical algorithms, so values, exactness flags and
node counts do not depend on the backend.

All entry points take bitset masks as Python ints over ``n_points`` bits.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import _kernels_py

DEFAULT_BUDGET = _kernels_py.DEFAULT_BUDGET

_FORCE_PURE = os.environ.get("ENTROLAB_PURE", "") not in ("", "0")

try:  # pragma: no cover - depends on the build environment
    from . import _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None

BACKEND = "compiled" if (_kernels_c is not None and not _FORCE_PURE) else "pure"


def _pack(masks: Sequence[int], n_points: int) -> np.ndarray:
    words = max(1, (n_points + 63) >> 6)
    out = np.empty((len(masks), words), dtype=np.uint64)
    nbytes = words * 8
    for i, mask in enumerate(masks):
        out[i] = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype="<u8")
    return out


def _pack_one(mask: int, n_points: int) -> np.ndarray:
    return _pack([mask], n_points)[0]


def greedy_set_cover(masks: Sequence[int], universe: int, n_points: int) -> list[int]:
    if BACKEND == "compiled":
        return _kernels_c.greedy_set_cover_words(
            _pack(masks, n_points), _pack_one(universe, n_points)
        )
    return _kernels_py.greedy_set_cover(masks, universe)


def set_cover_exact(
    masks: Sequence[int],
    universe: int,
    n_points: int,
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, bool, int]:
    if BACKEND == "compiled":
        return _kernels_c.set_cover_exact_words(
            _pack(masks, n_points), _pack_one(universe, n_points), budget
        )
    return _kernels_py.set_cover_exact(masks, universe, budget)


def greedy_independent_set(adj: Sequence[int], n_points: int) -> list[int]:
    if BACKEND == "compiled":
        return _kernels_c.greedy_independent_set_words(_pack(adj, n_points), n_points)
    return _kernels_py.greedy_independent_set(adj, n_points)


def independent_set_exact(
    adj: Sequence[int], n_points: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, bool, int]:
    if BACKEND == "compiled":
        return _kernels_c.independent_set_exact_words(
            _pack(adj, n_points), n_points, budget
        )
    return _kernels_py.independent_set_exact(adj, n_points, budget)
