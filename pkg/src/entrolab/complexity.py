"""The three complexity estimators and the growth-rate machinery.

For a space with self-map and a horizon n, the orbit-refinement metric d_n
induces three counts:

* spanning: the smallest tracer set whose d_n-balls of radius eps reach every
  point (minimum dominating set of the eps-ball graph);
* separated: the largest set with pairwise d_n distances above eps (maximum
  independent set of the complement relation);
* cover: the minimal subcover size of the dynamically refined cover.

Counts at fixed grain form non-decreasing sequences whose normalized log
rates ln(a_n)/n estimate the growth exponent; the log-limit takes the maximum
over a trailing window and the extrapolation step reports stabilization
across the grain grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .covers import (
    CountResult,
    Cover,
    _join_maximal,
    _reduce_to_maximal,
    bool_to_mask,
    diameter,
    dyn_refine,
    dyn_refine_maximal,
    free_udc,
    join,
    mask_to_indices,
    min_subcover_size,
    pullback,
)
from .errors import (
    EmptySubset,
    ExactBudgetExceeded,
    InsufficientGrid,
    InvalidHorizon,
    PieceBudgetExceeded,
    WindowEmpty,
)
from .metric import BowenMetric, EndoMap, FiniteMetricSpace, bowen_ladder, bowen_metric

#: Separation value reported for singletons: above any grain on a space of
#: diameter 1, so singletons count as separated at every eps while arithmetic
#: stays in ordinary floats.
SINGLETON_SEP = 2.0

METHODS = ("cover", "span", "sep")

DEFAULT_PIECE_BUDGET = 300_000


@dataclass(frozen=True)
class FiniteSubset:
    members: int

    def __post_init__(self):
        if self.members <= 0:
            raise EmptySubset("subset must contain at least one point")

    @staticmethod
    def from_indices(indices: Iterable[int]) -> "FiniteSubset":
        mask = 0
        for i in indices:
            mask |= 1 << int(i)
        return FiniteSubset(mask)

    @property
    def indices(self) -> list[int]:
        return mask_to_indices(self.members)

    @property
    def size(self) -> int:
        return self.members.bit_count()


def _as_indices(subset) -> list[int]:
    if isinstance(subset, FiniteSubset):
        idx = subset.indices
    elif isinstance(subset, int):
        idx = mask_to_indices(subset)
    else:
        idx = [int(i) for i in subset]
    if not idx:
        raise EmptySubset("subset must contain at least one point")
    return idx


def metric_span(subset, metric: np.ndarray) -> float:
    """Largest distance from any point of the space to the subset."""
    idx = _as_indices(subset)
    return float(metric[:, idx].min(axis=1).max())


def metric_sep(subset, metric: np.ndarray) -> float:
    """Smallest pairwise distance within the subset; singletons report the
    above-diameter sentinel so they are separated at every grain."""
    idx = _as_indices(subset)
    if len(idx) == 1:
        return SINGLETON_SEP
    sub = np.array(metric[np.ix_(idx, idx)], dtype=float)
    np.fill_diagonal(sub, np.inf)
    return float(sub.min())


def _check_grain(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"grain must lie in (0, 1], got {eps}")


def _span_masks(dn: np.ndarray, eps: float) -> list[int]:
    return [bool_to_mask(dn[a] <= eps) for a in range(dn.shape[0])]


def _sep_adjacency(dn: np.ndarray, eps: float) -> list[int]:
    n = dn.shape[0]
    close = dn <= eps
    np.fill_diagonal(close, False)
    return [bool_to_mask(close[a]) for a in range(n)]


def min_spanning_count(
    space: FiniteMetricSpace,
    emap: EndoMap,
    n: int,
    eps: float,
    mode: str = "exact",
    budget: int = kernels.DEFAULT_BUDGET,
    _metric: np.ndarray | None = None,
) -> CountResult:
    """Smallest set whose horizon-n orbit neighbourhoods of radius eps cover
    the space: minimum dominating set over the d_n eps-ball masks."""
    _check_grain(eps)
    if n < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n}")
    if mode not in ("exact", "greedy"):
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    dn = _metric if _metric is not None else bowen_metric(space, emap, n).dist_n
    masks = _span_masks(dn, eps)
    npts = space.size
    universe = (1 << npts) - 1
    if mode == "greedy":
        return CountResult(len(kernels.greedy_set_cover(masks, universe, npts)), "greedy", 0)
    value, exact, nodes = kernels.set_cover_exact(masks, universe, npts, budget)
    if not exact:
        raise ExactBudgetExceeded(value, nodes)
    return CountResult(value, "exact", nodes)


def max_separated_count(
    space: FiniteMetricSpace,
    emap: EndoMap,
    n: int,
    eps: float,
    mode: str = "exact",
    budget: int = kernels.DEFAULT_BUDGET,
    _metric: np.ndarray | None = None,
) -> CountResult:
    """Largest set with pairwise d_n distance above eps: maximum independent
    set of the graph joining pairs at distance <= eps."""
    _check_grain(eps)
    if n < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {n}")
    if mode not in ("exact", "greedy"):
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    dn = _metric if _metric is not None else bowen_metric(space, emap, n).dist_n
    adj = _sep_adjacency(dn, eps)
    npts = space.size
    if mode == "greedy":
        return CountResult(len(kernels.greedy_independent_set(adj, npts)), "greedy", 0)
    value, exact, nodes = kernels.independent_set_exact(adj, npts, budget)
    if not exact:
        raise ExactBudgetExceeded(value, nodes)
    return CountResult(value, "exact", nodes)


def cover_complexity(
    space: FiniteMetricSpace,
    emap: EndoMap,
    n: int,
    seed: Cover,
    mode: str = "exact",
    budget: int = kernels.DEFAULT_BUDGET,
    max_pieces: int | None = DEFAULT_PIECE_BUDGET,
    reduce: bool = True,
) -> CountResult:
    """Minimal subcover size of the horizon-n refinement of the seed cover.

    With ``reduce`` the refinement keeps only maximal pieces, which leaves the
    count unchanged (subsumed pieces never help a subcover) while bounding the
    blow-up; disable it to count over the full refinement verbatim.
    """
    builder = dyn_refine_maximal if reduce else dyn_refine
    refined = builder(emap, n, seed, max_pieces=max_pieces)
    return min_subcover_size(refined, mode=mode, budget=budget)


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateSequence:
    """Counts a_1..a_N, non-decreasing, each >= 1."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise ValueError("rate sequence needs at least one entry")
        if any(c < 1 for c in counts):
            raise ValueError("rate entries must be >= 1")
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("rate entries must be non-decreasing")
        object.__setattr__(self, "counts", counts)

    @property
    def horizon(self) -> int:
        return len(self.counts)


def log_rate(rates: RateSequence) -> tuple:
    """Normalized log rates ln(a_n)/n, n starting at 1."""
    return tuple(math.log(c) / n for n, c in enumerate(rates.counts, start=1))


def default_window(horizon: int) -> tuple:
    """Trailing half of the horizon, rounded to keep at least one entry."""
    return (horizon // 2 + 1, horizon)


def log_lim(rates: RateSequence, window: tuple | None = None) -> float:
    """Maximum normalized log rate over the window (default: trailing half)."""
    n_lo, n_hi = window if window is not None else default_window(rates.horizon)
    if not (1 <= n_lo <= n_hi <= rates.horizon):
        raise WindowEmpty(f"window ({n_lo},{n_hi}) outside horizon 1..{rates.horizon}")
    lr = log_rate(rates)
    return max(lr[n_lo - 1 : n_hi])


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyEstimate:
    method: str
    eps: float
    rates: RateSequence
    modes: tuple  # per-entry "exact" | "greedy"
    window: tuple
    log_rates: tuple
    loglim: float
    truncated: bool = False  # horizon cut short by the piece budget
    catalogue_counts: tuple | None = None  # per-n max over the seed catalogue


def _finish_estimate(
    method: str,
    eps: float,
    counts: list,
    modes: list,
    window: tuple | None,
    truncated: bool,
    catalogue_counts: list | None,
) -> EntropyEstimate:
    rates = RateSequence(tuple(counts))
    win = window if window is not None else default_window(rates.horizon)
    return EntropyEstimate(
        method=method,
        eps=eps,
        rates=rates,
        modes=tuple(modes),
        window=win,
        log_rates=log_rate(rates),
        loglim=log_lim(rates, win),
        truncated=truncated,
        catalogue_counts=tuple(catalogue_counts) if catalogue_counts else None,
    )


def _solve_cover_cell(refined: Cover, mode: str, budget: int) -> tuple:
    if mode == "greedy":
        return min_subcover_size(refined, "greedy", budget)
    try:
        return min_subcover_size(refined, "exact", budget)
    except ExactBudgetExceeded as exc:
        return CountResult(exc.best, "greedy", exc.nodes)


def _sweep_cover(space, emap, eps, n_max, mode, budget, piece_budget):
    # incremental maximal refinement: same minimal subcover sizes as the
    # full join at every horizon, bounded memory
    counts, modes = [], []
    truncated = False
    seed = free_udc(space, eps)
    refined = Cover(space, _reduce_to_maximal(seed.pieces, space.size))
    pulled = refined
    for n in range(1, n_max + 1):
        if n > 1:
            pulled = pullback(emap, pulled)
            refined = _join_maximal(refined, pulled)
            if piece_budget is not None and len(refined.pieces) > piece_budget:
                truncated = True
                break
        result = _solve_cover_cell(refined, mode, budget)
        counts.append(result.value)
        modes.append(result.mode)
    return counts, modes, truncated


def _sweep_one_eps(space, emap, method, eps, n_max, mode, budget, piece_budget, ladder, catalogue):
    """Raw counts for a single grain; pure function of its arguments."""
    catalogue_counts = None
    if method == "cover":
        counts, modes, truncated = _sweep_cover(
            space, emap, eps, n_max, mode, budget, piece_budget
        )
        if catalogue:
            eligible = [c for c in catalogue if diameter(c) >= eps]
            if eligible:
                catalogue_counts = []
                for n in range(1, len(counts) + 1):
                    per_seed = []
                    for c in eligible:
                        res = _solve_cover_cell(
                            dyn_refine(emap, n, c, max_pieces=piece_budget),
                            mode,
                            budget,
                        )
                        per_seed.append(res.value)
                    catalogue_counts.append(max(per_seed))
    else:
        counts, modes = [], []
        truncated = False
        solver = min_spanning_count if method == "span" else max_separated_count
        for n in range(1, n_max + 1):
            try:
                res = solver(
                    space, emap, n, eps, mode=mode, budget=budget,
                    _metric=ladder[n - 1],
                )
            except ExactBudgetExceeded as exc:
                res = CountResult(exc.best, "greedy", exc.nodes)
            counts.append(res.value)
            modes.append(res.mode)
    return counts, modes, truncated, catalogue_counts


def pressure_sweep(
    space: FiniteMetricSpace,
    emap: EndoMap,
    method: str,
    eps_grid: Sequence[float],
    n_max: int,
    mode: str = "exact",
    budget: int = kernels.DEFAULT_BUDGET,
    piece_budget: int | None = DEFAULT_PIECE_BUDGET,
    window: tuple | None = None,
    catalogue: Sequence[Cover] | None = None,
    workers: int = 1,
) -> list[EntropyEstimate]:
    """One rate sequence per grain.

    ``eps_grid`` must be strictly decreasing within (0, 1].  In exact mode a
    budget-exhausted cell falls back to its incumbent bound and is flagged
    "greedy".  Counts are clamped to be non-decreasing in n and across the
    shrinking grain, which is a no-op for exact solves and repairs heuristic
    dips on greedy ones.  For the cover method the seed at grain eps is the
    uniform ball cover; a catalogue of extra seed covers, when given, is
    reported per grain as the max count over catalogue members of diameter
    >= eps.

    Grains are independent, so ``workers`` > 1 computes them in a thread pool;
    assembly is index-ordered, making output independent of the worker count.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise ValueError("grain grid is empty")
    for e in grid:
        _check_grain(e)
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grain grid must be strictly decreasing")

    ladder = None
    if method in ("span", "sep"):
        ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]

    def run(eps: float):
        return _sweep_one_eps(
            space, emap, method, eps, n_max, mode, budget, piece_budget, ladder, catalogue
        )

    if workers > 1 and len(grid) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(run, grid))
    else:
        raw = [run(eps) for eps in grid]

    estimates: list[EntropyEstimate] = []
    prev_counts: list | None = None
    for eps, (counts, modes, truncated, catalogue_counts) in zip(grid, raw):
        if not counts:
            raise PieceBudgetExceeded(0, piece_budget or 0)
        # monotone repair: in n, then against the previous (larger) grain
        for i in range(1, len(counts)):
            counts[i] = max(counts[i], counts[i - 1])
        if prev_counts is not None:
            for i in range(min(len(counts), len(prev_counts))):
                counts[i] = max(counts[i], prev_counts[i])
            for i in range(1, len(counts)):
                counts[i] = max(counts[i], counts[i - 1])
        prev_counts = counts
        estimates.append(
            _finish_estimate(method, eps, counts, modes, window, truncated, catalogue_counts)
        )
    return estimates


# ---------------------------------------------------------------------------
# extrapolation over the grain grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Extrapolation:
    value: float  # log-limit at the smallest grain
    spread: float  # max - min over the last three grains
    stabilized: bool
    tolerance: float
    eps_used: tuple


def entropy_extrapolate(
    estimates: Sequence[EntropyEstimate], tol: float = 0.05
) -> Extrapolation:
    """Stabilization report across the grain grid: the log-limit at the
    smallest grain plus the spread over the last three grains."""
    if len(estimates) < 3:
        raise InsufficientGrid(f"need >= 3 grains, got {len(estimates)}")
    eps = [e.eps for e in estimates]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("estimates must come at strictly decreasing grains")
    tail = estimates[-3:]
    values = [e.loglim for e in tail]
    spread = max(values) - min(values)
    return Extrapolation(
        value=estimates[-1].loglim,
        spread=spread,
        stabilized=spread <= tol,
        tolerance=tol,
        eps_used=tuple(e.eps for e in tail),
    )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

CSV_HEADER = "method,eps,n,count,exact,log_rate"


def sweep_rows(estimates: Sequence[EntropyEstimate]) -> list[tuple]:
    rows = []
    for est in estimates:
        for i, count in enumerate(est.rates.counts):
            rows.append(
                (
                    est.method,
                    est.eps,
                    i + 1,
                    count,
                    est.modes[i] == "exact",
                    est.log_rates[i],
                )
            )
    return rows


def sweep_to_csv(estimates: Sequence[EntropyEstimate]) -> str:
    lines = [CSV_HEADER]
    for method, eps, n, count, exact, lr in sweep_rows(estimates):
        lines.append(f"{method},{eps!r},{n},{count},{str(exact).lower()},{lr!r}")
    return "\n".join(lines) + "\n"


def estimate_to_json(est: EntropyEstimate) -> dict:
    out = {
        "eps": est.eps,
        "counts": list(est.rates.counts),
        "modes": list(est.modes),
        "log_rates": list(est.log_rates),
        "window": list(est.window),
        "loglim": est.loglim,
        "truncated": est.truncated,
    }
    if est.catalogue_counts is not None:
        out["catalogue_counts"] = list(est.catalogue_counts)
    return out


def sweeps_to_json(per_method: dict) -> dict:
    return {
        "schema_version": "1",
        "methods": {
            method: [estimate_to_json(e) for e in estimates]
            for method, estimates in per_method.items()
        },
    }
