"""Verification suites and corpus builders shared by the CLI and the tests.

Each suite checks one family of invariants over generated instances and
returns a SuiteResult with instance counts and failure details, so the CLI
can render a report and the tests can assert zero failures.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .complexity import (
    cover_complexity,
    max_separated_count,
    min_spanning_count,
)
from .covers import (
    Cover,
    coarser_than,
    diameter,
    dyn_refine,
    free_udc,
    join,
    lebesgue_number,
    mask_to_indices,
    min_subcover_size,
)
from .errors import ExactBudgetExceeded, PieceBudgetExceeded
from .metric import EndoMap, FiniteMetricSpace, bowen_ladder, is_isometry, validate_map, validate_space
from .order import (
    ChainFunctor,
    FinitePreorder,
    MonotoneMap,
    chain_of_values,
    colim_chain,
    compose_chain,
    compose_maps,
    is_qualifying_pair,
    left_kan,
    nat_trans_exists,
    post_right_adjoint,
    right_kan,
)
from .systems import SystemSpec, build_system


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    def record(self, ok: bool, detail=None) -> None:
        self.instances += 1
        if not ok:
            self.failures.append(detail if detail is not None else {})

    def skip(self) -> None:
        self.skipped += 1

    @property
    def passed(self) -> int:
        return self.instances - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {
            "invariant": self.name,
            "instances": self.instances,
            "passed": self.passed,
            "ok": self.ok,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        if self.failures:
            out["first_failure"] = self.failures[0]
        return out


# ---------------------------------------------------------------------------
# corpora
# ---------------------------------------------------------------------------


def random_metric_space(rng: np.random.Generator, n: int) -> FiniteMetricSpace:
    """Euclidean distances of random planar points, rescaled to diameter 1."""
    if n == 1:
        return validate_space([[0.0]])
    pts = rng.uniform(0.0, 1.0, (n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    dist /= dist.max()
    np.fill_diagonal(dist, 0.0)
    dist = np.minimum(dist, dist.T)
    return validate_space(dist)


def random_endomap(rng: np.random.Generator, space: FiniteMetricSpace) -> EndoMap:
    return validate_map(space, rng.integers(0, space.size, space.size))


def builtin_specs_small(max_points: int = 128) -> list[tuple[str, SystemSpec]]:
    specs: list[tuple[str, SystemSpec]] = []
    for m in (2, 3, 4, 5, 6):
        if (1 << m) <= max_points:
            specs.append((f"doubling_m{m}", SystemSpec("dyadic_doubling", {"m": m})))
        if (1 << m) + 1 <= max_points:
            specs.append((f"tent_m{m}", SystemSpec("tent", {"m": m})))
    for p, q in ((1, 5), (1, 12), (2, 17), (3, 32), (1, 64), (5, 101), (1, 127)):
        if q <= max_points:
            specs.append((f"rotation_{p}_{q}", SystemSpec("rotation", {"p": p, "q": q})))
    for k, L in ((2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4)):
        if k**L <= max_points:
            specs.append((f"shift_{k}_{L}", SystemSpec("full_shift", {"k": k, "L": L})))
    return specs


def verify_corpus(
    seed: int = 20260811, count: int = 50, max_points: int = 128
) -> list[tuple[str, FiniteMetricSpace, EndoMap]]:
    """Built-ins plus seeded random systems, at least ``count`` entries."""
    rng = np.random.default_rng(seed)
    corpus: list[tuple[str, FiniteMetricSpace, EndoMap]] = []
    for name, spec in builtin_specs_small(max_points):
        space, emap = build_system(spec)
        corpus.append((name, space, emap))
    i = 0
    while len(corpus) < count:
        n = int(rng.integers(6, 33))
        space = random_metric_space(rng, n)
        corpus.append((f"random_{i}_n{n}", space, random_endomap(rng, space)))
        i += 1
    return corpus


# ---------------------------------------------------------------------------
# cover catalogues
# ---------------------------------------------------------------------------


def cover_catalogue(
    space: FiniteMetricSpace,
    rng: np.random.Generator | None = None,
    max_grains: int = 5,
    random_covers: int = 6,
) -> list[Cover]:
    """Uniform ball covers at distance-derived grains, their pairwise joins,
    the trivial cover, the singleton partition, and a few random covers."""
    n = space.size
    full = (1 << n) - 1
    values = sorted(set(float(v) for v in space.dist[space.dist > 0].ravel()))
    step = max(1, len(values) // max_grains)
    grains = values[::step][:max_grains] or [1.0]
    covers: list[Cover] = [Cover(space, [full])]
    if n > 1:
        covers.append(Cover(space, [1 << i for i in range(n)]))
    udcs = [free_udc(space, g) for g in grains if 0.0 < g <= 1.0]
    covers.extend(udcs)
    for a, b in zip(udcs, udcs[1:]):
        covers.append(join(a, b))
    if rng is not None:
        for _ in range(random_covers):
            pieces = []
            covered = 0
            while covered != full:
                size = int(rng.integers(1, max(2, n // 2 + 1)))
                members = rng.choice(n, size=size, replace=False)
                mask = 0
                for v in members:
                    mask |= 1 << int(v)
                pieces.append(mask)
                covered |= mask
            covers.append(Cover(space, pieces))
    unique: dict = {}
    for c in covers:
        unique.setdefault(frozenset(c.pieces), c)
    return list(unique.values())


def exhaustive_covers(space: FiniteMetricSpace, max_pieces: int) -> list[Cover]:
    """Every cover family with at most ``max_pieces`` distinct non-empty
    pieces; only feasible for very small spaces."""
    n = space.size
    full = (1 << n) - 1
    subsets = list(range(1, 1 << n))
    out = []
    for r in range(1, max_pieces + 1):
        for fam in itertools.combinations(subsets, r):
            u = 0
            for s in fam:
                u |= s
            if u == full:
                out.append(Cover(space, fam))
    return out


# ---------------------------------------------------------------------------
# estimator suites
# ---------------------------------------------------------------------------


def _exact_or_none(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs).value
    except ExactBudgetExceeded:
        return None


def suite_sandwich_a(
    space, emap, eps_grid, n_max, budget, result: SuiteResult | None = None
) -> SuiteResult:
    """span(eps) <= sep(eps) <= span(eps/2), exact solvers only."""
    res = result if result is not None else SuiteResult("sandwich_metric")
    ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]
    for eps in eps_grid:
        for n in range(1, n_max + 1):
            dn = ladder[n - 1]
            h2 = _exact_or_none(min_spanning_count, space, emap, n, eps, "exact", budget, _metric=dn)
            h3 = _exact_or_none(max_separated_count, space, emap, n, eps, "exact", budget, _metric=dn)
            h2_half = _exact_or_none(min_spanning_count, space, emap, n, eps / 2, "exact", budget, _metric=dn)
            if None in (h2, h3, h2_half):
                res.skip()
                continue
            res.record(
                h2 <= h3 <= h2_half,
                {"eps": eps, "n": n, "span": h2, "sep": h3, "span_half": h2_half},
            )
    return res


def suite_sandwich_b(
    space, emap, seeds, eps_grid, n_max, budget, piece_budget,
    result: SuiteResult | None = None,
) -> SuiteResult:
    """For seed covers a with diameter(a) < eps:
    sep(eps, n) <= refined-cover count(a, n) <= span(Leb(a)/2, n)."""
    res = result if result is not None else SuiteResult("sandwich_cover")
    ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]
    for seed in seeds:
        diam_a = diameter(seed)
        leb_a = lebesgue_number(seed)
        for n in range(1, n_max + 1):
            try:
                cov = cover_complexity(space, emap, n, seed, "exact", budget, piece_budget).value
            except (ExactBudgetExceeded, PieceBudgetExceeded):
                res.skip()
                continue
            dn = ladder[n - 1]
            for eps in eps_grid:
                if not diam_a < eps:
                    continue
                h3 = _exact_or_none(max_separated_count, space, emap, n, eps, "exact", budget, _metric=dn)
                if h3 is None:
                    res.skip()
                    continue
                res.record(
                    h3 <= cov,
                    {"eps": eps, "n": n, "sep": h3, "cover": cov, "diam_seed": diam_a},
                )
            if leb_a > 0:
                h2 = _exact_or_none(
                    min_spanning_count, space, emap, n, leb_a / 2, "exact", budget, _metric=dn
                )
                if h2 is None:
                    res.skip()
                    continue
                res.record(
                    cov <= h2,
                    {"n": n, "cover": cov, "span_at_half_leb": h2, "leb_seed": leb_a},
                )
    return res


def suite_monotonicity(
    space, emap, eps_grid, n_max, budget, result: SuiteResult | None = None
) -> SuiteResult:
    """Counts are non-decreasing in n at fixed grain and as the grain shrinks
    at fixed n (exact solves only)."""
    res = result if result is not None else SuiteResult("count_monotonicity")
    ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]
    table: dict = {}
    for eps in eps_grid:
        for n in range(1, n_max + 1):
            dn = ladder[n - 1]
            h2 = _exact_or_none(min_spanning_count, space, emap, n, eps, "exact", budget, _metric=dn)
            h3 = _exact_or_none(max_separated_count, space, emap, n, eps, "exact", budget, _metric=dn)
            table[(eps, n)] = (h2, h3)
    for eps in eps_grid:
        for n in range(1, n_max):
            a, b = table[(eps, n)], table[(eps, n + 1)]
            if None in a or None in b:
                res.skip()
                continue
            res.record(
                a[0] <= b[0] and a[1] <= b[1],
                {"eps": eps, "n": n, "at_n": a, "at_n1": b},
            )
    ordered = sorted(eps_grid, reverse=True)
    for big, small in zip(ordered, ordered[1:]):
        for n in range(1, n_max + 1):
            a, b = table[(big, n)], table[(small, n)]
            if None in a or None in b:
                res.skip()
                continue
            res.record(
                a[0] <= b[0] and a[1] <= b[1],
                {"eps_big": big, "eps_small": small, "n": n},
            )
    return res


def suite_isometry(
    space, emap, eps_grid, n_max, budget, result: SuiteResult | None = None
) -> SuiteResult:
    """Isometries leave both counts independent of the horizon, exactly."""
    res = result if result is not None else SuiteResult("isometry_nullity")
    if not is_isometry(space, emap):
        return res
    ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]
    for eps in eps_grid:
        base = None
        for n in range(1, n_max + 1):
            dn = ladder[n - 1]
            h2 = _exact_or_none(min_spanning_count, space, emap, n, eps, "exact", budget, _metric=dn)
            h3 = _exact_or_none(max_separated_count, space, emap, n, eps, "exact", budget, _metric=dn)
            if h2 is None or h3 is None:
                res.skip()
                continue
            if base is None:
                base = (h2, h3)
            else:
                res.record(
                    (h2, h3) == base, {"eps": eps, "n": n, "base": base, "now": (h2, h3)}
                )
    return res


def suite_greedy_bracket(
    space, emap, eps_grid, n_max, budget, result: SuiteResult | None = None
) -> SuiteResult:
    """Greedy spanning/cover counts bound the exact values from above, greedy
    separation from below, with the standard logarithmic cover gap."""
    res = result if result is not None else SuiteResult("greedy_bracket")
    ladder = [bm.dist_n for bm in bowen_ladder(space, emap, n_max)]
    log_cap = 1.0 + math.log(space.size)
    for eps in eps_grid:
        for n in range(1, n_max + 1):
            dn = ladder[n - 1]
            e2 = _exact_or_none(min_spanning_count, space, emap, n, eps, "exact", budget, _metric=dn)
            e3 = _exact_or_none(max_separated_count, space, emap, n, eps, "exact", budget, _metric=dn)
            if e2 is None or e3 is None:
                res.skip()
                continue
            g2 = min_spanning_count(space, emap, n, eps, "greedy", _metric=dn).value
            g3 = max_separated_count(space, emap, n, eps, "greedy", _metric=dn).value
            res.record(
                g2 >= e2 and g3 <= e3 and g2 <= e2 * log_cap,
                {"eps": eps, "n": n, "exact": (e2, e3), "greedy": (g2, g3)},
            )
    return res


def suite_lebesgue(space, covers, result: SuiteResult | None = None) -> SuiteResult:
    """Strict refinement lemma: diameter(b) < lebesgue_number(a) forces a to
    be coarser than b."""
    res = result if result is not None else SuiteResult("lebesgue_lemma")
    lebs = [lebesgue_number(c) for c in covers]
    diams = [diameter(c) for c in covers]
    for i, a in enumerate(covers):
        for j, b in enumerate(covers):
            if diams[j] < lebs[i]:
                res.record(
                    coarser_than(a, b),
                    {
                        "a_pieces": [mask_to_indices(p) for p in a.pieces],
                        "b_pieces": [mask_to_indices(p) for p in b.pieces],
                        "leb_a": lebs[i],
                        "diam_b": diams[j],
                    },
                )
    return res


def leb_diam_maps(space, covers):
    """The cover family as a preorder plus the (Leb, diam) maps into the
    reversed grain chain, for qualifying-pair experiments."""
    lebs = [lebesgue_number(c) for c in covers]
    diams = [diameter(c) for c in covers]
    k = len(covers)
    leq = np.zeros((k, k), dtype=bool)
    for i in range(k):
        for j in range(k):
            leq[i, j] = coarser_than(covers[i], covers[j])
    cover_preorder = FinitePreorder(leq)
    chain, values, index_of = chain_of_values(lebs + diams, reverse=True)
    leb_map = MonotoneMap(cover_preorder, chain, tuple(index_of[v] for v in lebs))
    diam_map = MonotoneMap(cover_preorder, chain, tuple(index_of[v] for v in diams))
    return cover_preorder, leb_map, diam_map


# ---------------------------------------------------------------------------
# order-kernel suites
# ---------------------------------------------------------------------------


def random_preorder(rng: np.random.Generator, n: int, density: float = 0.4) -> FinitePreorder:
    leq = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                leq[i, j] = True
    for k in range(n):
        for i in range(n):
            if leq[i, k]:
                leq[i] |= leq[k]
    return FinitePreorder(leq)


def all_monotone_maps(dom: FinitePreorder, cod: FinitePreorder, cap: int | None = None):
    """Enumerate order-preserving index maps; a cap bounds the yield."""
    produced = 0
    dl, cl = dom.leq, cod.leq
    pairs = [(i, j) for i in range(dom.size) for j in range(dom.size) if dl[i, j] and i != j]
    for vals in itertools.product(range(cod.size), repeat=dom.size):
        if all(cl[vals[i], vals[j]] for i, j in pairs):
            yield MonotoneMap(dom, cod, vals)
            produced += 1
            if cap is not None and produced >= cap:
                return


def random_monotone_map(
    rng: np.random.Generator, dom: FinitePreorder, cod: FinitePreorder, tries: int = 60
):
    dl, cl = dom.leq, cod.leq
    pairs = [(i, j) for i in range(dom.size) for j in range(dom.size) if dl[i, j] and i != j]
    for _ in range(tries):
        vals = tuple(int(v) for v in rng.integers(0, cod.size, dom.size))
        if all(cl[vals[i], vals[j]] for i, j in pairs):
            return MonotoneMap(dom, cod, vals)
    return None


def random_chain_functor(rng: np.random.Generator, dom: FinitePreorder) -> ChainFunctor:
    n = dom.size
    vals = [float(v) for v in np.sort(rng.uniform(0.0, 1.0, n))]
    order = sorted(range(n), key=lambda i: int(dom.leq[:, i].sum()))
    assigned = [0.0] * n
    for rank, obj in enumerate(order):
        assigned[obj] = vals[rank]
    for _ in range(n):
        for i in range(n):
            for j in range(n):
                if dom.leq[i, j] and assigned[i] > assigned[j]:
                    assigned[j] = assigned[i]
    return ChainFunctor(dom, tuple(assigned))


def naturality_bruteforce(F: MonotoneMap, G: MonotoneMap) -> bool:
    """Independent oracle: enumerate component families from the hom-sets and
    check every naturality square through explicit composites."""
    dl, cl = F.dom.leq, F.cod.leq
    components = []
    for x in range(F.dom.size):
        hom = [(F(x), G(x))] if cl[F(x), G(x)] else []
        if not hom:
            return False
        components.append(hom[0])
    for x in range(F.dom.size):
        for y in range(F.dom.size):
            if not dl[x, y]:
                continue
            # square path 1: eta_x then G(x -> y); path 2: F(x -> y) then eta_y
            p1 = cl[F(x), G(x)] and cl[G(x), G(y)]
            p2 = cl[F(x), F(y)] and cl[F(y), G(y)]
            if not (p1 and p2):
                return False
    return True


def left_kan_bruteforce(F: ChainFunctor, K: MonotoneMap):
    """Pointwise minimum over every monotone H with F <= H o K, enumerating H
    over the value grid of F extended with the empty-sup sentinel."""
    grid = sorted(set(F.values)) or [0.0]
    grid = [float("-inf")] + grid
    cod = K.cod
    pairs = [
        (i, j) for i in range(cod.size) for j in range(cod.size) if cod.leq[i, j] and i != j
    ]
    best = None
    for vals in itertools.product(grid, repeat=cod.size):
        if not all(vals[i] <= vals[j] for i, j in pairs):
            continue
        if not all(F(x) <= vals[K(x)] for x in range(K.dom.size)):
            continue
        if best is None:
            best = list(vals)
        else:
            best = [min(b, v) for b, v in zip(best, vals)]
    return tuple(best) if best is not None else None


def right_kan_bruteforce(F: ChainFunctor, K: MonotoneMap):
    grid = sorted(set(F.values)) or [0.0]
    grid = grid + [float("inf")]
    cod = K.cod
    pairs = [
        (i, j) for i in range(cod.size) for j in range(cod.size) if cod.leq[i, j] and i != j
    ]
    best = None
    for vals in itertools.product(grid, repeat=cod.size):
        if not all(vals[i] <= vals[j] for i, j in pairs):
            continue
        if not all(vals[K(x)] <= F(x) for x in range(K.dom.size)):
            continue
        if best is None:
            best = list(vals)
        else:
            best = [max(b, v) for b, v in zip(best, vals)]
    return tuple(best) if best is not None else None


def suite_od30(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """nat_trans_exists agrees with the brute-force naturality oracle."""
    res = result if result is not None else SuiteResult("pointwise_transformation")
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 7))
        dom = random_preorder(rng, n)
        cod = random_preorder(rng, m)
        F = random_monotone_map(rng, dom, cod)
        G = random_monotone_map(rng, dom, cod)
        if F is None or G is None:
            res.skip()
            continue
        res.record(
            nat_trans_exists(F, G) == naturality_bruteforce(F, G),
            {"dom": dom.leq.tolist(), "cod": cod.leq.tolist(), "F": F.values, "G": G.values},
        )
    return res


def suite_kan(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Pointwise Kan formulas match the enumeration-based universal property."""
    res = result if result is not None else SuiteResult("kan_universal")
    for _ in range(trials):
        nx = int(rng.integers(1, 5))
        nd = int(rng.integers(1, 5))
        X = random_preorder(rng, nx)
        D = random_preorder(rng, nd)
        K = random_monotone_map(rng, X, D)
        if K is None:
            res.skip()
            continue
        F = random_chain_functor(rng, X)
        lk = left_kan(F, K)
        rk = right_kan(F, K)
        bl = left_kan_bruteforce(F, K)
        br = right_kan_bruteforce(F, K)
        ok = bl is not None and br is not None and tuple(lk.values) == bl and tuple(rk.values) == br
        res.record(
            ok,
            {"F": F.values, "K": K.values, "left": lk.values, "left_oracle": bl,
             "right": rk.values, "right_oracle": br},
        )
    return res


def suite_sd40(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Restriction along a functor with a post-right adjoint keeps colimits."""
    res = result if result is not None else SuiteResult("colimit_preservation")
    for _ in range(trials):
        na = int(rng.integers(1, 6))
        nb = int(rng.integers(1, 6))
        A = random_preorder(rng, na)
        B = random_preorder(rng, nb)
        T = random_monotone_map(rng, A, B)
        if T is None or post_right_adjoint(T) is None:
            res.skip()
            continue
        R = random_chain_functor(rng, B)
        res.record(
            colim_chain(R) == colim_chain(compose_chain(R, T)),
            {"T": T.values, "R": R.values},
        )
    return res


def suite_df30(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Restricting a chain functor can only lower its colimit."""
    res = result if result is not None else SuiteResult("restriction_colimit")
    for _ in range(trials):
        nn = int(rng.integers(1, 5))
        nx = int(rng.integers(1, 6))
        N = random_preorder(rng, nn)
        X = random_preorder(rng, nx)
        P = random_monotone_map(rng, N, X)
        if P is None:
            res.skip()
            continue
        m = random_chain_functor(rng, X)
        res.record(
            colim_chain(compose_chain(m, P)) <= colim_chain(m),
            {"P": P.values, "m": m.values},
        )
    return res


def suite_ddp3(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Composite of adjoints is an adjoint of the composite."""
    from .order import compose_post_rae

    res = result if result is not None else SuiteResult("adjoint_composition")
    for _ in range(trials):
        na, nb, nc = (int(rng.integers(1, 5)) for _ in range(3))
        A = random_preorder(rng, na)
        B = random_preorder(rng, nb)
        C = random_preorder(rng, nc)
        T1 = random_monotone_map(rng, A, B)
        T2 = random_monotone_map(rng, B, C)
        if T1 is None or T2 is None:
            res.skip()
            continue
        if post_right_adjoint(T1) is None or post_right_adjoint(T2) is None:
            res.skip()
            continue
        composed = compose_post_rae(T1, T2)
        if composed is None:
            res.record(False, {"T1": T1.values, "T2": T2.values})
            continue
        comp = compose_maps(T1, T2)
        ok = all(C.leq[c, comp(composed(c))] for c in range(C.size))
        res.record(ok, {"T1": T1.values, "T2": T2.values, "adj": composed.values})
    return res


def strict_chain_map(rng, n_dom: int, n_cod: int, onto_top: bool = False) -> MonotoneMap:
    """Random strictly increasing map between chains; order-reflecting, so any
    (F, F) pair of them qualifies."""
    dom = FinitePreorder.chain(n_dom)
    cod = FinitePreorder.chain(n_cod)
    picks = sorted(int(v) for v in rng.choice(n_cod, size=n_dom, replace=False))
    if onto_top:
        picks[-1] = n_cod - 1
    return MonotoneMap(dom, cod, tuple(picks))


def qualifying_pair_instance(rng) -> tuple[MonotoneMap, MonotoneMap]:
    """A pair that provably qualifies: a strictly increasing chain map against
    itself (reflects order), or an identity pair on a random preorder."""
    if rng.random() < 0.5:
        n_dom = int(rng.integers(1, 5))
        n_cod = int(rng.integers(n_dom, 7))
        F = strict_chain_map(rng, n_dom, n_cod)
        return F, F
    C = random_preorder(rng, int(rng.integers(1, 5)))
    ident = MonotoneMap.identity(C)
    return ident, ident


def suite_qlf_actn(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Under a verified qualifying pair, composite pointwise domination
    descends to the inner functors (no counterexamples may exist)."""
    res = result if result is not None else SuiteResult("qualifying_action")
    for trial in range(trials):
        if trial % 2 == 0:
            F, G = qualifying_pair_instance(rng)
            C, D = F.dom, F.cod
        else:
            C = random_preorder(rng, int(rng.integers(1, 5)))
            D = random_preorder(rng, int(rng.integers(1, 5)))
            F = random_monotone_map(rng, C, D)
            G = random_monotone_map(rng, C, D)
            if F is None or G is None or not is_qualifying_pair(F, G):
                res.skip()
                continue
        I = random_preorder(rng, int(rng.integers(1, 4)))
        Fp = random_monotone_map(rng, I, C)
        Gp = random_monotone_map(rng, I, C)
        if Fp is None or Gp is None:
            res.skip()
            continue
        premise = all(D.leq[F(Fp(i)), G(Gp(i))] for i in range(I.size))
        if not premise:
            res.skip()
            continue
        conclusion = all(C.leq[Fp(i), Gp(i)] for i in range(I.size))
        res.record(
            conclusion,
            {"F": F.values, "G": G.values, "Fp": Fp.values, "Gp": Gp.values},
        )
    return res


def _lim_qual_instance(rng, targeted: bool):
    """(L, D, P, m) with (L, D) qualifying and D o P post-right-adjoint
    enabled, or None when rejection sampling misses."""
    if targeted:
        nx = int(rng.integers(2, 5))
        ne = int(rng.integers(nx, 7))
        nn = int(rng.integers(1, 4))
        X = FinitePreorder.chain(nx)
        N = FinitePreorder.chain(nn)
        D = strict_chain_map(rng, nx, ne, onto_top=True)
        L = D
        # P hits the top of X so D o P still spans the end of the chain
        p_vals = sorted(int(v) for v in rng.integers(0, nx, nn - 1)) + [nx - 1]
        P = MonotoneMap(N, X, tuple(p_vals))
    else:
        nx = int(rng.integers(2, 5))
        ne = int(rng.integers(2, 5))
        nn = int(rng.integers(1, 4))
        X = random_preorder(rng, nx)
        E = FinitePreorder.chain(ne)
        N = FinitePreorder.chain(nn)
        L = random_monotone_map(rng, X, E)
        D = random_monotone_map(rng, X, E)
        if L is None or D is None or not is_qualifying_pair(L, D):
            return None
        P = random_monotone_map(rng, N, X)
        if P is None:
            return None
    if post_right_adjoint(compose_maps(P, D)) is None:
        return None
    return L, D, P, random_chain_functor(rng, P.cod)


def suite_lim_qual(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """With a qualifying pair (L, D) and D o P post-right-adjoint enabled, the
    left Kan extension of m along D has the colimit of m o P."""
    res = result if result is not None else SuiteResult("kan_colimit_transfer")
    for trial in range(trials):
        inst = _lim_qual_instance(rng, targeted=trial % 2 == 0)
        if inst is None:
            res.skip()
            continue
        L, D, P, m = inst
        lhs = colim_chain(left_kan(m, D))
        rhs = colim_chain(compose_chain(m, P))
        res.record(
            lhs == rhs,
            {"L": L.values, "D": D.values, "P": P.values, "m": m.values,
             "kan_colim": lhs, "restricted_colim": rhs},
        )
    return res


def suite_ddkw(rng, trials: int, result: SuiteResult | None = None) -> SuiteResult:
    """Monotone sequences from a finite chain whose image spans the end, under
    a qualifying pair: the Kan extension's colimit cannot exceed the best
    measurement along the sequence."""
    res = result if result is not None else SuiteResult("sequence_colimit_bound")
    for trial in range(trials):
        inst = _lim_qual_instance(rng, targeted=trial % 2 == 0)
        if inst is None:
            res.skip()
            continue
        _, D, P, m = inst
        lhs = colim_chain(left_kan(m, D))
        rhs = max(m(P(i)) for i in range(P.dom.size))
        res.record(lhs <= rhs, {"D": D.values, "P": P.values, "m": m.values})
    return res


# ---------------------------------------------------------------------------
# entanglement instances
# ---------------------------------------------------------------------------


def entangle_cycle_instance(rng: np.random.Generator):
    """A 3-cycle whose edges satisfy the side conditions by construction, so
    the three colimits must agree."""
    from .order import EntangleEdge

    top = float(rng.uniform(0.5, 1.0))
    nodes = {}
    for i in range(3):
        k = int(rng.integers(2, 5))
        vals = sorted(float(v) for v in rng.uniform(0.0, top, k - 1)) + [top]
        nodes[i] = ChainFunctor(FinitePreorder.chain(k), tuple(vals))
    edges = {}
    for i, j in ((0, 1), (1, 2), (2, 0)):
        Ci, Cj = nodes[i].dom, nodes[j].dom
        na = int(rng.integers(2, 5))
        A = FinitePreorder.chain(na)
        # onto-the-top monotone leg guarantees the post-right adjoint
        src_vals = sorted(int(v) for v in rng.integers(0, Ci.size, na - 1)) + [Ci.size - 1]
        F_ij = MonotoneMap(A, Ci, tuple(src_vals))
        tgt_vals = []
        for a in range(na):
            want = nodes[i](F_ij(a))
            c = min(c for c in range(Cj.size) if nodes[j](c) >= want)
            tgt_vals.append(c)
        G_ij = MonotoneMap(A, Cj, tuple(tgt_vals))
        edges[(i, j)] = EntangleEdge(into_source=F_ij, into_target=G_ij)
    return nodes, edges


def suite_entangle(rng, instances: int, result: SuiteResult | None = None) -> SuiteResult:
    from .order import entangle_check

    res = result if result is not None else SuiteResult("entangled_colimits")
    for _ in range(instances):
        nodes, edges = entangle_cycle_instance(rng)
        report = entangle_check(nodes, edges)
        res.record(
            report.scc_equal and report.all_hold,
            {"colimits": report.colimits},
        )
    return res
