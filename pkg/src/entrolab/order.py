"""Finite preorders, monotone maps and the order-theoretic machinery behind
the complexity estimators: pointwise Kan extensions into value chains,
qualifying pairs, post-right adjoints, colimit preservation, and the
entanglement-graph checker.

Conventions
-----------
A preorder is a reflexive, transitive boolean relation matrix over objects
``0..size-1``; a functor between preorders is an order-preserving index map.
Chain-valued functors carry extended-real values (``float`` with ``+-inf`` as
the empty-infimum/supremum sentinels), ordered numerically; their colimit over
a finite domain is the maximum of the image.  Reversed parameter chains are
represented by transposing the relation matrix, never by negating values, so
one code path serves both orientations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .errors import (
    AdjointMissing,
    CodomainMismatch,
    PreconditionFailed,
    SignatureMismatch,
)

NEG_INF = float("-inf")
POS_INF = float("inf")

_ADJOINT_SEARCH_CAP = 10**6


@dataclass(frozen=True)
class FinitePreorder:
    leq: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.leq, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"relation matrix must be square, got {mat.shape}")
        if not np.diagonal(mat).all():
            raise ValueError("relation is not reflexive")
        closure = mat | (mat @ mat)
        if not np.array_equal(closure, mat):
            raise ValueError("relation is not transitive")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "leq", mat)

    @property
    def size(self) -> int:
        return self.leq.shape[0]

    def opposite(self) -> "FinitePreorder":
        return FinitePreorder(self.leq.T)

    @staticmethod
    def chain(k: int) -> "FinitePreorder":
        idx = np.arange(k)
        return FinitePreorder(idx[:, None] <= idx[None, :])

    @staticmethod
    def antichain(k: int) -> "FinitePreorder":
        return FinitePreorder(np.eye(k, dtype=bool))

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePreorder) and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash(self.leq.tobytes())


def chain_of_values(values: Iterable[float], reverse: bool = False):
    """Chain preorder on the distinct sorted values.

    Returns ``(preorder, sorted_values, index_of)``.  With ``reverse`` the
    relation is transposed (object i below object j when value_i >= value_j),
    the representation used for grain parameters ordered toward 0.
    """
    distinct = sorted(set(float(v) for v in values))
    chain = FinitePreorder.chain(len(distinct))
    if reverse:
        chain = chain.opposite()
    index_of = {v: i for i, v in enumerate(distinct)}
    return chain, distinct, index_of


@dataclass(frozen=True)
class MonotoneMap:
    dom: FinitePreorder
    cod: FinitePreorder
    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) != self.dom.size:
            raise ValueError(f"{len(vals)} values for {self.dom.size} objects")
        if vals and not (0 <= min(vals) and max(vals) < self.cod.size):
            raise ValueError("map value out of codomain range")
        dl, cl = self.dom.leq, self.cod.leq
        for i in range(len(vals)):
            for j in range(len(vals)):
                if dl[i, j] and not cl[vals[i], vals[j]]:
                    raise ValueError(
                        f"map is not order-preserving: {i} <= {j} but "
                        f"{vals[i]} !<= {vals[j]}"
                    )
        object.__setattr__(self, "values", vals)

    def __call__(self, x: int) -> int:
        return self.values[x]

    @staticmethod
    def identity(p: FinitePreorder) -> "MonotoneMap":
        return MonotoneMap(p, p, tuple(range(p.size)))


def compose_maps(first: MonotoneMap, second: MonotoneMap) -> MonotoneMap:
    """second after first (first: X->Y, second: Y->Z)."""
    if first.cod is not second.dom and first.cod != second.dom:
        raise SignatureMismatch("composition needs matching middle preorder")
    return MonotoneMap(first.dom, second.cod, tuple(second.values[v] for v in first.values))


@dataclass(frozen=True)
class ChainFunctor:
    """A functor into the extended-real value chain, given pointwise."""

    dom: FinitePreorder
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.dom.size:
            raise ValueError(f"{len(vals)} values for {self.dom.size} objects")
        dl = self.dom.leq
        for i in range(len(vals)):
            for j in range(len(vals)):
                if dl[i, j] and not vals[i] <= vals[j]:
                    raise ValueError(
                        f"values not monotone: {i} <= {j} but {vals[i]} > {vals[j]}"
                    )
        object.__setattr__(self, "values", vals)

    def __call__(self, x: int) -> float:
        return self.values[x]


def compose_chain(F: ChainFunctor, K: MonotoneMap) -> ChainFunctor:
    """F after K (K: A->B, F over B) as a chain functor over A."""
    if K.cod != F.dom:
        raise SignatureMismatch("chain composition needs matching preorders")
    return ChainFunctor(K.dom, tuple(F.values[v] for v in K.values))


# ---------------------------------------------------------------------------
# natural transformations, comma pairs, qualifying pairs
# ---------------------------------------------------------------------------


def _same_signature(F: MonotoneMap, G: MonotoneMap) -> None:
    if F.dom != G.dom or F.cod != G.cod:
        raise SignatureMismatch("maps must share domain and codomain")


def nat_trans_exists(F: MonotoneMap, G: MonotoneMap) -> bool:
    """Between preorders a transformation F => G exists exactly when G sits
    pointwise above F; components and naturality squares are then unique."""
    _same_signature(F, G)
    cl = F.cod.leq
    return all(cl[F(x), G(x)] for x in range(F.dom.size))


def comma_objects(F: MonotoneMap, G: MonotoneMap) -> set:
    """All pairs (d, e) whose images satisfy F(d) <= G(e) in the codomain."""
    if F.cod != G.cod:
        raise CodomainMismatch("comma construction needs one codomain")
    cl = F.cod.leq
    return {
        (d, e)
        for d in range(F.dom.size)
        for e in range(G.dom.size)
        if cl[F(d), G(e)]
    }


def is_qualifying_pair(F: MonotoneMap, G: MonotoneMap) -> bool:
    """A pair qualifies when (a) a transformation F => G exists and (b) every
    comma pair F(c1) <= G(c2) forces c1 <= c2 back in the domain.

    Part (b) is what turns an inequality between derived quantities into an
    order relation between the underlying objects.
    """
    _same_signature(F, G)
    if not nat_trans_exists(F, G):
        return False
    dl, cl = F.dom.leq, F.cod.leq
    for c1 in range(F.dom.size):
        for c2 in range(F.dom.size):
            if cl[F(c1), G(c2)] and not dl[c1, c2]:
                return False
    return True


# ---------------------------------------------------------------------------
# pointwise Kan extensions into chains
# ---------------------------------------------------------------------------


def left_kan(F: ChainFunctor, K: MonotoneMap) -> ChainFunctor:
    """Pointwise left extension of F along K: at d, the supremum of F over
    {x : K(x) <= d}, with -inf for the empty slice.  It is the pointwise-least
    monotone H with F <= H o K."""
    if F.dom != K.dom:
        raise SignatureMismatch("F and K must share their domain")
    cl = K.cod.leq
    out = []
    for d in range(K.cod.size):
        sl = [F(x) for x in range(K.dom.size) if cl[K(x), d]]
        out.append(max(sl) if sl else NEG_INF)
    return ChainFunctor(K.cod, tuple(out))


def right_kan(F: ChainFunctor, K: MonotoneMap) -> ChainFunctor:
    """Dual of left_kan: at d, the infimum of F over {x : d <= K(x)}, with
    +inf for the empty slice; pointwise-greatest monotone H with H o K <= F."""
    if F.dom != K.dom:
        raise SignatureMismatch("F and K must share their domain")
    cl = K.cod.leq
    out = []
    for d in range(K.cod.size):
        sl = [F(x) for x in range(K.dom.size) if cl[d, K(x)]]
        out.append(min(sl) if sl else POS_INF)
    return ChainFunctor(K.cod, tuple(out))


def colim_chain(F: ChainFunctor) -> float:
    """Colimit of a chain-valued functor over a finite domain: the max of the
    image (-inf for the empty domain)."""
    return max(F.values) if F.values else NEG_INF


# ---------------------------------------------------------------------------
# post-right adjoints
# ---------------------------------------------------------------------------


def _is_monotone(values: tuple, dom: FinitePreorder, cod: FinitePreorder) -> bool:
    dl, cl = dom.leq, cod.leq
    n = len(values)
    return all(
        cl[values[i], values[j]]
        for i in range(n)
        for j in range(n)
        if dl[i, j]
    )


def post_right_adjoint(T: MonotoneMap, search_cap: int = _ADJOINT_SEARCH_CAP):
    """Some monotone T* with b <= T(T*(b)) for every b, or None.

    The canonical candidate takes, per object b, the minimum admissible
    preimage-witness (lowest index when no minimum exists); if that map fails
    to be monotone, an exhaustive scan over admissible choices runs when the
    product of choice-set sizes stays within ``search_cap``.
    """
    A, B = T.dom, T.cod
    bl, al = B.leq, A.leq
    admissible: list[list[int]] = []
    for b in range(B.size):
        S = [a for a in range(A.size) if bl[b, T(a)]]
        if not S:
            return None
        admissible.append(S)

    def canonical(S: list[int]) -> int:
        for a0 in S:
            if all(al[a0, a] for a in S):
                return a0
        return S[0]

    choice = tuple(canonical(S) for S in admissible)
    if _is_monotone(choice, B, A):
        return MonotoneMap(B, A, choice)

    total = math.prod(len(S) for S in admissible)
    if total > search_cap:
        return None
    for combo in itertools.product(*admissible):
        if _is_monotone(combo, B, A):
            return MonotoneMap(B, A, combo)
    return None


def check_colim_preservation(R: ChainFunctor, T: MonotoneMap) -> bool:
    """Whether restricting R along T keeps the colimit.  Always true when T
    has a post-right adjoint; AdjointMissing when it has none (the statement
    is then vacuous and the caller should not draw conclusions)."""
    if T.cod != R.dom:
        raise SignatureMismatch("T must land in R's domain")
    if post_right_adjoint(T) is None:
        raise AdjointMissing("functor has no post-right adjoint")
    return colim_chain(R) == colim_chain(compose_chain(R, T))


def compose_post_rae(T1: MonotoneMap, T2: MonotoneMap):
    """Adjoint of a composite from the adjoints of the parts: T1* o T2* is a
    post-right adjoint of T2 o T1.  None when either part lacks one."""
    if T1.cod != T2.dom:
        raise SignatureMismatch("T2 must start where T1 ends")
    adj1 = post_right_adjoint(T1)
    adj2 = post_right_adjoint(T2)
    if adj1 is None or adj2 is None:
        return None
    composite_adjoint = compose_maps(adj2, adj1)
    composite = compose_maps(T1, T2)
    cl = T2.cod.leq
    for c in range(T2.cod.size):
        if not cl[c, composite(composite_adjoint(c))]:
            raise RuntimeError("composed adjoint failed verification")
    return composite_adjoint


# ---------------------------------------------------------------------------
# entanglement graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntangleEdge:
    """Edge data for i -> j: a common parameter preorder A with legs
    into_source: A -> C_i (must be post-right-adjoint enabled) and
    into_target: A -> C_j, witnessing F_i o into_source <= F_j o into_target
    pointwise."""

    into_source: MonotoneMap
    into_target: MonotoneMap


@dataclass(frozen=True)
class EntangleReport:
    colimits: dict
    comparisons: tuple  # (i, j, holds) for every reachable ordered pair
    scc_classes: tuple  # tuple of frozensets
    scc_equal: bool

    @property
    def all_hold(self) -> bool:
        return self.scc_equal and all(ok for _, _, ok in self.comparisons)


def entangle_check(
    nodes: Mapping[Hashable, ChainFunctor],
    edges: Mapping[tuple, EntangleEdge],
) -> EntangleReport:
    """Validate the edge side conditions, then compare node colimits along
    reachability: every path i ~> j must satisfy colim F_i <= colim F_j, and
    nodes in one strongly connected component must share the colimit value.

    Raises PreconditionFailed listing the offending edges when an edge lacks
    its adjoint or its pointwise witness.
    """
    failures = []
    for (i, j), edge in edges.items():
        if i not in nodes or j not in nodes:
            raise ValueError(f"edge ({i},{j}) references unknown nodes")
        Fi, Fj = nodes[i], nodes[j]
        if edge.into_source.cod != Fi.dom or edge.into_target.cod != Fj.dom:
            raise SignatureMismatch(f"edge ({i},{j}) legs do not match node domains")
        if edge.into_source.dom != edge.into_target.dom:
            raise SignatureMismatch(f"edge ({i},{j}) legs have different parameter domains")
        if post_right_adjoint(edge.into_source) is None:
            failures.append((i, j, "no post-right adjoint"))
            continue
        for a in range(edge.into_source.dom.size):
            if not Fi(edge.into_source(a)) <= Fj(edge.into_target(a)):
                failures.append((i, j, f"pointwise witness fails at {a}"))
                break
    if failures:
        raise PreconditionFailed(failures)

    keys = list(nodes)
    reach = {i: {i} for i in keys}
    adjacency = {i: set() for i in keys}
    for (i, j) in edges:
        adjacency[i].add(j)
    for i in keys:
        stack = [i]
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if v not in reach[i]:
                    reach[i].add(v)
                    stack.append(v)

    colimits = {i: colim_chain(nodes[i]) for i in keys}
    comparisons = []
    for i in keys:
        for j in reach[i]:
            comparisons.append((i, j, colimits[i] <= colimits[j]))

    classes: list[frozenset] = []
    assigned = set()
    for i in keys:
        if i in assigned:
            continue
        component = frozenset(j for j in reach[i] if i in reach[j])
        classes.append(component)
        assigned |= component
    scc_equal = all(
        len({colimits[j] for j in component}) == 1 for component in classes
    )
    return EntangleReport(
        colimits=colimits,
        comparisons=tuple(comparisons),
        scc_classes=tuple(classes),
        scc_equal=scc_equal,
    )


# ---------------------------------------------------------------------------
# grain scaling
# ---------------------------------------------------------------------------


def scale_eps(x: float, a: float) -> float:
    """Multiply a grain by a, capping at the diameter bound 1."""
    if a <= 0:
        raise ValueError(f"scale factor must be positive, got {a}")
    if not 0.0 < x <= 1.0:
        raise ValueError(f"grain must lie in (0, 1], got {x}")
    return min(a * x, 1.0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def preorder_to_json(p: FinitePreorder) -> dict:
    return {"schema_version": "1", "leq": p.leq.astype(bool).tolist()}


def preorder_from_json(obj: dict) -> FinitePreorder:
    return FinitePreorder(np.asarray(obj["leq"], dtype=bool))


def map_to_json(m: MonotoneMap) -> dict:
    return {"schema_version": "1", "values": list(m.values)}


def map_from_json(dom: FinitePreorder, cod: FinitePreorder, obj: dict) -> MonotoneMap:
    return MonotoneMap(dom, cod, tuple(obj["values"]))
