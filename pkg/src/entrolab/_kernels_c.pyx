# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled twin of entrolab._kernels_py.

Same algorithms, same traversal order, same tie-breaking, same node
accounting; bitsets are little-endian uint64 word arrays instead of Python
ints.  Any behavioural change must be mirrored in the pure module.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

import numpy as np

ctypedef unsigned long long u64

cdef extern from *:
    """
    static inline int el_popcount64(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int el_ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int el_popcount64(u64 x) nogil
    int el_ctz64(u64 x) nogil


cdef inline int _popcount(const u64* a, int w) nogil:
    cdef int i, s = 0
    for i in range(w):
        s += el_popcount64(a[i])
    return s


cdef inline int _popcount_and(const u64* a, const u64* b, int w) nogil:
    cdef int i, s = 0
    for i in range(w):
        s += el_popcount64(a[i] & b[i])
    return s


cdef inline void _and_not(const u64* a, const u64* b, u64* out, int w) nogil:
    cdef int i
    for i in range(w):
        out[i] = a[i] & ~b[i]


cdef inline bint _is_zero(const u64* a, int w) nogil:
    cdef int i
    for i in range(w):
        if a[i]:
            return False
    return True


cdef inline bint _and_not_zero(const u64* a, const u64* b, int w) nogil:
    # a & ~b == 0
    cdef int i
    for i in range(w):
        if a[i] & ~b[i]:
            return False
    return True


# ---------------------------------------------------------------------------
# set cover
# ---------------------------------------------------------------------------

cdef struct SCState:
    int m
    int w
    u64* eff
    int* cand_flat
    int* cand_start
    int* cand_len
    int* order
    int* sizes
    int max_static
    int best
    long long nodes
    long long budget
    bint aborted
    u64* stack


cdef void _sc_recurse(SCState* st, u64* uncovered, int depth) nogil:
    cdef int w = st.w
    cdef int u, bound, max_gain, g, j, i, pick, pick_width, e, wi, b
    cdef u64 word
    cdef u64* child

    st.nodes += 1
    if st.nodes > st.budget:
        st.aborted = True
        return
    if _is_zero(uncovered, w):
        if depth < st.best:
            st.best = depth
        return
    u = _popcount(uncovered, w)
    bound = st.best
    if st.max_static == 0 or depth + (u + st.max_static - 1) / st.max_static >= bound:
        return
    # exact max gain; the static size orders the scan so it can stop early
    max_gain = 0
    for i in range(st.m):
        j = st.order[i]
        if st.sizes[j] <= max_gain:
            break
        g = _popcount_and(st.eff + j * w, uncovered, w)
        if g > max_gain:
            max_gain = g
    if max_gain == 0:
        return
    if max_gain == 1:
        if depth + u < st.best:
            st.best = depth + u
        return
    if depth + (u + max_gain - 1) / max_gain >= st.best:
        return
    pick = -1
    pick_width = st.m + 1
    for wi in range(w):
        word = uncovered[wi]
        while word:
            b = el_ctz64(word)
            word &= word - 1
            e = (wi << 6) + b
            if st.cand_len[e] < pick_width:
                pick_width = st.cand_len[e]
                pick = e
    child = st.stack + (depth + 1) * w
    for i in range(st.cand_start[pick], st.cand_start[pick] + st.cand_len[pick]):
        if st.aborted:
            return
        j = st.cand_flat[i]
        _and_not(uncovered, st.eff + j * w, child, w)
        _sc_recurse(st, child, depth + 1)


def greedy_set_cover_words(u64[:, ::1] masks, u64[::1] universe):
    """Mirror of _kernels_py.greedy_set_cover on word arrays."""
    cdef int m = masks.shape[0]
    cdef int w = masks.shape[1]
    cdef int n = w << 6
    cdef u64* uncovered = <u64*> malloc(w * sizeof(u64))
    cdef int* owner = <int*> malloc(n * sizeof(int))
    cdef list chosen = []
    cdef int j, wi, b, e, gain, best_gain, best_j
    cdef u64 word
    if uncovered == NULL or owner == NULL:
        free(uncovered)
        free(owner)
        raise MemoryError
    try:
        for wi in range(w):
            uncovered[wi] = universe[wi]
        while not _is_zero(uncovered, w):
            best_gain = 0
            best_j = -1
            for j in range(m):
                gain = _popcount_and(&masks[j, 0], uncovered, w)
                if gain > best_gain:
                    best_gain = gain
                    best_j = j
            if best_gain == 0:
                raise ValueError("pieces do not cover the universe")
            if best_gain == 1:
                # every piece gains at most one element: assign each uncovered
                # element its lowest-index owner
                for e in range(n):
                    owner[e] = -1
                for j in range(m):
                    for wi in range(w):
                        word = masks[j, wi] & uncovered[wi]
                        while word:
                            b = el_ctz64(word)
                            word &= word - 1
                            e = (wi << 6) + b
                            if owner[e] < 0:
                                owner[e] = j
                for wi in range(w):
                    word = uncovered[wi]
                    while word:
                        b = el_ctz64(word)
                        word &= word - 1
                        chosen.append(owner[(wi << 6) + b])
                break
            chosen.append(best_j)
            for wi in range(w):
                uncovered[wi] &= ~masks[best_j, wi]
        return chosen
    finally:
        free(uncovered)
        free(owner)


def set_cover_exact_words(u64[:, ::1] masks, u64[::1] universe, long long budget):
    """Mirror of _kernels_py.set_cover_exact on word arrays."""
    cdef int m = masks.shape[0]
    cdef int w = masks.shape[1]
    cdef int n = w << 6
    cdef SCState st
    cdef int i, j, wi, b, e, total, pos
    cdef u64 word
    cdef list greedy = greedy_set_cover_words(masks, universe)
    cdef long long[:] order_view

    st.m = m
    st.w = w
    st.best = len(greedy)
    st.nodes = 0
    st.budget = budget
    st.aborted = False

    st.eff = <u64*> malloc(m * w * sizeof(u64))
    st.stack = <u64*> malloc((m + 2) * w * sizeof(u64))
    st.cand_start = <int*> malloc((n + 1) * sizeof(int))
    st.cand_len = <int*> malloc(n * sizeof(int))
    st.order = <int*> malloc(m * sizeof(int))
    st.sizes = <int*> malloc(m * sizeof(int))
    st.cand_flat = NULL
    if (st.eff == NULL or st.stack == NULL or st.cand_start == NULL
            or st.cand_len == NULL or st.order == NULL or st.sizes == NULL):
        free(st.eff); free(st.stack); free(st.cand_start); free(st.cand_len)
        free(st.order); free(st.sizes)
        raise MemoryError
    try:
        for j in range(m):
            for wi in range(w):
                st.eff[j * w + wi] = masks[j, wi] & universe[wi]

        sizes_np = np.empty(m, dtype=np.int64)
        for j in range(m):
            sizes_np[j] = _popcount(st.eff + j * w, w)
            st.sizes[j] = <int> sizes_np[j]
        # descending size, index breaks ties: stable argsort on -size
        order_np = np.argsort(-sizes_np, kind="stable").astype(np.int64)
        order_view = order_np
        for i in range(m):
            st.order[i] = <int> order_view[i]
        st.max_static = int(sizes_np.max()) if m > 0 else 0

        total = 0
        for j in range(m):
            total += st.sizes[j]
        st.cand_flat = <int*> malloc((total if total > 0 else 1) * sizeof(int))
        if st.cand_flat == NULL:
            raise MemoryError
        for e in range(n):
            st.cand_len[e] = 0
        for i in range(m):
            j = st.order[i]
            for wi in range(w):
                word = st.eff[j * w + wi]
                while word:
                    b = el_ctz64(word)
                    word &= word - 1
                    st.cand_len[(wi << 6) + b] += 1
        st.cand_start[0] = 0
        for e in range(n):
            st.cand_start[e + 1] = st.cand_start[e] + st.cand_len[e]
        fill = <int*> malloc((n if n > 0 else 1) * sizeof(int))
        if fill == NULL:
            raise MemoryError
        for e in range(n):
            fill[e] = st.cand_start[e]
        for i in range(m):
            j = st.order[i]
            for wi in range(w):
                word = st.eff[j * w + wi]
                while word:
                    b = el_ctz64(word)
                    word &= word - 1
                    e = (wi << 6) + b
                    st.cand_flat[fill[e]] = j
                    fill[e] += 1
        free(fill)

        for wi in range(w):
            st.stack[wi] = universe[wi]
        with nogil:
            _sc_recurse(&st, st.stack, 0)
        return st.best, not st.aborted, st.nodes
    finally:
        free(st.eff)
        free(st.stack)
        free(st.cand_start)
        free(st.cand_len)
        free(st.cand_flat)
        free(st.order)
        free(st.sizes)


def triangle_violation(const double[:, ::1] mat, double tol):
    """First (i, j, k) with mat[i,k] > mat[i,j] + mat[j,k] + tol, or None."""
    cdef Py_ssize_t n = mat.shape[0]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t fi = -1, fj = -1, fk = -1
    cdef double dij
    cdef bint found = False
    with nogil:
        for i in range(n):
            if found:
                break
            for j in range(n):
                if found:
                    break
                dij = mat[i, j]
                for k in range(n):
                    if mat[i, k] > dij + mat[j, k] + tol:
                        fi = i; fj = j; fk = k
                        found = True
                        break
    if found:
        return int(fi), int(fj), int(fk)
    return None


# ---------------------------------------------------------------------------
# independent set
# ---------------------------------------------------------------------------

cdef struct MISState:
    int n
    int w
    u64* adj
    int best
    long long nodes
    long long budget
    bint aborted
    u64* stack
    u64* cliques
    u64* iso


cdef int _clique_cover_bound(MISState* st, u64* remaining, int limit) nogil:
    # stops as soon as the bound provably cannot prune (count > limit)
    cdef int w = st.w
    cdef int count = 0, wi, b, v, idx, k
    cdef u64 word
    cdef bint placed
    for wi in range(w):
        word = remaining[wi]
        while word:
            b = el_ctz64(word)
            word &= word - 1
            v = (wi << 6) + b
            placed = False
            for idx in range(count):
                if _and_not_zero(st.cliques + idx * w, st.adj + v * w, w):
                    st.cliques[idx * w + wi] |= (<u64>1) << b
                    placed = True
                    break
            if not placed:
                for k in range(w):
                    st.cliques[count * w + k] = 0
                st.cliques[count * w + wi] = (<u64>1) << b
                count += 1
                if count > limit:
                    return limit + 1
    return count


cdef void _mis_recurse(MISState* st, u64* remaining, int size, int depth) nogil:
    cdef int w = st.w
    cdef int wi, b, v, d, pick, pick_deg
    cdef u64 word
    cdef u64* child

    st.nodes += 1
    if st.nodes > st.budget:
        st.aborted = True
        return
    for wi in range(w):
        st.iso[wi] = 0
    for wi in range(w):
        word = remaining[wi]
        while word:
            b = el_ctz64(word)
            word &= word - 1
            v = (wi << 6) + b
            if _popcount_and(st.adj + v * w, remaining, w) == 0:
                st.iso[wi] |= (<u64>1) << b
    if not _is_zero(st.iso, w):
        size += _popcount(st.iso, w)
        for wi in range(w):
            remaining[wi] &= ~st.iso[wi]
    if size > st.best:
        st.best = size
    if _is_zero(remaining, w):
        return
    if size + _popcount(remaining, w) <= st.best:
        return
    if size + _clique_cover_bound(st, remaining, st.best - size) <= st.best:
        return
    pick = -1
    pick_deg = -1
    for wi in range(w):
        word = remaining[wi]
        while word:
            b = el_ctz64(word)
            word &= word - 1
            v = (wi << 6) + b
            d = _popcount_and(st.adj + v * w, remaining, w)
            if d > pick_deg:
                pick_deg = d
                pick = v
    child = st.stack + (depth + 1) * w
    _and_not(remaining, st.adj + pick * w, child, w)
    child[pick >> 6] &= ~((<u64>1) << (pick & 63))
    _mis_recurse(st, child, size + 1, depth + 1)
    if st.aborted:
        return
    memcpy(child, remaining, w * sizeof(u64))
    child[pick >> 6] &= ~((<u64>1) << (pick & 63))
    _mis_recurse(st, child, size, depth + 1)


def greedy_independent_set_words(u64[:, ::1] adj, int n):
    """Mirror of _kernels_py.greedy_independent_set on word arrays."""
    cdef int w = adj.shape[1]
    cdef u64* remaining = <u64*> malloc(w * sizeof(u64))
    cdef u64* isolated = <u64*> malloc(w * sizeof(u64))
    cdef list chosen = []
    cdef int wi, b, v, d, best_v, best_d
    cdef u64 word
    cdef bint any_iso
    if remaining == NULL or isolated == NULL:
        free(remaining)
        free(isolated)
        raise MemoryError
    try:
        for wi in range(w):
            remaining[wi] = 0
        for v in range(n):
            remaining[v >> 6] |= (<u64>1) << (v & 63)
        while not _is_zero(remaining, w):
            any_iso = False
            best_v = -1
            best_d = n + 1
            for wi in range(w):
                isolated[wi] = 0
            for wi in range(w):
                word = remaining[wi]
                while word:
                    b = el_ctz64(word)
                    word &= word - 1
                    v = (wi << 6) + b
                    d = _popcount_and(&adj[v, 0], remaining, w)
                    if d == 0:
                        isolated[wi] |= (<u64>1) << b
                        any_iso = True
                    elif d < best_d:
                        best_d = d
                        best_v = v
            if any_iso:
                for wi in range(w):
                    word = isolated[wi]
                    while word:
                        b = el_ctz64(word)
                        word &= word - 1
                        chosen.append((wi << 6) + b)
                for wi in range(w):
                    remaining[wi] &= ~isolated[wi]
                continue
            chosen.append(best_v)
            for wi in range(w):
                remaining[wi] &= ~adj[best_v, wi]
            remaining[best_v >> 6] &= ~((<u64>1) << (best_v & 63))
        return chosen
    finally:
        free(remaining)
        free(isolated)


def independent_set_exact_words(u64[:, ::1] adj, int n, long long budget):
    """Mirror of _kernels_py.independent_set_exact on word arrays."""
    cdef int w = adj.shape[1]
    cdef MISState st
    cdef int wi, v

    st.n = n
    st.w = w
    st.best = len(greedy_independent_set_words(adj, n))
    st.nodes = 0
    st.budget = budget
    st.aborted = False

    st.adj = <u64*> malloc(n * w * sizeof(u64)) if n > 0 else <u64*> malloc(sizeof(u64))
    st.stack = <u64*> malloc((n + 2) * w * sizeof(u64))
    st.cliques = <u64*> malloc((n if n > 0 else 1) * w * sizeof(u64))
    st.iso = <u64*> malloc(w * sizeof(u64))
    if st.adj == NULL or st.stack == NULL or st.cliques == NULL or st.iso == NULL:
        free(st.adj); free(st.stack); free(st.cliques); free(st.iso)
        raise MemoryError
    try:
        for v in range(n):
            for wi in range(w):
                st.adj[v * w + wi] = adj[v, wi]
        for wi in range(w):
            st.stack[wi] = 0
        for v in range(n):
            st.stack[v >> 6] |= (<u64>1) << (v & 63)
        with nogil:
            _mis_recurse(&st, st.stack, 0, 0)
        return st.best, not st.aborted, st.nodes
    finally:
        free(st.adj)
        free(st.stack)
        free(st.cliques)
        free(st.iso)
