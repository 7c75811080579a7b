# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled closure kernel for float64 segment arrays.

Same contract as linecoal._closure_py.close_segments, minus merge-order
recording (the hot Monte Carlo path never needs it).  A binary heap over
(length, creation index) pops the shortest candidate; stale entries are
skipped by comparing the pushed length against the current one.
"""
import numpy as np
cimport numpy as cnp

from .errors import DegenerateTie

cnp.import_array()


cdef struct HeapItem:
    double length
    Py_ssize_t node


cdef inline void heap_push(HeapItem* heap, Py_ssize_t* size, double length, Py_ssize_t node) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    cdef HeapItem tmp
    heap[i].length = length
    heap[i].node = node
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent].length < heap[i].length or (
            heap[parent].length == heap[i].length and heap[parent].node <= heap[i].node
        ):
            break
        tmp = heap[parent]
        heap[parent] = heap[i]
        heap[i] = tmp
        i = parent


cdef inline void heap_pop(HeapItem* heap, Py_ssize_t* size) noexcept nogil:
    cdef Py_ssize_t i = 0, child
    cdef HeapItem tmp
    size[0] -= 1
    heap[0] = heap[size[0]]
    while True:
        child = 2 * i + 1
        if child >= size[0]:
            break
        if child + 1 < size[0]:
            if heap[child + 1].length < heap[child].length or (
                heap[child + 1].length == heap[child].length
                and heap[child + 1].node < heap[child].node
            ):
                child += 1
        if heap[i].length < heap[child].length or (
            heap[i].length == heap[child].length and heap[i].node <= heap[child].node
        ):
            break
        tmp = heap[i]
        heap[i] = heap[child]
        heap[child] = tmp
        i = child


def close_f64(cnp.uint8_t[::1] colors, cnp.float64_t[::1] lengths,
              limit=None, bint want_counts=True):
    """Close a float64 window.  Returns (colors, lengths, counts) arrays."""
    cdef Py_ssize_t m = lengths.shape[0]
    cdef double lim = 0.0
    cdef bint has_limit = limit is not None
    if has_limit:
        lim = limit

    out_counts = np.zeros(m, dtype=np.int64) if want_counts else None

    if m <= 2:
        return (np.asarray(colors).copy(), np.asarray(lengths).copy(), out_counts)

    # node arrays sized for originals + up to m-1 merge products
    cdef Py_ssize_t cap = 2 * m
    cdef cnp.ndarray[cnp.float64_t, ndim=1] length = np.empty(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] color = np.empty(cap, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] span_lo = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] span_hi = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prv = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] alive = np.zeros(cap, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cdiff = np.zeros(m + 1, dtype=np.int64)

    cdef double[::1] L = length
    cdef cnp.uint8_t[::1] C = color
    cdef cnp.int64_t[::1] SLO = span_lo
    cdef cnp.int64_t[::1] SHI = span_hi
    cdef cnp.int64_t[::1] P = prv
    cdef cnp.int64_t[::1] N = nxt
    cdef cnp.uint8_t[::1] A = alive
    cdef cnp.int64_t[::1] D = cdiff

    # worst case each merge pushes 3 candidates plus the m initial ones
    cdef cnp.ndarray heap_arr = np.empty(4 * m * sizeof(HeapItem), dtype=np.uint8)
    cdef HeapItem* heap = <HeapItem*> cnp.PyArray_DATA(heap_arr)
    cdef Py_ssize_t heap_size = 0

    cdef Py_ssize_t i, j, p, n, pp, nn, top
    cdef double li, lp, ln, pushed
    cdef bint tie = False

    for i in range(m):
        L[i] = lengths[i]
        C[i] = colors[i]
        SLO[i] = i
        SHI[i] = i
        P[i] = i - 1
        N[i] = i + 1 if i + 1 < m else -1
        A[i] = 1

    cdef Py_ssize_t top_count = m

    with nogil:
        for i in range(1, m - 1):
            if L[i] <= L[i - 1] and L[i] <= L[i + 1]:
                heap_push(heap, &heap_size, L[i], i)

        while heap_size > 0:
            pushed = heap[0].length
            i = heap[0].node
            heap_pop(heap, &heap_size)
            if not A[i] or L[i] != pushed:
                continue
            p = P[i]
            n = N[i]
            if p < 0 or n < 0:
                continue
            li = L[i]
            lp = L[p]
            ln = L[n]
            if li > lp or li > ln:
                continue
            if has_limit and li >= lim:
                break
            if li == lp or li == ln:
                tie = True
                break
            D[SLO[i]] += 1
            D[SHI[i] + 1] -= 1
            j = top_count
            top_count += 1
            L[j] = lp + li + ln
            C[j] = C[p]
            SLO[j] = SLO[p]
            SHI[j] = SHI[n]
            pp = P[p]
            nn = N[n]
            P[j] = pp
            N[j] = nn
            A[j] = 1
            A[p] = 0
            A[i] = 0
            A[n] = 0
            if pp >= 0:
                N[pp] = j
            if nn >= 0:
                P[nn] = j
            if pp >= 0 and nn >= 0 and L[j] <= L[pp] and L[j] <= L[nn]:
                heap_push(heap, &heap_size, L[j], j)
            if pp >= 0 and P[pp] >= 0:
                if L[pp] <= L[P[pp]] and L[pp] <= L[j]:
                    heap_push(heap, &heap_size, L[pp], pp)
            if nn >= 0 and N[nn] >= 0:
                if L[nn] <= L[j] and L[nn] <= L[N[nn]]:
                    heap_push(heap, &heap_size, L[nn], nn)

    if tie:
        raise DegenerateTie(
            "segment length tie with a neighbour during closure"
        )

    # walk the surviving list from its head
    cdef Py_ssize_t head = -1
    for i in range(top_count - 1, -1, -1):
        if A[i] and P[i] < 0:
            head = i
            break
    cdef Py_ssize_t out_n = 0
    i = head
    while i >= 0:
        out_n += 1
        i = N[i]
    out_colors = np.empty(out_n, dtype=np.uint8)
    out_lengths = np.empty(out_n, dtype=np.float64)
    cdef cnp.uint8_t[::1] OC = out_colors
    cdef double[::1] OL = out_lengths
    i = head
    j = 0
    while i >= 0:
        OC[j] = C[i]
        OL[j] = L[i]
        j += 1
        i = N[i]

    if want_counts:
        np.cumsum(cdiff[:m], out=out_counts)
    return out_colors, out_lengths, out_counts
