"""Pure-Python closure kernel.

Works on any totally ordered numeric length type (floats in production,
Fractions in exact test mode).  The compiled kernel in _closurekernel.pyx
implements the identical contract for float64 arrays; linecoal.kernels
selects between them at import time.

The dynamics: a segment strictly shorter than both neighbours is
recoloured and the three segments merge.  Segments are processed
shortest-first (the canonical order), which by the order-independence of
the process yields the unique closure.
"""
import heapq

from .errors import DegenerateTie

RED = 0
BLUE = 1


def close_segments(colors, lengths, limit=None, record_order=False):
    """Run the coalescence to completion (or up to a length limit).

    Args:
        colors: sequence of 0/1 colour codes, strictly alternating.
        lengths: sequence of positive lengths, same size.
        limit: if given, only segments of length < limit are recoloured.
        record_order: also return the merge order.

    Returns:
        (out_colors, out_lengths, counts, order) where counts[i] is the
        number of times original segment i was recoloured and order is a
        list of ((lo, hi), new_colour) original-index ranges, or None.

    Raises:
        DegenerateTie: a recolouring decision hinged on an exact length tie.
    """
    m = len(lengths)
    counts_diff = [0] * (m + 1)
    order = [] if record_order else None
    if m <= 2:
        out_counts = _prefix(counts_diff, m)
        return list(colors), list(lengths), out_counts, order

    length = list(lengths)
    color = list(colors)
    span_lo = list(range(m))
    span_hi = list(range(m))
    prev = [i - 1 for i in range(m)]
    nxt = [i + 1 for i in range(m)]
    nxt[m - 1] = -1
    alive = [True] * m

    heap = []

    def maybe_push(i):
        p, n = prev[i], nxt[i]
        if p < 0 or n < 0:
            return
        if length[i] <= length[p] and length[i] <= length[n]:
            heapq.heappush(heap, (length[i], i, length[i]))

    for i in range(m):
        maybe_push(i)

    while heap:
        key_len, i, pushed_len = heapq.heappop(heap)
        if not alive[i] or length[i] != pushed_len:
            continue
        p, n = prev[i], nxt[i]
        if p < 0 or n < 0:
            continue
        li, lp, ln = length[i], length[p], length[n]
        if not (li <= lp and li <= ln):
            continue  # stale: a neighbour shrank? cannot happen, but cheap
        if limit is not None and li >= limit:
            break  # heap is min-ordered: every remaining candidate is >= limit
        if li == lp or li == ln:
            raise DegenerateTie(
                f"segment of length {li!r} ties with a neighbour during closure"
            )
        # merge p, i, n into a new segment carrying index `seq`
        new_color = color[p]
        counts_diff[span_lo[i]] += 1
        counts_diff[span_hi[i] + 1] -= 1
        if record_order:
            order.append(((span_lo[i], span_hi[i]), new_color))
        new_len = lp + li + ln
        j = len(length)
        length.append(new_len)
        color.append(new_color)
        span_lo.append(span_lo[p])
        span_hi.append(span_hi[n])
        pp, nn = prev[p], nxt[n]
        prev.append(pp)
        nxt.append(nn)
        alive.append(True)
        alive[p] = alive[i] = alive[n] = False
        if pp >= 0:
            nxt[pp] = j
        if nn >= 0:
            prev[nn] = j
        maybe_push(j)
        if pp >= 0:
            maybe_push(pp)
        if nn >= 0:
            maybe_push(nn)

    out_colors, out_lengths = [], []
    # find head
    head = -1
    for i in range(len(alive) - 1, -1, -1):
        if alive[i] and prev[i] < 0:
            head = i
            break
    i = head
    while i >= 0:
        out_colors.append(color[i])
        out_lengths.append(length[i])
        i = nxt[i]
    return out_colors, out_lengths, _prefix(counts_diff, m), order


def _prefix(diff, m):
    out = []
    acc = 0
    for i in range(m):
        acc += diff[i]
        out.append(acc)
    return out
