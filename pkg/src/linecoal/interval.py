"""Coloured-intervals and the coalescence dynamics.

A coloured-interval is an alternating sequence of red/blue segments with
positive lengths.  The recolouring rule flips a segment strictly shorter
than both neighbours to their colour, merging the three; the closure is
the unique final state under any complete sequence of recolourings, so
everything here is computed in the canonical shortest-first order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import kernels
from .errors import DegenerateTie, MalformedAlternation, NotRedEnded

RED = 0
BLUE = 1

_COLOUR_CODE = {"R": RED, "B": BLUE, "r": RED, "b": BLUE, RED: RED, BLUE: BLUE}
_COLOUR_NAME = {RED: "R", BLUE: "B"}


class ColoredInterval:
    """Immutable alternating sequence of (colour, length) segments."""

    __slots__ = ("colors", "lengths")

    def __init__(self, segments: Sequence[tuple] = (), check_nondegenerate: bool = False):
        colors = []
        lengths = []
        for colour, length in segments:
            try:
                code = _COLOUR_CODE[colour]
            except KeyError:
                raise ValueError(f"unknown colour {colour!r}") from None
            if not length > 0:
                raise ValueError(f"segment length must be positive, got {length!r}")
            if colors and colors[-1] == code:
                raise ValueError("colours must strictly alternate")
            colors.append(code)
            lengths.append(length)
        self.colors = tuple(colors)
        self.lengths = tuple(lengths)
        if check_nondegenerate:
            # non-degeneracy is operational: a full closure must not tie
            closure(self)

    @classmethod
    def from_arrays(cls, colors, lengths) -> "ColoredInterval":
        c = object.__new__(cls)
        c.colors = tuple(int(x) for x in colors)
        c.lengths = tuple(float(x) for x in lengths)
        return c

    @property
    def segments(self):
        return tuple(zip(self.colors, self.lengths))

    @property
    def total_length(self):
        return sum(self.lengths)

    @property
    def is_red_ended(self) -> bool:
        return bool(self.colors) and self.colors[0] == RED and self.colors[-1] == RED

    def __len__(self):
        return len(self.colors)

    def __eq__(self, other):
        return (
            isinstance(other, ColoredInterval)
            and self.colors == other.colors
            and self.lengths == other.lengths
        )

    def __hash__(self):
        return hash((self.colors, self.lengths))

    def __repr__(self):
        body = ", ".join(
            f"{_COLOUR_NAME[c]}:{l}" for c, l in zip(self.colors, self.lengths)
        )
        return f"ColoredInterval({body})"


@dataclass(frozen=True)
class RecolourTrace:
    counts: tuple  # per-original-segment recolour counts
    order: tuple   # ((lo, hi) original-index range, new colour) per merge


@dataclass(frozen=True)
class GoodnessReport:
    good: bool
    central_span: Optional[tuple]  # (left offset, right offset) of the central segment
    total_length: float


def closure(c: ColoredInterval, limit=None) -> tuple[ColoredInterval, RecolourTrace]:
    """Unique final state plus the canonical shortest-first merge trace."""
    oc, ol, counts, order = kernels.close_generic(
        list(c.colors), list(c.lengths), limit=limit, record_order=True
    )
    out = object.__new__(ColoredInterval)
    out.colors = tuple(oc)
    out.lengths = tuple(ol)
    return out, RecolourTrace(counts=tuple(counts), order=tuple(order))


def is_closed(c: ColoredInterval) -> bool:
    """True iff segment lengths are unimodal (no local minimum)."""
    L = c.lengths
    i, n = 1, len(L)
    while i < n and L[i] >= L[i - 1]:
        i += 1
    while i < n and L[i] <= L[i - 1]:
        i += 1
    return i >= n


def concat(a: ColoredInterval, b: ColoredInterval) -> ColoredInterval:
    if not a.colors:
        return b
    if not b.colors:
        return a
    out = object.__new__(ColoredInterval)
    if a.colors[-1] == b.colors[0]:
        out.colors = a.colors + b.colors[1:]
        out.lengths = (
            a.lengths[:-1] + (a.lengths[-1] + b.lengths[0],) + b.lengths[1:]
        )
    else:
        out.colors = a.colors + b.colors
        out.lengths = a.lengths + b.lengths
    return out


def red_content(c: ColoredInterval):
    """Total red length in the closure of a red-ended interval."""
    if not c.is_red_ended:
        raise NotRedEnded("red content is defined for red-ended intervals only")
    closed, _ = closure(c)
    return sum(l for col, l in zip(closed.colors, closed.lengths) if col == RED)


def goodness(c: ColoredInterval, alpha, target_colour: int = BLUE) -> GoodnessReport:
    """Is there a central target-colour segment within alpha*|C| of both ends?"""
    if not 0 < alpha <= 0.25:
        raise ValueError(f"alpha must be in (0, 1/4], got {alpha!r}")
    closed, _ = closure(c)
    total = closed.total_length
    slack = alpha * total
    offset = 0
    for col, length in zip(closed.colors, closed.lengths):
        if col == target_colour:
            left, right = offset, offset + length
            if left <= slack and total - right <= slack:
                return GoodnessReport(True, (left, right), total)
        offset += length
    return GoodnessReport(False, None, total)


def recolour_counts(c: ColoredInterval) -> RecolourTrace:
    _, trace = closure(c)
    return trace


def cantor_construction(depth: int, eps) -> ColoredInterval:
    """Unit red interval with recursive slightly-sub-middle-third blue insertions.

    Each level replaces a red piece of width w by red, blue of width
    (1/3 - eps)*w, red; the closure is entirely red, while the leaf red
    measure shrinks like (2/3 + eps)^depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not 0 < eps < 1 / 3:
        raise ValueError("eps must lie in (0, 1/3)")

    segs = []

    def build(w, d):
        if d == 0:
            segs.append((RED, w))
            return
        blue = w * (1 - 3 * eps) / 3
        half = (w - blue) / 2
        build(half, d - 1)
        segs.append((BLUE, blue))
        build(half, d - 1)

    build(eps * 0 + 1, depth)  # promotes 1 to the type of eps (Fraction-friendly)
    return ColoredInterval(segs)


# --- the bound-tracking update -------------------------------------------

BoundEntry = tuple  # (ColoredInterval red-ended | blue length, bound ell)


def _is_red_entry(entry: BoundEntry) -> bool:
    return isinstance(entry[0], ColoredInterval)


def _check_alternation(state):
    for idx, entry in enumerate(state):
        if not (isinstance(entry, tuple) and len(entry) == 2):
            raise MalformedAlternation(f"entry {idx} is not a (segment, bound) pair")
        if _is_red_entry(entry):
            if not entry[0].is_red_ended:
                raise MalformedAlternation(f"entry {idx} interval is not red-ended")
        if idx and _is_red_entry(entry) == _is_red_entry(state[idx - 1]):
            raise MalformedAlternation(
                f"entries {idx - 1} and {idx} have the same kind; must alternate"
            )


def _merge_reds(state, ell0):
    """Absorb low-bound blues between red-ended entries into one red entry.

    The merged bound 2^ceil(log2 m) * sum(ell_i) over the m reds stays a
    valid upper bound on the red content of the concatenation.
    """
    out = []
    i = 0
    n = len(state)
    while i < n:
        entry = state[i]
        if not _is_red_entry(entry):
            out.append(entry)
            i += 1
            continue
        j = i
        while j + 2 < n and state[j + 1][1] <= ell0 and _is_red_entry(state[j + 2]):
            j += 2
        if j == i:
            out.append(entry)
            i += 1
            continue
        merged = state[i][0]
        red_ells = [state[i][1]]
        for k in range(i + 1, j + 1, 2):
            blue_len = state[k][0]
            merged = concat(merged, ColoredInterval([(BLUE, blue_len)]))
            merged = concat(merged, state[k + 1][0])
            red_ells.append(state[k + 1][1])
        m = len(red_ells)
        new_ell = (1 << math.ceil(math.log2(m))) * sum(red_ells)
        out.append((merged, new_ell))
        i = j + 1
    return out


def _merge_blues(state, ell0):
    """Absorb low-bound red entries between blues into one blue entry.

    The red-ended piece coalesces blue between long blues, so the summed
    blue bounds remain a valid lower bound on the merged blue length.
    """
    out = []
    i = 0
    n = len(state)
    while i < n:
        entry = state[i]
        if _is_red_entry(entry):
            out.append(entry)
            i += 1
            continue
        j = i
        while j + 2 < n and state[j + 1][1] <= ell0 and not _is_red_entry(state[j + 2]):
            j += 2
        if j == i:
            out.append(entry)
            i += 1
            continue
        total = state[i][0]
        new_ell = state[i][1]
        for k in range(i + 1, j + 1, 2):
            total += state[k][0].total_length + state[k + 1][0]
            new_ell += state[k + 1][1]
        out.append((total, new_ell))
        i = j + 1
    return out


def lbound_update(state, ell0):
    """One round of the bound-tracking merge with threshold ell0.

    Entries alternate (red-ended ColoredInterval, upper bound on red
    content) and (blue length, lower bound on that length).  Passes are
    iterated to a fixed point; interior entries then all carry bounds
    above ell0 (a lone low entry at a window boundary may survive).
    """
    _check_alternation(state)
    cur = list(state)
    while True:
        nxt = _merge_blues(_merge_reds(cur, ell0), ell0)
        if len(nxt) == len(cur):
            return nxt
        cur = nxt
