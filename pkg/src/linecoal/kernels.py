"""Closure-kernel selection.

The compiled kernel is optional; when the extension failed to build the
pure-Python implementation is used.  `close_arrays` is the hot path used
by the Monte Carlo harness; the ColoredInterval API in `interval` goes
through `close_generic` when a merge trace is requested or when lengths
are not plain floats.
"""
from __future__ import annotations

import numpy as np

from . import _closure_py

try:
    from . import _closurekernel as _fast
except ImportError:  # pragma: no cover - build-dependent
    _fast = None

BACKEND = "compiled" if _fast is not None else "python"


def close_arrays(colors, lengths, limit=None, want_counts=True):
    """Close a window given as arrays; returns (colors, lengths, counts).

    colors: uint8 array of 0 (red) / 1 (blue); lengths: float64 array.
    counts is an int64 array of per-original-segment recolour counts, or
    None when want_counts is false.
    """
    colors = np.ascontiguousarray(colors, dtype=np.uint8)
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    if _fast is not None:
        return _fast.close_f64(colors, lengths, limit, want_counts)
    oc, ol, counts, _ = _closure_py.close_segments(
        colors.tolist(), lengths.tolist(), limit=limit
    )
    return (
        np.asarray(oc, dtype=np.uint8),
        np.asarray(ol, dtype=np.float64),
        np.asarray(counts, dtype=np.int64) if want_counts else None,
    )


def close_generic(colors, lengths, limit=None, record_order=False):
    """Pure-Python closure on arbitrary numeric lengths (e.g. Fractions)."""
    return _closure_py.close_segments(
        colors, lengths, limit=limit, record_order=record_order
    )
