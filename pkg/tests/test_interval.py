import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import linecoal as lc
from linecoal import kernels
from linecoal.errors import DegenerateTie, MalformedAlternation, NotRedEnded

from oracles import TieAmbiguity, brute_force_closure, random_rational_interval


def ci(*segs):
    return lc.ColoredInterval(segs)


# --- closure -----------------------------------------------------------


def test_closure_forced_merge():
    closed, trace = lc.closure(ci(("R", 3), ("B", 1), ("R", 2)))
    assert closed == ci(("R", 6))
    assert trace.counts == (0, 1, 0)
    assert trace.order == (((1, 1), lc.RED),)


def test_closure_already_closed():
    c = ci(("R", 1), ("B", 2), ("R", 3))
    closed, trace = lc.closure(c)
    assert closed == c
    assert trace.counts == (0, 0, 0)
    assert trace.order == ()


def test_closure_six_segments():
    c = ci(("R", 2), ("B", 1.5), ("R", 3), ("B", 10), ("R", 1), ("B", 4))
    closed, trace = lc.closure(c)
    assert closed == ci(("R", 6.5), ("B", 15))
    assert trace.counts == (0, 1, 0, 0, 1, 0)


def test_closure_degenerate_tie():
    with pytest.raises(DegenerateTie):
        lc.closure(ci(("R", 2), ("B", 2), ("R", 3)))


def test_closure_tie_beyond_limit_is_silent():
    c = ci(("R", 2), ("B", 2), ("R", 3))
    partial, _ = lc.closure(c, limit=1.0)
    assert partial == c


# --- is_closed ----------------------------------------------------------


def test_is_closed_cases():
    assert lc.is_closed(ci(("R", 1), ("B", 2), ("R", 3)))
    assert not lc.is_closed(ci(("R", 3), ("B", 1), ("R", 2)))
    assert lc.is_closed(ci(("B", 7)))
    assert lc.is_closed(ci(("R", 1), ("B", 5), ("R", 1)))
    assert lc.is_closed(lc.ColoredInterval())


# --- concat -------------------------------------------------------------


def test_concat_plain():
    assert lc.concat(ci(("R", 1)), ci(("B", 2))) == ci(("R", 1), ("B", 2))


def test_concat_merges_same_colour():
    out = lc.concat(ci(("R", 1), ("B", 2)), ci(("B", 3), ("R", 4)))
    assert out == ci(("R", 1), ("B", 5), ("R", 4))


def test_concat_identity():
    assert lc.concat(lc.ColoredInterval(), ci(("R", 1))) == ci(("R", 1))
    assert lc.concat(ci(("R", 1)), lc.ColoredInterval()) == ci(("R", 1))


# --- red_content --------------------------------------------------------


def test_red_content():
    assert lc.red_content(ci(("R", 5))) == 5
    assert lc.red_content(ci(("R", 3), ("B", 1), ("R", 2))) == 6
    assert lc.red_content(ci(("R", 1), ("B", 5), ("R", 1))) == 2


def test_red_content_requires_red_ends():
    with pytest.raises(NotRedEnded):
        lc.red_content(ci(("R", 1), ("B", 2)))
    with pytest.raises(NotRedEnded):
        lc.red_content(ci(("B", 2)))


# --- goodness -----------------------------------------------------------


def test_goodness_central_blue():
    rep = lc.goodness(ci(("R", 1), ("B", 8), ("R", 1)), 0.23)
    assert rep.good and rep.central_span == (1, 9) and rep.total_length == 10


def test_goodness_off_centre_blue():
    # closure of (R:6, B:4) is itself; blue starts at offset 6 > 0.23*10
    assert not lc.goodness(ci(("R", 6), ("B", 4)), 0.23).good


def test_goodness_all_red():
    assert not lc.goodness(ci(("R", 3), ("B", 1), ("R", 2)), 0.25).good


def test_goodness_all_blue_is_good():
    rep = lc.goodness(ci(("B", 7)), 0.01)
    assert rep.good and rep.central_span == (0, 7)


def test_goodness_alpha_domain():
    with pytest.raises(ValueError):
        lc.goodness(ci(("B", 1)), 0.3)
    with pytest.raises(ValueError):
        lc.goodness(ci(("B", 1)), 0.0)


def test_goodness_colour_symmetry():
    c = ci(("R", 1), ("B", 8), ("R", 1))
    flipped = lc.ColoredInterval([(1 - col, l) for col, l in c.segments])
    a = lc.goodness(c, 0.23, target_colour=lc.BLUE)
    b = lc.goodness(flipped, 0.23, target_colour=lc.RED)
    assert a == b


# --- recolour_counts ----------------------------------------------------


def test_recolour_counts_simple():
    assert lc.recolour_counts(ci(("R", 3), ("B", 1), ("R", 2))).counts == (0, 1, 0)


def test_recolour_counts_closed_input():
    assert lc.recolour_counts(ci(("R", 1), ("B", 2), ("R", 3))).counts == (0, 0, 0)


# --- brute-force oracle equivalence --------------------------------------


def _oracle_case(rng):
    while True:
        colors, lengths = random_rational_interval(rng)
        try:
            expect = brute_force_closure(colors, lengths)
        except TieAmbiguity:
            continue
        return colors, lengths, expect


def test_closure_matches_all_orders_oracle():
    rng = random.Random(2024)
    for _ in range(300):
        colors, lengths, (ec, el, ecounts) = _oracle_case(rng)
        c = lc.ColoredInterval(list(zip(colors, lengths)))
        closed, trace = lc.closure(c)
        assert list(closed.colors) == ec
        assert list(closed.lengths) == el
        assert list(trace.counts) == ecounts


def test_compiled_kernel_matches_pure_python():
    if kernels.BACKEND != "compiled":
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(7)
    for _ in range(50):
        m = int(rng.integers(2, 200))
        colors = ((np.arange(m) + rng.integers(0, 2)) % 2).astype(np.uint8)
        lengths = rng.uniform(0.01, 3.0, m)
        oc1, ol1, k1 = kernels.close_arrays(colors, lengths)
        c2, l2, k2, _ = kernels.close_generic(colors.tolist(), lengths.tolist())
        assert oc1.tolist() == c2
        assert ol1.tolist() == l2
        assert k1.tolist() == k2


# --- invariants ----------------------------------------------------------


@st.composite
def rational_intervals(draw):
    m = draw(st.integers(2, 8))
    first = draw(st.integers(0, 1))
    lens = draw(
        st.lists(
            st.fractions(min_value=Fraction(1, 16), max_value=16, max_denominator=16),
            min_size=m,
            max_size=m,
        )
    )
    colors = [(first + i) % 2 for i in range(m)]
    return colors, lens


@given(rational_intervals())
@settings(max_examples=200, deadline=None)
def test_idempotence_and_conservation(case):
    colors, lens = case
    c = lc.ColoredInterval(list(zip(colors, lens)))
    try:
        closed, _ = lc.closure(c)
    except DegenerateTie:
        return
    assert lc.is_closed(closed)
    again, trace = lc.closure(closed)
    assert again == closed and all(n == 0 for n in trace.counts)
    assert sum(closed.lengths) == sum(c.lengths)  # exact rationals


def test_count_monotone_under_embedding():
    # recolour counts never decrease when the interval is embedded (eq. for N_x)
    rng = random.Random(99)
    checked = 0
    while checked < 200:
        colors, lengths = random_rational_interval(rng, max_segments=6)
        pre_col = 1 - colors[0]
        post_col = 1 - colors[-1]
        pre = [(pre_col, Fraction(rng.randint(1, 64), rng.randint(1, 16)))]
        post = [(post_col, Fraction(rng.randint(1, 64), rng.randint(1, 16)))]
        inner = lc.ColoredInterval(list(zip(colors, lengths)))
        outer = lc.ColoredInterval(pre + list(zip(colors, lengths)) + post)
        try:
            inner_counts = lc.recolour_counts(inner).counts
            outer_counts = lc.recolour_counts(outer).counts
        except DegenerateTie:
            continue
        for a, b in zip(inner_counts, outer_counts[1:-1]):
            assert a <= b
        checked += 1


def _random_red_ended(rng, max_segments=7):
    m = rng.randrange(1, max_segments + 1, 2)  # odd count starts+ends red
    segs = [((i % 2), Fraction(rng.randint(1, 64), rng.randint(1, 16))) for i in range(m)]
    return lc.ColoredInterval(segs)


def test_red_content_concat_doubling():
    # r(C_- + B + C_+) <= 2 r(C_-) + 2 r(C_+) on random instances
    rng = random.Random(5)
    checked = 0
    while checked < 300:
        cm, cp = _random_red_ended(rng), _random_red_ended(rng)
        b = lc.ColoredInterval([(lc.BLUE, Fraction(rng.randint(1, 64), rng.randint(1, 16)))])
        try:
            lhs = lc.red_content(lc.concat(lc.concat(cm, b), cp))
            rhs = 2 * lc.red_content(cm) + 2 * lc.red_content(cp)
        except DegenerateTie:
            continue
        assert lhs <= rhs
        checked += 1


def test_red_content_k_fold_doubling():
    # r(C_1+B_1+...+C_k) <= 2^ceil(log2 k) * sum r(C_i)
    rng = random.Random(6)
    checked = 0
    while checked < 100:
        k = rng.randint(1, 16)
        parts = [_random_red_ended(rng, 5) for _ in range(k)]
        whole = parts[0]
        for p in parts[1:]:
            blue = lc.ColoredInterval(
                [(lc.BLUE, Fraction(rng.randint(1, 64), rng.randint(1, 16)))]
            )
            whole = lc.concat(lc.concat(whole, blue), p)
        try:
            lhs = lc.red_content(whole)
            rhs = (1 << math.ceil(math.log2(k))) * sum(lc.red_content(p) for p in parts)
        except DegenerateTie:
            continue
        assert lhs <= rhs
        checked += 1


def test_long_blues_swallow_red_ended():
    # |B_+-| > r(C)  =>  closure(B_- + C + B_+) is a single blue segment
    rng = random.Random(7)
    checked = 0
    while checked < 300:
        c = _random_red_ended(rng)
        try:
            rc = lc.red_content(c)
        except DegenerateTie:
            continue
        bm = rc + Fraction(rng.randint(1, 64), rng.randint(1, 16))
        bp = rc + Fraction(rng.randint(1, 64), rng.randint(1, 16))
        whole = lc.concat(
            lc.concat(lc.ColoredInterval([(lc.BLUE, bm)]), c),
            lc.ColoredInterval([(lc.BLUE, bp)]),
        )
        try:
            closed, _ = lc.closure(whole)
        except DegenerateTie:
            continue
        assert closed.colors == (lc.BLUE,)
        assert closed.lengths[0] == whole.total_length
        checked += 1


# --- cantor construction -------------------------------------------------


def test_cantor_depth_one_shape():
    c = lc.cantor_construction(1, Fraction(1, 100))
    assert c.colors == (lc.RED, lc.BLUE, lc.RED)
    assert c.lengths[1] == Fraction(1, 3) - Fraction(1, 100)
    assert sum(c.lengths) == 1


def test_cantor_closure_entirely_red():
    for depth in range(1, 11):
        c = lc.cantor_construction(depth, 0.01)
        closed, _ = lc.closure(c)
        assert closed.colors == (lc.RED,)
        assert abs(closed.lengths[0] - 1.0) < 1e-12


def test_cantor_content_ratio_growth():
    # whole closure is red (content 1); leaf red measure is (2/3 + eps)^d
    eps = Fraction(1, 100)
    for depth in (1, 4, 8):
        c = lc.cantor_construction(depth, eps)
        leaf_red = sum(l for col, l in c.segments if col == lc.RED)
        ratio = lc.red_content(c) / leaf_red
        assert ratio == (3 / (2 + 3 * eps)) ** depth
        assert ratio >= Fraction(49, 50) ** depth * Fraction(3, 2) ** depth


# --- lbound_update -------------------------------------------------------


def red_entry(*segs):
    c = lc.ColoredInterval(segs)
    return (c, lc.red_content(c))


def test_lbound_update_no_low_bounds():
    state = [red_entry(("R", 1)), (5.0, 2.0), red_entry(("R", 1))]
    assert lc.lbound_update(state, 0.5) == state


def test_lbound_update_two_red_merge():
    state = [(ci(("R", 1)), 1.0), (0.5, 0.5), (ci(("R", 1)), 1.0)]
    out = lc.lbound_update(state, 0.6)
    assert len(out) == 1
    merged, ell = out[0]
    assert ell == 4.0  # 2^ceil(log2 2) * (1 + 1)
    assert merged == ci(("R", 1), ("B", 0.5), ("R", 1))


def test_lbound_update_three_red_merge():
    state = [
        (ci(("R", 1)), 1.0),
        (0.5, 0.5),
        (ci(("R", 1)), 1.0),
        (0.5, 0.5),
        (ci(("R", 1)), 1.0),
    ]
    out = lc.lbound_update(state, 0.6)
    assert len(out) == 1
    assert out[0][1] == 12.0  # 2^ceil(log2 3) = 4 times sum 3


def test_lbound_update_blue_merge():
    state = [(5.0, 4.0), (ci(("R", 0.25)), 0.25), (7.0, 6.0)]
    out = lc.lbound_update(state, 0.5)
    assert len(out) == 1
    blue_len, ell = out[0]
    assert blue_len == 5.0 + 0.25 + 7.0
    assert ell == 10.0


def test_lbound_update_malformed():
    with pytest.raises(MalformedAlternation):
        lc.lbound_update([(ci(("R", 1)), 1.0), (ci(("R", 1)), 1.0)], 0.5)
    with pytest.raises(MalformedAlternation):
        lc.lbound_update([(ci(("R", 1), ("B", 2)), 1.0)], 0.5)


def test_lbound_update_soundness_random():
    # carried bounds stay valid against the true segments after updates
    rng = random.Random(11)
    for _ in range(50):
        entries = []
        k = rng.randint(2, 6)
        for i in range(2 * k + 1):
            if i % 2 == 0:
                c = _random_red_ended(rng, 5)
                try:
                    rc = lc.red_content(c)
                except DegenerateTie:
                    c = lc.ColoredInterval([(lc.RED, Fraction(1))])
                    rc = Fraction(1)
                entries.append((c, rc + Fraction(rng.randint(0, 3))))
            else:
                blen = Fraction(rng.randint(1, 32), rng.randint(1, 8))
                entries.append((blen, blen - Fraction(rng.randint(0, 2))))
        entries = [e for e in entries if not isinstance(e[0], Fraction) or e[1] > 0]
        try:
            out = lc.lbound_update(entries, Fraction(3, 2))
        except MalformedAlternation:
            continue
        for seg, ell in out:
            if isinstance(seg, lc.ColoredInterval):
                try:
                    assert lc.red_content(seg) <= ell
                except DegenerateTie:
                    pass
            else:
                assert ell <= seg
