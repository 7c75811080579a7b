"""Sums of i.i.d. uniforms: exact Irwin-Hall, Berry-Esseen, log-tail bounds.

The exact CDF of a sum of k uniforms is an alternating binomial sum that
cancels catastrophically in double precision once k is a few dozen, so
the exact paths here run either in rational arithmetic (small k) or in
mpmath working precision with an explicit bound on the accumulated
rounding error folded into the returned enclosure.
"""
from __future__ import annotations

import math
from fractions import Fraction

from mpmath import mp, mpf

from . import rounding
from .errors import DomainError

# Exact rational evaluation is the default up to this k; beyond it the
# alternating sum is evaluated in extended precision or bounded by
# Berry-Esseen.  (Terms grow like k^k/k!, so doubles are hopeless long
# before this point.)
K_EXACT = 64

BERRY_ESSEEN_C = 0.5751  # uniform summands, two-sided CLT error constant


def ih_cdf_unit(k: int, z) -> Fraction:
    """Exact P(U_1 + ... + U_k <= z) for U_i ~ U[0,1], as a Fraction."""
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    z = Fraction(z)
    if z <= 0:
        return Fraction(0)
    if z >= k:
        return Fraction(1)
    if 2 * z > k:
        # symmetry halves the number of alternating terms
        return 1 - ih_cdf_unit(k, k - z)
    total = Fraction(0)
    term = Fraction(1)  # C(k, j), updated incrementally
    for j in range(int(z) + 1):
        if j:
            term = term * (k - j + 1) / j
        total += (-1) ** j * term * (z - j) ** k
    return total / math.factorial(k)


def ih_tail(k: int, a: float, b: float, x: float) -> Fraction:
    """Exact P(sum of k U[a,b] >= x)."""
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    z = (Fraction(x) - k * Fraction(a)) / (Fraction(b) - Fraction(a))
    return 1 - ih_cdf_unit(k, z)


def _phi_lower(z: float) -> float:
    # standard normal CDF, directed down
    return rounding.next_down(0.5 * math.erfc(-z / math.sqrt(2)), 4)


def _phi_upper(z: float) -> float:
    return rounding.next_up(0.5 * math.erfc(-z / math.sqrt(2)), 4)


def be_tail_bounds(k: int, a: float, b: float, x: float) -> tuple:
    """Berry-Esseen enclosure of P(sum of k U[a,b] >= x)."""
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    mu = k * (a + b) / 2.0
    sigma = (b - a) * math.sqrt(k / 12.0)
    z = (x - mu) / sigma
    err = rounding.next_up(BERRY_ESSEEN_C / math.sqrt(k), 4)
    lo = max(0.0, _phi_lower(-z) - err)
    hi = min(1.0, _phi_upper(-z) + err)
    return lo, hi


def be_log_tail_lower(k: int, a: float, b: float, x: float) -> float:
    """log of the Berry-Esseen tail lower bound; -inf when vacuous."""
    lo, _ = be_tail_bounds(k, a, b, x)
    if lo <= 0.0:
        return -math.inf
    return rounding.next_down(math.log(lo), 4)


def _ih_cdf_unit_enclosure_mp(k: int, z: Fraction) -> tuple:
    """(lo, hi) float bounds on the unit Irwin-Hall CDF via mpmath.

    The alternating sum is evaluated at a working precision chosen so the
    rounding error (bounded explicitly from the largest term) is far
    below the result; the bound is widened by that error.
    """
    if z <= 0:
        return 0.0, 0.0
    if z >= k:
        return 1.0, 1.0
    nterms = int(z) + 1
    prec = 96 + int(1.7 * k)
    while True:
        with mp.workprec(prec):
            zm = mpf(z.numerator) / mpf(z.denominator)
            fact = mp.factorial(k)
            total = mpf(0)
            maxabs = mpf(0)
            binom = mpf(1)
            for j in range(nterms):
                if j:
                    binom = binom * (k - j + 1) / j
                t = binom * (zm - j) ** k
                maxabs = max(maxabs, abs(t))
                total = total - t if j % 2 else total + t
            # per-term relative rounding error <= (3k+16) ulps; the
            # factor nterms+8 covers the summation and the division
            err = (nterms + 8) * (3 * k + 16) * maxabs / fact * mpf(2) ** (1 - prec)
            val = total / fact
            if err < abs(val) * mpf("1e-6") or err < mpf("1e-330"):
                lo = float(val - err)
                hi = float(val + err)
                return max(0.0, rounding.next_down(lo, 4)), min(
                    1.0, rounding.next_up(hi, 4)
                )
        prec *= 2
        if prec > 1 << 22:  # pragma: no cover - defensive
            raise RuntimeError("Irwin-Hall precision escalation failed")


def ih_tail_enclosure(k: int, a: float, b: float, x: float) -> tuple:
    """(lo, hi) float bounds on P(sum of k U[a,b] >= x), any k.

    Rational arithmetic for k <= K_EXACT, extended precision beyond.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    z = (Fraction(x) - k * Fraction(a)) / (Fraction(b) - Fraction(a))
    if k <= K_EXACT:
        t = 1 - ih_cdf_unit(k, z)
        f = float(t)
        if Fraction(f) == t:  # exactly representable: no widening needed
            return f, f
        return max(0.0, rounding.next_down(f, 4)), min(1.0, rounding.next_up(f, 4))
    if 2 * z > k:
        # deep tail: evaluate the survival side directly via symmetry,
        # avoiding the catastrophic 1 - (1 - tiny) float cancellation
        slo, shi = _ih_cdf_unit_enclosure_mp(k, k - z)
        return max(0.0, slo), min(1.0, shi)
    clo, chi = _ih_cdf_unit_enclosure_mp(k, z)
    return max(0.0, 1.0 - chi), min(1.0, 1.0 - clo)


def ih_log_tail_lower(k: int, a: float, b: float, x: float) -> float:
    """Rigorous lower bound on ln P(sum of k U[a,b] >= x); -inf if none."""
    lo, _ = ih_tail_enclosure(k, a, b, x)
    if lo <= 0.0:
        return -math.inf
    return rounding.next_down(math.log(lo), 4)


# --- concave piecewise-linear log-tail profiles ---------------------------
#
# The log-tail s -> ln P(S_k >= s) of a sum of uniforms is concave, so a
# chord through rigorously computed lower-bound points is itself a valid
# lower bound between the points.  Profiles for k summands combine by
# sup-convolution: P(S_{k1+k2} >= s1+s2) >= P(S_{k1} >= s1) P(S_{k2} >= s2),
# and the sup-convolution of two concave piecewise-linear functions is a
# slope merge.  This gives usable log-tail lower bounds for k far beyond
# the reach of the alternating sum.


class TailProfile:
    """Concave piecewise-linear lower bound on s -> ln P(S >= s)."""

    __slots__ = ("s", "v")

    def __init__(self, s, v):
        if len(s) != len(v) or len(s) < 2:
            raise ValueError("profile needs matching s/v arrays, length >= 2")
        self.s = list(s)
        self.v = list(v)

    def value(self, s: float) -> float:
        """Lower bound at s; -inf to the right of the last knot."""
        pts, vals = self.s, self.v
        if s <= pts[0]:
            return vals[0]  # log-tail is non-increasing in s
        if s > pts[-1]:
            return -math.inf
        # binary search for the containing segment
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid] < s:
                lo = mid
            else:
                hi = mid
        t = (s - pts[lo]) / (pts[hi] - pts[lo])
        # chord between valid lower-bound points, nudged down for rounding
        return rounding.next_down(vals[lo] + t * (vals[hi] - vals[lo]), 8)


def profile_from_exact(k: int, a: float, b: float, s_lo: float, s_hi: float,
                       points: int = 33) -> TailProfile:
    """Build a profile for k summands from extended-precision evaluations."""
    if not s_lo < s_hi:
        raise ValueError("need s_lo < s_hi")
    ss, vv = [], []
    for i in range(points):
        s = s_lo + (s_hi - s_lo) * i / (points - 1)
        v = ih_log_tail_lower(k, a, b, s)
        if v == -math.inf:
            break
        ss.append(s)
        vv.append(v)
    if len(ss) < 2:
        raise ValueError("profile window lies outside the support")
    return TailProfile(ss, vv)


def supconv(p: TailProfile, q: TailProfile) -> TailProfile:
    """Sup-convolution of two concave piecewise-linear profiles.

    Classic slope-merge: segments of both profiles sorted by decreasing
    slope, concatenated from the summed left endpoints.
    """
    segs = []
    for prof in (p, q):
        for i in range(len(prof.s) - 1):
            ds = prof.s[i + 1] - prof.s[i]
            dv = prof.v[i + 1] - prof.v[i]
            segs.append((dv / ds, ds, dv))
    segs.sort(key=lambda t: -t[0])
    s0 = p.s[0] + q.s[0]
    v0 = rounding.next_down(p.v[0] + q.v[0], 4)
    ss, vv = [s0], [v0]
    for _, ds, dv in segs:
        s0 += ds
        v0 = rounding.next_down(v0 + dv, 4)
        ss.append(s0)
        vv.append(v0)
    return TailProfile(ss, vv)
