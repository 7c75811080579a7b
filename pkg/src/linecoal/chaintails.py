"""Rigorous log-space lower bounds on geometric compounds of uniforms.

The dominance chains need lower bounds on P(sum_{i<=Y} U_i >= s) where Y
is geometric (P(Y >= k) = rho^(k-1)) and the U_i are uniform on [a, b],
for s ranging over several orders of magnitude.  Three regimes stack:

  * exact Irwin-Hall terms (extended precision) for moderate counts,
  * Berry-Esseen normal bounds where the CLT error is affordable,
  * for very large counts, concave piecewise-linear log-tail profiles
    combined by sup-convolution (P(S_{j+k} >= s+t) >= P(S_j >= s) P(S_k >= t)),
    built by doubling from an exactly-evaluated base count.

Every path widens its floats so the result is a true lower bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rounding, uniformsum

_ERFC = np.frompyfunc(math.erfc, 1, 1)


def _nudge_down(arr):
    # directed rounding for vectorized logs: a few ulps of relative slack
    return arr - (np.abs(arr) * 4e-16 + 1e-300)


class ProfileCache:
    """Log-tail profiles for k-fold sums of U[a,b], any k >= base.

    Ladder entries hold profiles for base*2^j; an arbitrary count is the
    binary decomposition of k = q*base + r combined by sup-convolution
    with a small profile for the remainder r.  Profiles are pruned to a
    bounded knot count after every combine (sound: the true log-tail is
    concave, so chords between valid lower-bound points stay valid).
    """

    def __init__(self, a: float, b: float, m_lo: float, m_hi: float,
                 base: int = 256, points: int = 41, max_knots: int = 161,
                 exact_max: int = 1024):
        if not a < b or not a <= m_lo < m_hi <= b:
            raise ValueError("need a <= m_lo < m_hi <= b")
        self.a, self.b = a, b
        self.m_lo, self.m_hi = m_lo, m_hi
        self.base = base
        self.points = points
        self.max_knots = max_knots
        self.exact_max = exact_max
        self._ladder = {}
        self._small = {}
        self._combined = {}

    def _prune(self, prof):
        n = len(prof.s)
        if n <= self.max_knots:
            return prof
        idx = np.unique(np.linspace(0, n - 1, self.max_knots).astype(int))
        return uniformsum.TailProfile([prof.s[i] for i in idx],
                                      [prof.v[i] for i in idx])

    def _exact(self, k):
        return uniformsum.profile_from_exact(
            k, self.a, self.b, k * self.m_lo, k * self.m_hi, self.points)

    def ladder(self, j: int):
        # doubling compounds each rung's prefactor deficit proportionally
        # to the count, so the first rungs are evaluated exactly
        if j not in self._ladder:
            if self.base << j <= self.exact_max or j == 0:
                self._ladder[j] = self._exact(self.base << j)
            else:
                p = self.ladder(j - 1)
                self._ladder[j] = self._prune(uniformsum.supconv(p, p))
        return self._ladder[j]

    def small(self, r: int):
        if r not in self._small:
            self._small[r] = self._exact(r)
        return self._small[r]

    def combined(self, k: int):
        """Profile for exactly k summands (k >= base)."""
        if k < self.base:
            raise ValueError(f"profiles start at {self.base} summands")
        if k in self._combined:
            return self._combined[k]
        q, r = divmod(k, self.base)
        parts = [self.ladder(j) for j in range(q.bit_length()) if q >> j & 1]
        if r:
            parts.append(self.small(r))
        prof = parts[0]
        for p in parts[1:]:
            prof = self._prune(uniformsum.supconv(prof, p))
        if len(self._combined) > 4096:  # bound the cache across long chains
            self._combined.clear()
        self._combined[k] = prof
        return prof


@dataclass
class CompoundTailConfig:
    """Geometric compound of U[a,b]: P(Y >= k) = rho^(k-1)."""

    rho: float
    a: float
    b: float
    m_star: float            # per-summand length at the dominant count
    ih_cap: int = 420        # largest count evaluated by exact Irwin-Hall
    ih_halfwidth: int = 70   # exact window radius around the dominant count
    ih_use_below: float = math.inf  # only run exact terms when s is below this
    profile_min_s: float = math.inf
    profiles: Optional[ProfileCache] = None
    _lnrho_dn: float = field(init=False, default=0.0)
    _ln1m_dn: float = field(init=False, default=0.0)

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError(f"need rho in (0,1), got {self.rho}")
        if not 0 <= self.a < self.b:
            raise ValueError(f"need 0 <= a < b, got [{self.a}, {self.b}]")
        self._lnrho_dn = rounding.next_down(math.log(self.rho), 4)
        self._ln1m_dn = rounding.next_down(math.log1p(-self.rho), 4)

    def log_weight_dn(self, k):
        # lower bound on ln P(Y = k); ln rho < 0 so rounding it down is safe
        return rounding.next_down((k - 1) * self._lnrho_dn + self._ln1m_dn, 4)


def compound_log_tail_lower(cfg: CompoundTailConfig, s: float) -> float:
    """Rigorous lower bound on ln P(sum_{i<=Y} U_i >= s)."""
    if s <= cfg.a:
        return 0.0  # at least one summand, each at least a
    kmin = max(1, math.ceil(s / cfg.b))
    kfull = math.ceil(s / cfg.a) if cfg.a > 0 else None
    terms = []
    if kfull is not None:
        # counts with min support above s contribute their entire weight
        terms.append(rounding.next_down((kfull - 1) * cfg._lnrho_dn, 4))
    khi_open = kfull if kfull is not None else kmin + 10**7

    kstar = max(kmin, min(khi_open - 1, int(s / cfg.m_star)))
    halfwin = int(max(0.1 * kstar, 6 * math.sqrt(kstar)) + 80)
    lo = max(kmin, kstar - halfwin)
    hi = min(khi_open - 1, kstar + halfwin)

    # best lower bound per count: the BE/IH/profile windows overlap in k,
    # and summing two bounds for the same count would double-count it
    per_k = {}

    def offer(k, v):
        if v > per_k.get(k, -math.inf):
            per_k[k] = v

    if hi >= lo:
        for k, v in _be_terms(cfg, s, lo, hi):
            offer(k, v)
    if s < cfg.ih_use_below or not per_k:
        ih_lo = max(kmin, kstar - cfg.ih_halfwidth)
        ih_hi = min(khi_open - 1, kstar + cfg.ih_halfwidth, cfg.ih_cap)
        for k in range(ih_lo, ih_hi + 1):
            v = uniformsum.ih_log_tail_lower(k, cfg.a, cfg.b, s)
            if v > -math.inf:
                offer(k, cfg.log_weight_dn(k) + v - 1e-12)
    if s >= cfg.profile_min_s and cfg.profiles is not None:
        base = cfg.profiles.base
        for k in range(max(base, kstar - 2), kstar + 3):
            if k >= khi_open:
                continue
            v = cfg.profiles.combined(k).value(s)
            if v > -math.inf:
                offer(k, cfg.log_weight_dn(k) + v - 1e-12)
    terms.extend(per_k.values())
    lo_bound, _ = rounding.logsumexp_bounds(terms, terms)
    return lo_bound


def _be_terms(cfg: CompoundTailConfig, s: float, klo: int, khi: int) -> list:
    ks = np.arange(klo, khi + 1, dtype=np.float64)
    mu = ks * (cfg.a + cfg.b) / 2.0
    sigma = (cfg.b - cfg.a) * np.sqrt(ks / 12.0)
    z = (s - mu) / sigma
    phi = 0.5 * _ERFC(z / math.sqrt(2.0)).astype(np.float64)
    lb = phi - uniformsum.BERRY_ESSEEN_C / np.sqrt(ks)
    lb = lb - (np.abs(lb) * 4e-16 + 1e-300)
    mask = lb > 0
    if not mask.any():
        return []
    logs = np.log(lb[mask]) + (ks[mask] - 1) * cfg._lnrho_dn + cfg._ln1m_dn
    return list(zip(ks[mask].astype(int), _nudge_down(logs)))
