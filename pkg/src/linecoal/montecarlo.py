"""Deterministic Monte Carlo: window trials, q estimates, exact binomials.

Each trial owns a counter-based stream keyed by (master_seed, trial_index),
so results are bit-identical regardless of how trials are scheduled across
threads.  Windows are 2n segments starting red, as in the definition of
q(n, r); a trial is good when the closure has a central blue segment
within alpha * |C| of both ends.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .distributions import DistSpec, sample_array
from .errors import DegenerateTie
from .interval import BLUE

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrialReport:
    trial_index: int
    good: bool
    window_length: float
    closure_segment_count: int
    degenerate: bool


@dataclass(frozen=True)
class QEstimate:
    trials: int
    bad: int
    degenerate: int
    q_hat: float
    confidence_bound: tuple  # (q_star, log10 P(Bin(trials, q_star) <= bad))


def _trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    key = np.array([master_seed & _MASK64, trial_index & _MASK64],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sample_window(red: DistSpec, blue: DistSpec, n: int,
                   rng: np.random.Generator):
    reds = sample_array(red, rng, n)
    blues = sample_array(blue, rng, n)
    lengths = np.empty(2 * n)
    lengths[0::2] = reds
    lengths[1::2] = blues
    colors = np.zeros(2 * n, dtype=np.uint8)
    colors[1::2] = 1
    return colors, lengths


def _central_blue_good(colors, lengths, alpha: float) -> bool:
    total = float(lengths.sum())
    slack = alpha * total
    right = np.cumsum(lengths)
    left = right - lengths
    ok = (colors == BLUE) & (left <= slack) & (total - right <= slack)
    return bool(ok.any())


def run_trial(red: DistSpec, blue: DistSpec, n: int, alpha: float,
              master_seed: int, trial_index: int) -> TrialReport:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = _trial_rng(master_seed, trial_index)
    colors, lengths = _sample_window(red, blue, n, rng)
    window_length = float(lengths.sum())
    try:
        oc, ol, _ = kernels.close_arrays(colors, lengths, want_counts=False)
    except DegenerateTie:
        return TrialReport(trial_index, False, window_length, 2 * n, True)
    return TrialReport(
        trial_index,
        _central_blue_good(oc, ol, alpha),
        window_length,
        len(oc),
        False,
    )


def binomial_tail(N: int, k: int, q: float) -> float:
    """log10 of P(Bin(N, q) <= k), summed exactly in log space."""
    if not 0 <= k <= N:
        raise ValueError(f"need 0 <= k <= N, got k={k}, N={N}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"need q in [0, 1], got {q}")
    if k == N or q == 0.0:
        return 0.0
    if q == 1.0:
        return -math.inf
    lq, l1q = math.log(q), math.log1p(-q)
    lognk = [math.lgamma(N + 1) - math.lgamma(i + 1) - math.lgamma(N - i + 1)
             + i * lq + (N - i) * l1q for i in range(k + 1)]
    m = max(lognk)
    s = math.fsum(math.exp(t - m) for t in lognk)
    return (m + math.log(s)) / math.log(10.0)


def estimate_q(red: DistSpec, blue: DistSpec, n: int, alpha: float,
               trials: int, master_seed: int, q_star: float,
               threads: int = 1) -> QEstimate:
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    reports = run_trials(red, blue, n, alpha, trials, master_seed, threads)
    degenerate = sum(r.degenerate for r in reports)
    good = sum(r.good for r in reports if not r.degenerate)
    effective = trials - degenerate
    bad = effective - good
    q_hat = bad / effective if effective else math.nan
    log10p = binomial_tail(trials, bad, q_star)
    return QEstimate(trials, bad, degenerate, q_hat, (q_star, log10p))


def run_trials(red: DistSpec, blue: DistSpec, n: int, alpha: float,
               trials: int, master_seed: int, threads: int = 1) -> list:
    """All trial reports, ordered by index whatever the thread count."""
    if threads <= 1:
        return [run_trial(red, blue, n, alpha, master_seed, i)
                for i in range(trials)]
    out: list = [None] * trials

    def work(i):
        out[i] = run_trial(red, blue, n, alpha, master_seed, i)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, range(trials)))
    return out


@dataclass(frozen=True)
class TypicalityEstimate:
    trials: int
    atypical: int
    eta_hat: float
    interval: tuple  # 95% Clopper-Pearson


def _cp_interval(k: int, n: int, level: float = 0.95) -> tuple:
    """Exact (Clopper-Pearson) binomial confidence interval by bisection."""
    tail = math.log10((1.0 - level) / 2.0)

    def bisect(pred):
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if pred(mid):
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    # lower endpoint: largest q with P(Bin(n,q) >= k) <= (1-level)/2
    if k == 0:
        lower = 0.0
    else:
        lower = bisect(lambda q: _log10_sf(n, k, q) <= tail)
    # upper endpoint: smallest q with P(Bin(n,q) <= k) <= (1-level)/2
    if k == n:
        upper = 1.0
    else:
        upper = bisect(lambda q: binomial_tail(n, k, q) > tail)
    return lower, upper


def _log10_sf(n: int, k: int, q: float) -> float:
    # log10 P(Bin(n, q) >= k) via the complementary lower tail
    if k <= 0:
        return 0.0
    return binomial_tail(n, n - k, 1.0 - q)


def typicality_rate(red: DistSpec, blue: DistSpec, n: int, L: float,
                    beta: float, trials: int, master_seed: int) -> TypicalityEstimate:
    """Estimate eta = P(|C| outside (L, beta L)) for 2n-segment windows."""
    if not L > 0:
        raise ValueError(f"need L > 0, got {L}")
    if not beta > 1:
        raise ValueError(f"need beta > 1, got {beta}")
    atypical = 0
    for i in range(trials):
        rng = _trial_rng(master_seed, i)
        _, lengths = _sample_window(red, blue, n, rng)
        total = float(lengths.sum())
        if not L < total < beta * L:
            atypical += 1
    eta_hat = atypical / trials
    return TypicalityEstimate(trials, atypical, eta_hat,
                              _cp_interval(atypical, trials))


# --- report serialization --------------------------------------------------


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    buf.write("trial_index,good,window_length,segments,degenerate\n")
    for r in reports:
        buf.write(f"{r.trial_index},{int(r.good)},{r.window_length!r},"
                  f"{r.closure_segment_count},{int(r.degenerate)}\n")
    return buf.getvalue()


def qestimate_to_json(est: QEstimate, extra: Optional[dict] = None) -> str:
    doc = {
        "trials": est.trials,
        "bad": est.bad,
        "degenerate": est.degenerate,
        "q_hat": est.q_hat,
        "q_star": est.confidence_bound[0],
        "log10_prob": est.confidence_bound[1],
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True)
