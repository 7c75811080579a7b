"""Analytic evolution of the bound-tracking state (a_t, lambda_t).

Red-content upper bounds follow a Pareto family with parameter a_t and
blue-length lower bounds a shifted exponential with parameter lambda_t;
one merge-and-rescale round maps (a, lambda) through the (zeta, xi)
recoloring probabilities.  A blue win is certified when a_t stays bounded
away from 1 while lambda_t grows geometrically, so the survival sum
sum_t eps/lambda_t converges below 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class LBoundState:
    a: float
    lam: float
    eps: float
    Lambda: float
    t: int = 0

    def __post_init__(self):
        if self.a < 0 or self.lam <= 0 or self.eps < 0 or self.Lambda < 0:
            raise ValueError(f"invalid state {self!r}")


@dataclass(frozen=True)
class TrajectoryReport:
    status: str  # VERIFIED | FALSIFIED | INCONCLUSIVE
    steps: int
    tail_bound: Optional[float]  # bound on sum_{t>T} eps/lambda_t when VERIFIED
    witness: Optional[dict]
    trajectory: tuple  # (t, a, lambda, zeta, xi) rows


def evolve_step(s: LBoundState) -> tuple:
    """One merge round; returns (next state, zeta, xi)."""
    zeta = -math.expm1(-s.eps / s.lam)
    g = s.a + s.Lambda * zeta
    xi = s.eps * (2 * g + 2 + s.eps) / (g + 1 + s.eps) ** 2
    a_next = g / (1 + s.eps)
    lam_next = s.lam / ((1 - xi) * (1 + s.eps))
    return replace(s, a=a_next, lam=lam_next, t=s.t + 1), zeta, xi


def certify_trajectory(s0: LBoundState, delta: float,
                       max_steps: int = 10_000) -> TrajectoryReport:
    """Iterate until the blue-win conditions are established or broken.

    VERIFIED requires a_t <= 1 - delta throughout, the growth ratio
    lambda'/lambda >= 1 + eps^2/2 at every step, and a point where the
    geometric bound on the remaining survival sum drops below 1.
    """
    if not 0 < delta < 1:
        raise ValueError(f"need delta in (0, 1), got {delta}")
    ratio_floor = 1 + s0.eps**2 / 2
    rows = []
    s = s0
    for _ in range(max_steps):
        if s.a > 1 - delta:
            return TrajectoryReport(
                "FALSIFIED", s.t, None,
                {"t": s.t, "a": s.a, "limit": 1 - delta}, tuple(rows))
        nxt, zeta, xi = evolve_step(s)
        rows.append((s.t, s.a, s.lam, zeta, xi))
        ratio = nxt.lam / s.lam
        if ratio < ratio_floor:
            return TrajectoryReport(
                "FALSIFIED", s.t, None,
                {"t": s.t, "ratio": ratio, "floor": ratio_floor}, tuple(rows))
        if ratio_floor > 1:
            # once the inductive preconditions hold they self-perpetuate
            # (a stays <= 1-delta, every later ratio >= 1+eps^2/2), so the
            # remaining survival sum is geometric:
            # sum_{t'>t} eps/lambda_t' <= (eps/lambda) * r/(r-1)
            sustained = (nxt.a <= 1 - delta
                         and nxt.lam >= s0.Lambda / (1 - delta)
                         and s0.eps < delta / 2)
            tail = (s0.eps / nxt.lam) * ratio_floor / (ratio_floor - 1)
            if sustained and tail < 1.0:
                return TrajectoryReport("VERIFIED", nxt.t, tail, None,
                                        tuple(rows))
        s = nxt
    return TrajectoryReport("INCONCLUSIVE", s.t, None, None, tuple(rows))


def reddom_empirical(a: float, eps: float, Lambda: float, samples: int,
                     grid, master_seed: int = 2024) -> dict:
    """Monte Carlo check of the geometric-batch domination bound.

    Samples Z = 2^ceil(log2 Y) * sum_{i<=Y} X_i with Y geometric on
    {1,2,...} hitting 1 with probability 1-eps and X_i Pareto(a), and
    compares the empirical tail with the Pareto(a + Lambda*eps) tail at
    each grid point.  Returns the worst (empirical - analytic) excess and
    its location, with per-point standard errors.
    """
    if not 0 <= a <= 1:
        raise ValueError(f"need a in [0, 1], got {a}")
    if not 0 < eps < 1:
        raise ValueError(f"need eps in (0, 1), got {eps}")
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [master_seed, 0], dtype=np.uint64)))
    out_rows = []
    worst = -math.inf
    worst_x = None
    worst_sigma = 0.0
    block = 10**6
    # accumulate per-grid exceedance counts over blocks to bound memory
    counts = np.zeros(len(grid), dtype=np.int64)
    done = 0
    while done < samples:
        m = min(block, samples - done)
        y = 1 + np.floor(np.log1p(-rng.random(m)) / math.log(eps)).astype(np.int64) \
            if eps > 0 else np.ones(m, dtype=np.int64)
        total = int(y.sum())
        u = 1.0 - rng.random(total)
        x = (a + 1.0) / np.sqrt(u) - a
        cs = np.concatenate(([0.0], np.cumsum(x)))
        ends = np.cumsum(y)
        sums = cs[ends] - cs[ends - y]
        z = np.exp2(np.ceil(np.log2(y))) * sums
        for j, gx in enumerate(grid):
            counts[j] += int((z >= gx).sum())
        done += m
    ap = a + Lambda * eps
    for j, gx in enumerate(grid):
        emp = counts[j] / samples
        analytic = 1.0 if gx <= 1 else ((ap + 1) / (ap + gx)) ** 2
        sigma = math.sqrt(max(emp * (1 - emp), 1e-12) / samples)
        excess = emp - analytic
        out_rows.append({"x": gx, "empirical": emp, "analytic": analytic,
                         "excess": excess, "sigma": sigma})
        if excess > worst:
            worst, worst_x, worst_sigma = excess, gx, sigma
    return {"max_excess": worst, "at": worst_x, "sigma": worst_sigma,
            "rows": out_rows}


def trajectory_to_csv(report: TrajectoryReport) -> str:
    lines = ["t,a,lambda,zeta,xi"]
    for t, av, lam, zeta, xi in report.trajectory:
        lines.append(f"{t},{av!r},{lam!r},{zeta!r},{xi!r}")
    return "\n".join(lines) + "\n"


def report_to_json(report: TrajectoryReport, extra: Optional[dict] = None) -> str:
    doc = {
        "status": report.status,
        "steps": report.steps,
        "tail_bound": report.tail_bound,
        "witness": report.witness,
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2)
