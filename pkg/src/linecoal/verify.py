"""Rigorous numerical verification: rectangle subdivision and dominance chains.

Three-valued logic throughout: VERIFIED needs every leaf or chain link
certified by directed-rounded enclosures; FALSIFIED needs a rigorous
pointwise violation (or a provably non-decreasing chain); anything the
budgets cannot decide is INCONCLUSIVE.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import chaintails, distributions, rounding
from .errors import DomainError, PreconditionFailed

DEFAULT_LAMBDA = 13.06207

_MAX_DEPTH = 60
_MIN_WIDTH = 1e-9


@dataclass(frozen=True)
class VerificationReport:
    status: str  # VERIFIED | FALSIFIED | INCONCLUSIVE
    description: str
    rectangles_processed: int = 0
    chain_length: int = 0
    witness: Optional[dict] = None
    slack: Optional[float] = None
    details: tuple = ()


# --- closed forms -----------------------------------------------------------


def _pareto_tail_iv(a_iv, x_iv):
    # P(X >= x) = ((a+1)/(a+x))^2 for x >= 1, X with tail index 2 and scale a
    one = (1.0, 1.0)
    return rounding.square(rounding.div(rounding.add(a_iv, one),
                                        rounding.add(a_iv, x_iv)))


def _conv_tail_iv(a_iv, x_iv):
    """Enclosure of P(X1 + X2 >= x/2) for x >= 4, via the closed form."""
    one, two = (1.0, 1.0), (2.0, 2.0)
    ap1 = rounding.add(a_iv, one)
    fourax = rounding.add(rounding.mul((4.0, 4.0), a_iv), x_iv)
    xm4 = rounding.sub(x_iv, (4.0, 4.0))
    if x_iv[0] >= 4.0:
        xm4 = (max(xm4[0], 0.0), xm4[1])
    denom2 = rounding.add(rounding.mul(two, a_iv),
                          rounding.sub(x_iv, two))  # 2a + x - 2
    num1 = rounding.mul(
        rounding.mul((8.0, 8.0), rounding.square(ap1)),
        rounding.add(rounding.square(fourax),
                     rounding.mul(rounding.mul((6.0, 6.0), ap1), xm4)))
    den1 = rounding.mul(rounding.mul(rounding.square(fourax), fourax), denom2)
    t1 = rounding.div(num1, den1)
    ratio = rounding.div(denom2, rounding.mul(two, ap1))  # >= 1 when x >= 4
    ln = rounding.log_interval((max(ratio[0], 1e-300), ratio[1]))
    ln = (max(ln[0], 0.0), ln[1])
    ap1_4 = rounding.square(rounding.square(ap1))
    t2 = rounding.mul(
        rounding.div(rounding.mul((192.0, 192.0), ap1_4),
                     rounding.square(rounding.square(fourax))),
        ln)
    lo, hi = rounding.add(t1, t2)
    return max(lo, 0.0), min(hi, 1.0)


def conv_tail_closed_form(a: float, x: float) -> float:
    """P(X1 + X2 >= x/2) for two independent tails of index 2, scale a."""
    if x < 4:
        raise DomainError(f"closed form needs x >= 4, got {x}")
    if not 0 <= a <= 1:
        raise DomainError(f"need a in [0, 1], got {a}")
    if x == 4:
        return 1.0  # both factors reduce to 1 algebraically
    lo, hi = _conv_tail_iv(rounding.point(a), rounding.point(x))
    return (lo + hi) / 2.0


# --- recursive rectangle subdivision ----------------------------------------


def _rhs_iv(Lambda, a_iv, x_iv):
    # 2 (x-1) Lambda / ((a+1)(a+x))
    one = (1.0, 1.0)
    num = rounding.mul(rounding.mul((2.0, 2.0), rounding.sub(x_iv, one)),
                       rounding.point(Lambda))
    den = rounding.mul(rounding.add(a_iv, one), rounding.add(a_iv, x_iv))
    return rounding.div(num, den)


def _point_violation(a, x, delta, Lambda):
    conv = _conv_tail_iv(rounding.point(a), rounding.point(x))
    tail = _pareto_tail_iv(rounding.point(a), rounding.point(x))
    lhs_lo = rounding.next_down(
        rounding.div(conv, tail)[0] - 1.0 + delta, 4)
    rhs_hi = _rhs_iv(Lambda, rounding.point(a), rounding.point(x))[1]
    return lhs_lo > rhs_hi, lhs_lo - rhs_hi


def verify_e1(Lambda: float, delta: float,
              a_range=(0.0, 1.0), x_range=(4.0, 100.0),
              collect_leaves: bool = False) -> VerificationReport:
    """Certify conv/tail - 1 + delta <= 2(x-1)Lambda/((a+1)(a+x)) on a box."""
    if Lambda <= 0 or delta <= 0:
        raise DomainError("need Lambda > 0 and delta > 0")
    a1, a2 = map(float, a_range)
    x1, x2 = map(float, x_range)
    if not (0 <= a1 <= a2 <= 1 and 4 <= x1 <= x2):
        raise DomainError("need a-range within [0,1] and x-range within [4,inf)")
    desc = f"(e:1) on [{a1},{a2}]x[{x1},{x2}], Lambda={Lambda}, delta={delta}"
    # the corner-bound gap is ~8x more sensitive to a-width than x-width,
    # so "longer normalized side" uses a 1:8 aspect, not the raw spans
    x_scale = 8.0
    stack = [(a1, a2, x1, x2, 0)]
    processed = 0
    min_slack = math.inf
    leaves = []
    conv_memo, tail_memo = {}, {}

    def conv_hi(a, x):
        key = (a, x)
        if key not in conv_memo:
            conv_memo[key] = _conv_tail_iv(rounding.point(a),
                                           rounding.point(x))
        return conv_memo[key][1]

    def tail_lo(a, x):
        key = (a, x)
        if key not in tail_memo:
            tail_memo[key] = _pareto_tail_iv(rounding.point(a),
                                             rounding.point(x))
        return tail_memo[key][0]

    while stack:
        ra1, ra2, rx1, rx2, depth = stack.pop()
        processed += 1
        lhs_hi = rounding.next_up(
            conv_hi(ra2, rx1) / tail_lo(ra1, rx2) - 1.0 + delta, 4)
        rhs_lo = _rhs_iv(Lambda, rounding.point(ra2), rounding.point(rx1))[0]
        if lhs_hi <= rhs_lo:
            min_slack = min(min_slack, rhs_lo - lhs_hi)
            if collect_leaves:
                leaves.append((ra1, ra2, rx1, rx2))
            continue
        # undecided: look for a rigorous pointwise violation first
        probes = ((ra2, rx1), ((ra1 + ra2) / 2, (rx1 + rx2) / 2))
        for pa, px in probes:
            bad, margin = _point_violation(pa, px, delta, Lambda)
            if bad:
                return VerificationReport(
                    "FALSIFIED", desc, rectangles_processed=processed,
                    witness={"a": pa, "x": px, "violation": margin})
        wa = ra2 - ra1
        wx = (rx2 - rx1) / x_scale
        if depth >= _MAX_DEPTH or (ra2 - ra1 < _MIN_WIDTH
                                   and rx2 - rx1 < _MIN_WIDTH):
            return VerificationReport(
                "INCONCLUSIVE", desc, rectangles_processed=processed,
                witness={"rect": (ra1, ra2, rx1, rx2), "depth": depth})
        if wa >= wx and ra2 - ra1 >= _MIN_WIDTH:
            mid = (ra1 + ra2) / 2
            stack.append((ra1, mid, rx1, rx2, depth + 1))
            stack.append((mid, ra2, rx1, rx2, depth + 1))
        else:
            mid = (rx1 + rx2) / 2
            stack.append((ra1, ra2, rx1, mid, depth + 1))
            stack.append((ra1, ra2, mid, rx2, depth + 1))
    return VerificationReport(
        "VERIFIED", desc, rectangles_processed=processed,
        slack=min_slack, details=tuple(leaves) if collect_leaves else ())


def verify_e1_largex(Lambda: float, x0: float = 100.0) -> VerificationReport:
    """The x >= x0 branch: ratio <= 10 and (x-1)Lambda/(x+1) >= 10."""
    if x0 < 100:
        raise DomainError(f"large-x branch needs x0 >= 100, got {x0}")
    desc = f"(e:1) large-x branch at x0={x0}, Lambda={Lambda}"
    x_iv = rounding.point(x0)
    # 8 + 176/(x-2) + 192/x^3, decreasing in x, so the bound at x0 is global
    xm2 = rounding.sub(x_iv, (2.0, 2.0))
    x3 = rounding.mul(rounding.square(x_iv), x_iv)
    ratio = rounding.add(
        rounding.add((8.0, 8.0), rounding.div((176.0, 176.0), xm2)),
        rounding.div((192.0, 192.0), x3))
    # (x-1) Lambda / (x+1), increasing in x
    rhs = rounding.div(
        rounding.mul(rounding.sub(x_iv, (1.0, 1.0)), rounding.point(Lambda)),
        rounding.add(x_iv, (1.0, 1.0)))
    checks = (("ratio_bound", 10.0 - ratio[1], 10.0 - ratio[0]),
              ("rhs_floor", rhs[0] - 10.0, rhs[1] - 10.0))
    details = tuple({"name": n, "margin": lo} for n, lo, hi in checks)
    worst = min(lo for _, lo, _ in checks)
    if worst >= 0:
        return VerificationReport("VERIFIED", desc, slack=worst,
                                  details=details)
    for name, lo, hi in checks:
        if hi < 0:  # rigorously violated
            return VerificationReport(
                "FALSIFIED", desc, witness={"check": name, "x": x0,
                                            "margin": hi},
                details=details)
    return VerificationReport("INCONCLUSIVE", desc,
                              witness={"x": x0}, details=details)


# --- dominance chains --------------------------------------------------------


def geom_half_bound(p: float, a: float, b: float, x: float) -> float:
    """Lower bound 1/2 * p^(ceil(2x/(a+b)) - 1) on P(sum_{i<=Y} U_i >= x)."""
    k = max(1, math.ceil(2.0 * x / (a + b)))
    return 0.5 * p ** (k - 1)


def _log_lower(t) -> float:
    lower = getattr(t, "lower", None)
    if lower is None:
        return float(t)  # already a log lower bound
    if lower <= 0.0:
        return -math.inf
    return rounding.next_down(math.log(lower), 4)


def dominance_chain(tail_of_X: Callable, Lambda: float, x0: float,
                    floor: float, max_iters: int = 10 ** 6,
                    keep_trajectory: bool = False) -> VerificationReport:
    """Iterate x_{i+1} = -Lambda ln(lower bound of P(X >= x_i + 1)).

    The caller must have established P(X >= x+1) >= exp(-x/Lambda) for all
    x >= x0; the chain then extends that inequality down to the floor.
    """
    desc = f"dominance chain from x0={x0} to floor {floor}, Lambda={Lambda}"
    x = float(x0)
    xs = [x]
    min_step = math.inf
    for i in range(max_iters):
        loglb = _log_lower(tail_of_X(x + 1.0))
        if loglb == -math.inf:
            return VerificationReport(
                "INCONCLUSIVE", desc, chain_length=i,
                witness={"x": x, "reason": "vacuous tail bound"})
        x_next = rounding.next_up(-Lambda * loglb, 4)
        if x_next >= x:
            return VerificationReport(
                "FALSIFIED", desc, chain_length=i,
                witness={"x": x, "x_next": x_next})
        min_step = min(min_step, x - x_next)
        xs.append(x_next)
        if x_next < floor:
            return VerificationReport(
                "VERIFIED", desc, chain_length=i + 1, slack=min_step,
                details=tuple(xs) if keep_trajectory else ())
        x = x_next
    return VerificationReport("INCONCLUSIVE", desc, chain_length=max_iters,
                              witness={"x": x, "reason": "iteration budget"})


# --- the two-distribution comparison (toy model) -----------------------------


def _uniform_ldp_rate(t: float) -> float:
    """Cramer rate of U[0,1] at mean t (0 for t <= 1/2); heuristic only."""
    if t <= 0.5:
        return 0.0
    if t >= 1.0:
        return math.inf
    lo, hi = 1e-12, 750.0

    def mean_tilted(theta):
        return 1.0 / (1.0 - math.exp(-theta)) - 1.0 / theta

    for _ in range(200):
        mid = (lo + hi) / 2
        if mean_tilted(mid) < t:
            lo = mid
        else:
            hi = mid
    theta = (lo + hi) / 2
    if theta > 30:
        log_mgf = theta - math.log(theta)
    else:
        log_mgf = math.log((math.exp(theta) - 1.0) / theta)
    return theta * t - log_mgf


def _optimal_m(rho: float, a: float, b: float) -> float:
    """Per-summand length minimizing the compound tail's decay rate."""
    width = b - a
    mean = (a + b) / 2
    best_m, best_rate = mean, math.inf
    m = mean
    while m < b - 1e-9 * width:
        rate = (math.log(1 / rho)
                + _uniform_ldp_rate((m - a) / width)) / m
        if rate < best_rate:
            best_m, best_rate = m, rate
        m += width / 4096.0
    return best_m


def _check(name, ok_margin_lo, fail_margin_hi=math.inf):
    """Three-valued record from a directed-rounded margin enclosure.

    A negative lower bound alone is not a violation; FALSIFIED needs the
    margin's upper bound below zero too.
    """
    if ok_margin_lo >= 0:
        status = "VERIFIED"
    elif fail_margin_hi < 0:
        status = "FALSIFIED"
    else:
        status = "INCONCLUSIVE"
    return {"name": name, "status": status, "margin": ok_margin_lo}


def _grid_dominated(name, dist, a_param, lo, hi,
                    init_step=0.25, min_step=1e-4):
    """Check tail(dist) <= Pareto(a_param) tail on [lo, hi].

    The distribution tail is non-increasing, so tail_ub(x) <= pareto_lb(x')
    certifies the whole strip [x, x']; failed strips are bisected.
    """
    x = lo
    worst = math.inf
    while x < hi:
        t_ub = distributions.tail(dist, x).upper
        step = init_step
        while True:
            xn = min(x + step, hi)
            p_lo = _pareto_tail_iv(rounding.point(a_param),
                                   rounding.point(xn))[0]
            if t_ub <= p_lo:
                worst = min(worst, p_lo - t_ub)
                x = xn
                break
            if step <= min_step:
                t_lo = distributions.tail(dist, x).lower
                p_hi = _pareto_tail_iv(rounding.point(a_param),
                                       rounding.point(x))[1]
                if t_lo > p_hi:
                    return {"name": name, "status": "FALSIFIED",
                            "margin": p_hi - t_lo, "witness": {"x": x}}
                return {"name": name, "status": "INCONCLUSIVE",
                        "margin": p_lo - t_ub, "witness": {"x": x}}
            step /= 2
    return {"name": name, "status": "VERIFIED", "margin": worst}


def _band_tail_analytic(name, log_decay_per_x, log_offset, a_param, x_star):
    """Check C * exp(-r x) <= ((a+1)/(a+x))^2 for all x >= x_star.

    Given a rigorous lower bound r (log_decay_per_x) and upper bound on
    ln C (log_offset), it suffices that the log-margin is nonnegative at
    x_star and its slope r - 2/(a+x) stays nonnegative beyond.
    """
    a_iv, x_iv = rounding.point(a_param), rounding.point(x_star)
    log_pareto = rounding.log_interval(_pareto_tail_iv(a_iv, x_iv))
    margin_lo = rounding.next_down(
        log_pareto[0] - (log_offset - log_decay_per_x * x_star), 8)
    slope_lo = rounding.next_down(
        log_decay_per_x - 2.0 / (a_param + x_star), 8)
    return _check(name, min(margin_lo, slope_lo))


def _toy_red_config(gamma: float) -> chaintails.CompoundTailConfig:
    return chaintails.CompoundTailConfig(
        rho=1.0 / (1.0 + gamma), a=1.0, b=2.0,
        m_star=_optimal_m(1.0 / (1.0 + gamma), 1.0, 2.0),
        ih_cap=340, ih_halfwidth=45, ih_use_below=460.0)


def _toy_blue_config(gamma: float, c: float) -> chaintails.CompoundTailConfig:
    rho = (gamma - c) / (1.0 + gamma)
    m_star = _optimal_m(rho, 2.0, 2.0 + gamma)
    width = gamma
    profiles = chaintails.ProfileCache(
        2.0, 2.0 + gamma,
        max(2.0 + width / 64, m_star - 0.06 * width),
        min(2.0 + width, m_star + 0.06 * width))
    return chaintails.CompoundTailConfig(
        rho=rho, a=2.0, b=2.0 + gamma, m_star=m_star,
        ih_cap=520, ih_halfwidth=45, ih_use_below=2800.0,
        profile_min_s=8e4, profiles=profiles)


def _red_precondition(gamma: float, Lambda: float):
    """Smallest X1 with (1/2)(1+gamma)^{-ceil(2x/3)+1} >= e^{-x/Lambda}
    certified for all x >= X1; None when the rates make it impossible."""
    rate_lo = rounding.next_down(
        rounding.next_down(1.0 / Lambda, 4)
        - rounding.next_up(2.0 * math.log1p(gamma) / 3.0, 4), 4)
    if rate_lo <= 0:
        return None, rate_lo
    x1 = rounding.next_up(math.log(2.0) / rate_lo * 1.05, 4)
    return float(math.ceil(x1)), rate_lo


def _blue_precondition(cfg, Lambda: float, x0: float, n_sub: int = 256):
    """Certify P(compound >= x+1) >= e^{-x/Lambda} for all x >= x0.

    Blocks of k_J summands: P(S_{m k_J + k_r} >= x+1) is bounded below by
    m sup-convolution profile factors at s* = m_star k_J plus one remainder
    profile on the compact window [s*, 2 s*]; the per-block log-margin
    increment is positive, so only the first two block counts need checking.
    """
    prof = cfg.profiles
    kJ = prof.base * 128
    s_star = cfg.m_star * kJ
    v_star = prof.combined(kJ).value(s_star)
    lnrho = cfg._lnrho_dn  # already rounded down (it is negative)
    ln1m = cfg._ln1m_dn
    # the big products carry ulps at their own magnitude; an absolute 1e-6
    # slack dominates them all (margins here are in the hundreds)
    inc_lo = rounding.next_down(
        kJ * lnrho + v_star + rounding.next_down(s_star / Lambda, 4), 8) - 1e-6
    if inc_lo <= 0:
        return {"name": "blue_precondition", "status": "INCONCLUSIVE",
                "margin": inc_lo, "witness": {"reason": "block increment"}}
    m0 = int((x0 + 1.0) / s_star) - 1
    if m0 < 1:
        return {"name": "blue_precondition", "status": "INCONCLUSIVE",
                "margin": None, "witness": {"reason": "x0 below two blocks"}}
    worst = math.inf
    for m in (m0, m0 + 1):
        s_lo_eff = s_star if m > m0 else max(s_star, (x0 + 1.0) - m0 * s_star)
        if s_lo_eff >= 2 * s_star:
            continue
        edges = [s_lo_eff + (2 * s_star - s_lo_eff) * i / n_sub
                 for i in range(n_sub + 1)]
        for sa, sb in zip(edges, edges[1:]):
            kr = max(prof.base, round(((sa + sb) / 2) / cfg.m_star))
            f_lo = rounding.next_down(
                ln1m + (m * kJ + kr - 1) * lnrho + m * v_star
                + prof.combined(kr).value(sb)
                + rounding.next_down((m * s_star + sa - 1.0) / Lambda, 4),
                8) - 1e-6
            if f_lo < 0:
                return {"name": "blue_precondition", "status": "INCONCLUSIVE",
                        "margin": f_lo,
                        "witness": {"m": m, "s_window": (sa, sb)}}
            worst = min(worst, f_lo)
    return {"name": "blue_precondition", "status": "VERIFIED", "margin": worst}


def _aggregate(desc, checks, chain_length=0):
    slacks = [c["margin"] for c in checks if c.get("margin") is not None]
    slack = min(slacks) if slacks else None
    for c in checks:
        if c["status"] == "FALSIFIED":
            return VerificationReport(
                "FALSIFIED", desc, chain_length=chain_length,
                witness={"check": c["name"], **c.get("witness", {})},
                slack=slack, details=tuple(checks))
    for c in checks:
        if c["status"] != "VERIFIED":
            return VerificationReport(
                "INCONCLUSIVE", desc, chain_length=chain_length,
                witness={"check": c["name"], **c.get("witness", {})},
                slack=slack, details=tuple(checks))
    return VerificationReport("VERIFIED", desc, chain_length=chain_length,
                              slack=slack, details=tuple(checks))


def _chain_check(name, report):
    rec = {"name": name, "status": report.status, "margin": report.slack,
           "length": report.chain_length}
    if report.witness is not None:
        rec["witness"] = report.witness
    return rec


def _verify_toy_red(gamma: float, a: float, Lambda: float,
                    x0: float, x_star: float) -> VerificationReport:
    desc = f"toy comparison, red side, gamma={gamma}, a={a}"
    checks = []
    g_iv = rounding.point(gamma)
    one = (1.0, 1.0)
    # opposing colour's first band: density 1/(gamma(1+gamma)) on [1, 1+gamma]
    # must beat the peak comparison density 2/(a+1)
    dens = rounding.div(one, rounding.mul(g_iv, rounding.add(one, g_iv)))
    peak = rounding.div((2.0, 2.0), rounding.add(rounding.point(a), one))
    checks.append(_check("head_density",
                         rounding.next_down(dens[0] - peak[1], 4),
                         rounding.next_up(dens[1] - peak[0], 4)))
    _, blue = distributions.preset("toy", gamma=gamma, p=1.0)
    checks.append(_grid_dominated("band_grid", blue, a, 1.0 + gamma, x_star))
    # beyond x_star: bands reaching x need index >= (x+1)/(2+gamma), so the
    # tail is at most rho^((x+1)/(2+gamma) - 1) with rho = gamma/(1+gamma)
    rho = gamma / (1.0 + gamma)
    r_lo = rounding.next_down(
        rounding.next_down(-math.log(rho), 4) / (2.0 + gamma), 8)
    offset_hi = rounding.next_up(-math.log(rho) * (1.0 - 1.0 / (2.0 + gamma)), 8)
    checks.append(_band_tail_analytic("band_tail", r_lo, offset_hi, a, x_star))

    cfg = _toy_red_config(gamma)
    tail_log = lambda y: chaintails.compound_log_tail_lower(cfg, y - 1.0)
    x1, rate_lo = _red_precondition(gamma, Lambda)
    if x1 is None:
        checks.append({"name": "half_bound_precondition",
                       "status": "INCONCLUSIVE", "margin": rate_lo})
        return _aggregate(desc, checks)
    checks.append(_check("half_bound_precondition", rate_lo))
    chain_len = 0
    bridge = dominance_chain(tail_log, Lambda, x1, floor=x0)
    checks.append(_chain_check("bridge_chain", bridge))
    chain_len += bridge.chain_length
    if bridge.status == "VERIFIED":
        main = dominance_chain(tail_log, Lambda, x0, floor=1.0)
        checks.append(_chain_check("main_chain", main))
        chain_len += main.chain_length
        # below the floor x+1 <= 2, the minimum of the compound's support
        checks.append(_check("floor_support", 2.0 - (1.0 + cfg.a)))
    return _aggregate(desc, checks, chain_length=chain_len)


def _verify_toy_blue(gamma: float, c: float, a: float, Lambda: float,
                     x0: float, x_star: float) -> VerificationReport:
    desc = f"toy comparison, blue side, gamma={gamma}, c={c}, a={a}"
    if c <= 1.25:
        raise PreconditionFailed(f"need c > 5/4, got {c}")
    if gamma <= c:
        raise PreconditionFailed(f"need gamma > c, got gamma={gamma}, c={c}")
    checks = []
    one = (1.0, 1.0)
    a_iv, g_iv, c_iv = rounding.point(a), rounding.point(gamma), rounding.point(c)
    cp1 = rounding.add(c_iv, one)
    # atom: the opposing tail is 1/(c+1) on (1,2]; Pareto's minimum there
    # is ((a+1)/(a+2))^2
    atom = rounding.div(one, cp1)
    p2 = _pareto_tail_iv(a_iv, rounding.point(2.0))
    checks.append(_check("atom",
                         rounding.next_down(p2[0] - atom[1], 4),
                         rounding.next_up(p2[1] - atom[0], 4)))
    # density on [2,3]: gamma/((c+1)(1+gamma)) vs peak 2(a+1)^2/(a+2)^3
    dens = rounding.div(g_iv, rounding.mul(cp1, rounding.add(one, g_iv)))
    ap1 = rounding.add(a_iv, one)
    peak = rounding.div(
        rounding.mul((2.0, 2.0), rounding.square(ap1)),
        rounding.mul(rounding.square(rounding.add(a_iv, (2.0, 2.0))),
                     rounding.add(a_iv, (2.0, 2.0))))
    checks.append(_check("band1_density",
                         rounding.next_down(dens[0] - peak[1], 4),
                         rounding.next_up(dens[1] - peak[0], 4)))
    p = 1.0 - c / gamma
    red, blue = distributions.preset("toy", gamma=gamma, p=p)
    checks.append(_grid_dominated("band_grid", red, a, 3.0, x_star))
    # bands reaching x need index >= (x-1)/2; their total weight is
    # (1/(c+1)) (1+gamma)^{-(x-1)/2 + 1}
    r_lo = rounding.next_down(rounding.next_down(math.log1p(gamma), 4) / 2.0, 8)
    offset_hi = rounding.next_up(
        1.5 * math.log1p(gamma) - math.log(c + 1.0), 8)
    checks.append(_band_tail_analytic("band_tail", r_lo, offset_hi, a, x_star))

    cfg = _toy_blue_config(gamma, c)
    tail_log = lambda y: chaintails.compound_log_tail_lower(cfg, y + 1.0)
    checks.append(_blue_precondition(cfg, Lambda, x0))
    chain_len = 0
    if checks[-1]["status"] == "VERIFIED":
        main = dominance_chain(tail_log, Lambda, x0, floor=2.0)
        checks.append(_chain_check("main_chain", main))
        chain_len = main.chain_length
    # on [0,2]: 1 - x d >= e^{-x/Lambda} provided the first-band density d
    # is below the exponential's minimal slope (1/Lambda) e^{-2/Lambda}
    d_hi = rounding.div(cp1, rounding.mul(g_iv, rounding.add(one, g_iv)))[1]
    slope_lo = rounding.next_down(
        math.exp(-rounding.next_up(2.0 / Lambda, 4))
        * rounding.next_down(1.0 / Lambda, 4), 8)
    checks.append(_check("head_interval", slope_lo - d_hi))
    return _aggregate(desc, checks, chain_length=chain_len)


def verify_toy(gamma: float, side: str, c: Optional[float] = None,
               a: float = 0.999, Lambda: float = DEFAULT_LAMBDA,
               x0: Optional[float] = None,
               x_star: float = 40.0) -> VerificationReport:
    """Full one-sided winner verification for the two-parameter toy family."""
    if gamma <= 0:
        raise DomainError(f"need gamma > 0, got {gamma}")
    if not 0 < a < 1:
        raise DomainError(f"need a in (0, 1), got {a}")
    side_norm = side.strip().lower()
    if side_norm == "red":
        return _verify_toy_red(gamma, a, Lambda,
                               x0 if x0 is not None else 2000.0, x_star)
    if side_norm == "blue":
        if c is None:
            raise PreconditionFailed("blue side needs the constant c")
        return _verify_toy_blue(gamma, float(c), a, Lambda,
                                x0 if x0 is not None else 1e6, x_star)
    raise DomainError(f"side must be Red or Blue, got {side!r}")
