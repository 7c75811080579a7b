import json
import math
from fractions import Fraction

import numpy as np
import pytest

from linecoal import kernels
from linecoal import montecarlo as mc
from linecoal.distributions import Const, Uniform, parse_dist, preset


def test_run_trial_forced_good():
    # red end segment of length 1 survives; everything else coalesces blue
    r = mc.run_trial(Const(1.0), Uniform(2, 3), n=1000, alpha=0.23,
                     master_seed=7, trial_index=0)
    assert r.good and not r.degenerate
    assert r.window_length >= 3000
    assert r.closure_segment_count <= 3


def test_run_trial_deterministic():
    a = mc.run_trial(Const(1.0), Uniform(2, 3), 50, 0.23, 123, 9)
    b = mc.run_trial(Const(1.0), Uniform(2, 3), 50, 0.23, 123, 9)
    assert a == b
    c = mc.run_trial(Const(1.0), Uniform(2, 3), 50, 0.23, 123, 10)
    assert c != a


def test_run_trial_degenerate_recorded():
    r = mc.run_trial(Const(1.0), Const(1.0), 5, 0.25, 1, 0)
    assert r.degenerate and not r.good


def test_colour_symmetry_paired_seeds():
    # flipping every colour and the goodness target gives identical outcomes
    red, blue = preset("counter")
    for i in range(20):
        rng = mc._trial_rng(99, i)
        colors, lengths = mc._sample_window(red, blue, 200, rng)
        oc, ol, _ = kernels.close_arrays(colors, lengths, want_counts=False)
        flipped, fl, _ = kernels.close_arrays(1 - colors, lengths,
                                              want_counts=False)
        assert np.array_equal(ol, fl)
        assert np.array_equal(oc, 1 - flipped)
        good_blue = mc._central_blue_good(oc, ol, 0.23)
        good_flipped = mc._central_blue_good(1 - flipped, fl, 0.23)
        assert good_blue == good_flipped


# --- binomial tails -------------------------------------------------------


def test_binomial_tail_examples():
    assert mc.binomial_tail(1000, 13, 0.058) < -12
    assert mc.binomial_tail(17, 17, 0.3) == 0.0
    assert math.isclose(mc.binomial_tail(2, 0, 0.5), math.log10(0.25))


def test_binomial_tail_vs_rational():
    # exact rational crosscheck for small N
    rng = np.random.default_rng(5)
    for _ in range(40):
        N = int(rng.integers(1, 51))
        k = int(rng.integers(0, N + 1))
        q = Fraction(int(rng.integers(1, 99)), 100)
        exact = sum(
            Fraction(math.comb(N, i)) * q**i * (1 - q) ** (N - i)
            for i in range(k + 1)
        )
        ours = mc.binomial_tail(N, k, float(q))
        truth = math.log10(float(exact))
        assert abs(ours - truth) <= 1e-9 * abs(truth) + 1e-12


def test_binomial_tail_saturation():
    assert mc.binomial_tail(10, 3, 1.0) == -math.inf
    assert mc.binomial_tail(10, 10, 1.0) == 0.0
    assert mc.binomial_tail(10, 3, 0.0) == 0.0


# --- estimate_q -----------------------------------------------------------


def test_estimate_q_trivially_good():
    est = mc.estimate_q(Const(1.0), Uniform(2, 3), n=20, alpha=0.23,
                        trials=5, master_seed=3, q_star=0.5)
    assert est.bad == 0 and est.q_hat == 0.0
    assert est.confidence_bound[0] == 0.5
    assert est.confidence_bound[1] < -1


def test_estimate_q_thread_invariance():
    red, blue = preset("counter")
    kwargs = dict(n=500, alpha=0.23, trials=24, master_seed=11, q_star=0.2)
    ests = [mc.estimate_q(red, blue, threads=t, **kwargs) for t in (1, 4, 16)]
    blobs = {mc.qestimate_to_json(e) for e in ests}
    assert len(blobs) == 1


def test_estimate_q_all_degenerate():
    est = mc.estimate_q(Const(1.0), Const(1.0), n=4, alpha=0.25,
                        trials=3, master_seed=0, q_star=0.5)
    assert est.degenerate == 3
    assert math.isnan(est.q_hat)


def test_reports_csv_round():
    reports = mc.run_trials(Const(1.0), Uniform(2, 3), 10, 0.23, 4, 8)
    text = mc.reports_to_csv(reports)
    lines = text.strip().split("\n")
    assert lines[0] == "trial_index,good,window_length,segments,degenerate"
    assert len(lines) == 5


# --- typicality -----------------------------------------------------------


def test_typicality_boundaries():
    red, blue = Uniform(1, 1.01), Uniform(1, 1.02)
    est = mc.typicality_rate(red, blue, n=100, L=1e6, beta=2.0,
                             trials=50, master_seed=1)
    assert est.eta_hat == 1.0  # L above any possible window length
    est = mc.typicality_rate(red, blue, n=100, L=150.0, beta=1e9,
                             trials=50, master_seed=1)
    assert est.eta_hat == 0.0


def test_typicality_decreasing_in_n():
    red, blue = Uniform(1, 1.01), Uniform(1, 1.02)
    mu = 2.0151  # mean red + blue pair length
    beta = 1.04
    out = []
    for n in (50, 5000):
        L = 2 * n * mu / (1 + beta)
        est = mc.typicality_rate(red, blue, n=n, L=L, beta=beta,
                                 trials=300, master_seed=2)
        out.append(est.eta_hat)
        lo, hi = est.interval
        assert 0 <= lo <= est.eta_hat <= hi <= 1
    assert out[1] <= out[0]


def test_qestimate_json_shape():
    est = mc.estimate_q(Const(1.0), Uniform(2, 3), 10, 0.23, 2, 0, 0.5)
    doc = json.loads(mc.qestimate_to_json(est, extra={"n": 10}))
    assert doc["trials"] == 2 and doc["n"] == 10


def test_parse_dist_integration():
    red = parse_dist("const(1)")
    blue = parse_dist("uniform(2, 3)")
    r = mc.run_trial(red, blue, 10, 0.25, 0, 0)
    assert r.good
