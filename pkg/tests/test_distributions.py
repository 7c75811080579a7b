import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linecoal import distributions as d
from linecoal import uniformsum as us
from linecoal.errors import (
    DomainError,
    InfiniteMoment,
    MissingParam,
    ParseError,
    UnknownPreset,
    Unsupported,
)

from oracles import ih_cdf_oracle


def rng(seed=0):
    return np.random.default_rng(seed)


# --- parser -------------------------------------------------------------


def test_parse_const():
    assert d.parse_dist("const(1)") == d.Const(1.0)


def test_parse_compound():
    spec = d.parse_dist("compound(geom(0.5), uniform(1,2))")
    assert spec == d.Compound(d.Geom(0.5), d.Uniform(1.0, 2.0))


def test_parse_error_offset():
    with pytest.raises(ParseError) as exc:
        d.parse_dist("pareto(")
    assert exc.value.offset == 7


def test_parse_whitespace_insensitive():
    a = d.parse_dist("mix( 0.25 : const(1) , 0.75 : exp( 2.5 ) )")
    b = d.parse_dist("mix(0.25:const(1),0.75:exp(2.5))")
    assert a == b


def test_parse_rejects_trailing():
    with pytest.raises(ParseError):
        d.parse_dist("const(1) const(2)")


def test_parse_unknown_name():
    with pytest.raises(ParseError) as exc:
        d.parse_dist("cauchy(1)")
    assert "const" in exc.value.expected


def test_parse_bad_weights():
    with pytest.raises(ParseError):
        d.parse_dist("mix(0.5:const(1),0.4:const(2))")


def test_parse_scientific_numbers():
    assert d.parse_dist("exp(1.5e-2)") == d.Exp(0.015)


_LEAVES = st.sampled_from(
    [
        d.Const(1.0),
        d.Uniform(0.0, 2.19),
        d.Exp(1.22),
        d.ShiftedExp(3.0),
        d.Pareto(0.5),
        d.Poisson(2.0),
        d.Geom(0.25),
    ]
)


def _extend(children):
    return st.one_of(
        st.tuples(st.integers(0, 5), children).map(lambda t: d.SumK(*t)),
        st.tuples(st.floats(-2, 2, allow_nan=False), children).map(
            lambda t: d.Shift(*t)
        ),
        st.tuples(st.floats(0.1, 4, allow_nan=False), children).map(
            lambda t: d.Scale(*t)
        ),
        st.tuples(children, children).map(
            lambda t: d.Mixture(((0.5, t[0]), (0.5, t[1])))
        ),
        st.tuples(children, children).map(lambda t: d.Add(t)),
        children.map(lambda c: d.Compound(d.Geom(0.5), c)),
    )


_SPECS = st.recursive(_LEAVES, _extend, max_leaves=6)


@given(_SPECS)
@settings(max_examples=200, deadline=None)
def test_serialization_round_trips(spec):
    assert d.parse_dist(d.to_text(spec)) == spec


# --- sampling -----------------------------------------------------------


def test_sample_const():
    assert d.sample(d.Const(1.0), rng()) == 1.0
    assert (d.sample_array(d.Const(3.5), rng(), 100) == 3.5).all()


def test_sample_pareto_tail():
    a = 0.7
    xs = d.sample_array(d.Pareto(a), rng(1), 10**6)
    for x in (1.0, 2.0, 5.0, 10.0):
        p = ((a + 1) / (a + x)) ** 2
        emp = float((xs >= x).mean())
        sigma = math.sqrt(p * (1 - p) / len(xs)) or 1e-9
        assert abs(emp - p) <= 4 * sigma + 1e-9


def test_sample_shifted_exp_mean():
    lam = 3.0
    xs = d.sample_array(d.ShiftedExp(lam), rng(2), 10**6) - 1.0
    assert abs(xs.mean() - lam) <= 4 * lam / math.sqrt(len(xs))


def test_sample_geom_pmf():
    p = 0.6
    xs = d.sample_array(d.Geom(p), rng(3), 10**6)
    assert xs.min() >= 1
    for k in (1, 2, 5):
        target = p ** (k - 1) * (1 - p)
        emp = float((xs == k).mean())
        sigma = math.sqrt(target * (1 - target) / len(xs))
        assert abs(emp - target) <= 4 * sigma


def test_sample_compound_matches_sumk_in_moments():
    spec_c = d.Compound(d.Const(3.0), d.Uniform(0, 1))
    spec_s = d.SumK(3, d.Uniform(0, 1))
    xc = d.sample_array(spec_c, rng(4), 10**5)
    xsamp = d.sample_array(spec_s, rng(4), 10**5)
    assert abs(xc.mean() - xsamp.mean()) < 0.02
    assert abs(xc.mean() - 1.5) < 0.02


def test_sample_mixture_and_add():
    mix = d.Mixture(((0.5, d.Const(0.0)), (0.5, d.Const(2.0))))
    xs = d.sample_array(mix, rng(5), 10**5)
    assert set(np.unique(xs)) == {0.0, 2.0}
    assert abs(xs.mean() - 1.0) < 0.02
    add = d.Add((d.Const(1.0), d.Uniform(0, 1)))
    ys = d.sample_array(add, rng(6), 1000)
    assert ys.min() >= 1.0 and ys.max() <= 2.0


def test_sample_compound_rejects_fractional_counts():
    with pytest.raises(Unsupported):
        d.sample_array(d.Compound(d.Uniform(0, 5), d.Const(1.0)), rng(), 10)


# --- moments ------------------------------------------------------------


def test_moments_examples():
    gamma = 6.048
    m, v = d.moments(d.Uniform(0, 1 + gamma))
    assert math.isclose(m, 3.524)
    assert math.isclose(v, 7.048**2 / 12)
    assert d.moments(d.Const(4.0)) == (4.0, 0.0)


def test_moments_counter_blue():
    c1, c2 = 0.08, 0.01
    _, blue = d.preset("counter")
    m, v = d.moments(blue)
    assert math.isclose(m, 1 + c2 / 2 - c1)
    assert math.isclose(v, c1 * (1 - c1) * (1 + c2) + c2**2 / 12, rel_tol=1e-9)


def test_moments_pareto_infinite():
    with pytest.raises(InfiniteMoment):
        d.moments(d.Pareto(0.5))


def test_moments_wald():
    child = d.Uniform(1, 4)
    m1, v1 = d.moments(child)
    mk, vk = d.moments(d.SumK(7, child))
    assert math.isclose(mk, 7 * m1) and math.isclose(vk, 7 * v1)
    # compound: mean and variance against 10^6 samples
    spec = d.Compound(d.Geom(0.3), child)
    m, v = d.moments(spec)
    xs = d.sample_array(spec, rng(7), 10**6)
    assert abs(xs.mean() - m) < 4 * math.sqrt(v / len(xs))
    assert abs(xs.var() - v) < 0.05 * v


# --- tails --------------------------------------------------------------


def test_tail_pareto_exact():
    t = d.tail(d.Pareto(1.0), 3.0)
    assert t.lower == t.upper == 0.25
    assert t.method == "Exact"


def test_tail_irwin_hall_symmetry():
    t2 = d.tail(d.SumK(2, d.Uniform(0, 1)), 1.0)
    assert t2.lower == t2.upper == 0.5
    t3 = d.tail(d.SumK(3, d.Uniform(0, 1)), 1.5)
    assert t3.lower == t3.upper == 0.5
    assert t3.method == "IrwinHall"


def test_tail_shift_scale():
    t = d.tail(d.Shift(2.0, d.Scale(3.0, d.Pareto(1.0))), 2 + 3 * 3)
    assert t.lower == 0.25


def test_tail_unsupported():
    with pytest.raises(Unsupported):
        d.tail(d.SumK(3, d.Pareto(1.0)), 5.0)


def test_tail_monotone_in_x():
    specs = [
        d.Pareto(0.3),
        d.SumK(5, d.Uniform(0, 1)),
        d.SumK(200, d.Uniform(0, 1)),
        d.Compound(d.Geom(0.4), d.Uniform(1, 2)),
        d.Mixture(((0.3, d.Const(2.0)), (0.7, d.Exp(1.0)))),
    ]
    for spec in specs:
        prev_lo, prev_hi = 1.0, 1.0
        for x in np.linspace(0.0, 12.0, 60):
            t = d.tail(spec, float(x))
            assert t.lower <= t.upper
            # enclosures may wobble within their width; compare across bounds
            assert t.lower <= prev_hi + 1e-12
            prev_lo, prev_hi = t.lower, t.upper


def test_tail_dkw_consistency():
    # empirical CDF of 10^6 draws stays within the enclosure + DKW margin
    n = 10**6
    dkw = 4 * math.sqrt(math.log(2) / (2 * n))
    cases = [
        (d.Pareto(0.5), (1.2, 2.0, 4.0, 9.0)),
        (d.SumK(6, d.Uniform(0, 1)), (1.0, 2.5, 3.0, 4.5)),
        (d.SumK(90, d.Uniform(1, 2)), (130.0, 135.0, 140.0)),
        (d.Compound(d.Geom(0.5), d.Uniform(1, 2)), (1.5, 3.0, 6.0, 12.0)),
        (d.Mixture(((0.4, d.Const(1.0)), (0.6, d.Exp(2.0)))), (0.5, 1.0, 3.0)),
    ]
    for i, (spec, grid) in enumerate(cases):
        xs = d.sample_array(spec, rng(100 + i), n)
        for x in grid:
            emp = float((xs >= x).mean())
            t = d.tail(spec, x)
            assert t.lower - dkw <= emp <= t.upper + dkw, (spec, x)


def test_tail_compound_truncation_is_tight():
    t = d.tail(d.Compound(d.Geom(0.5), d.Uniform(1, 2)), 4.0)
    assert t.upper - t.lower < 1e-9


def test_tail_compound_poisson_count():
    spec = d.Compound(d.Poisson(2.0), d.Uniform(0, 1))
    t = d.tail(spec, 0.0)
    assert t.upper == 1.0
    xs = d.sample_array(spec, rng(8), 10**5)
    t2 = d.tail(spec, 2.0)
    emp = float((xs >= 2.0).mean())
    assert t2.lower - 0.01 <= emp <= t2.upper + 0.01


# --- Irwin-Hall / Berry-Esseen machinery --------------------------------


def test_ih_exact_matches_convolution_oracle():
    for k in range(1, 13):
        for i in range(1, 8):
            x = Fraction(i * k, 8)
            ours = us.ih_cdf_unit(k, x)
            assert abs(ours - ih_cdf_oracle(k, x)) == 0  # both exact rationals
    # and through floats at the API level
    assert abs(float(us.ih_cdf_unit(9, Fraction(37, 10)))
               - float(ih_cdf_oracle(9, Fraction(37, 10)))) < 1e-10


def test_be_contains_exact_13_to_64():
    # 100 (k, x) probes across the switchover band
    probes = 0
    for k in range(13, 65, 2):
        for frac in (0.2, 0.4, 0.55, 0.7):
            x = k * frac
            exact = float(1 - us.ih_cdf_unit(k, Fraction(x)))
            lo, hi = us.be_tail_bounds(k, 0.0, 1.0, x)
            assert lo <= exact <= hi, (k, x)
            probes += 1
    assert probes >= 100


def test_mp_enclosure_contains_exact():
    for k in (20, 64, 150):
        for frac in (0.3, 0.5, 0.62, 0.8):
            z = Fraction(int(k * frac * 8), 8)
            lo, hi = us._ih_cdf_unit_enclosure_mp(k, z)
            if k <= 64:
                exact = float(us.ih_cdf_unit(k, z))
                assert lo <= exact <= hi
            assert 0.0 <= lo <= hi <= 1.0


def test_ih_log_tail_lower_sound():
    for k, x in ((40, 30.0), (120, 80.0), (300, 190.0)):
        log_lb = us.ih_log_tail_lower(k, 0.0, 1.0, x)
        lo, hi = us.be_tail_bounds(k, 0.0, 1.0, x)
        if hi > 0:
            assert log_lb <= math.log(hi) + 1e-9


def test_tail_profile_soundness():
    # chords and sup-convolutions stay below the true log-tail
    k = 8
    prof = us.profile_from_exact(k, 1.0, 2.0, 12.0, 15.9, points=9)
    doubled = us.supconv(prof, prof)
    test_rng = np.random.default_rng(9)
    for _ in range(50):
        s = float(test_rng.uniform(12.0, 15.8))
        truth = math.log(float(us.ih_tail(k, 1.0, 2.0, s)))
        assert prof.value(s) <= truth + 1e-12
    for _ in range(50):
        s = float(test_rng.uniform(24.5, 31.0))
        v = doubled.value(2 * 12.0 + (s - 24.0))
        truth = us.ih_tail(2 * k, 1.0, 2.0, 2 * 12.0 + (s - 24.0))
        if truth > 0:
            assert v <= math.log(float(truth)) + 1e-12


def test_profile_value_outside_window():
    prof = us.profile_from_exact(4, 0.0, 1.0, 2.0, 3.9, points=5)
    assert prof.value(1.0) == prof.v[0]
    assert prof.value(5.0) == -math.inf


# --- Chernoff-Poisson bounds --------------------------------------------


def test_poisson_chernoff_examples():
    lower, _ = d.poisson_tail_bounds(1.0, 1.0)
    assert math.isclose(lower, math.exp(-0.5))
    assert math.exp(-1.0) <= lower  # exact P(X <= 0) under the bound
    assert d.poisson_tail_bounds(5.0, 0.0) == (1.0, 1.0)


def test_poisson_chernoff_upper_vs_exact():
    lam, x = 100.0, 30.0
    _, upper = d.poisson_tail_bounds(lam, x)
    assert math.isclose(upper, math.exp(-900.0 / 220.0))
    t = d.tail(d.Poisson(lam), lam + x)
    assert t.upper <= upper


def test_poisson_chernoff_domain():
    with pytest.raises(DomainError):
        d.poisson_tail_bounds(1.0, -0.5)
    with pytest.raises(DomainError):
        d.poisson_tail_bounds(-1.0, 0.5)


# --- presets ------------------------------------------------------------


def test_preset_trans():
    red, blue = d.preset("trans_BR")
    assert red == d.Uniform(0.0, 2.19)
    assert blue == d.Const(1.0)
    red, blue = d.preset("trans_RG")
    assert red == d.Const(1.0) and blue == d.Exp(1.22)


def test_preset_counter():
    red, blue = d.preset("counter")
    assert red == d.Uniform(1.0, 1.01)
    assert isinstance(blue, d.Mixture)
    assert blue.components[0][0] == 0.08


def test_preset_toy_no_atom_at_p1():
    gamma = 0.1216
    red, blue = d.preset("toy", gamma=gamma)
    assert isinstance(red, d.Shift)  # no atom when p = 1
    assert red.child.count == d.Geom(1 / (1 + gamma))
    assert blue == d.Shift(-1.0, d.Compound(
        d.Geom(gamma / (1 + gamma)), d.Uniform(2.0, 2.0 + gamma)))


def test_preset_toy_blue_first_band_weight():
    gamma, c = 6.048, 1.26
    p = 1 - c / gamma
    _, blue = d.preset("toy", gamma=gamma, p=p)
    rho = blue.child.count.p
    q = 1 - p
    assert math.isclose(1 - rho, (q * gamma + 1) / (1 + gamma))


def test_preset_mean_theorem_shape():
    red, blue = d.preset("mean_theorem", n=2, K=1.0, k=10)
    assert blue == d.Uniform(1.0, 1.25)
    assert isinstance(red, d.Shift) and red.c == 1.0
    parts = red.child.children
    assert len(parts) == 8  # N = 2K/eps with eps = 1/4
    assert parts[0] == d.Scale(10.0, d.Poisson(0.25 / 10.0))


def test_preset_counter_blownup_shape():
    red, blue = d.preset("counter_blownup", n=3, K=1.0)
    assert isinstance(red, d.Add)
    assert red.children[0] == d.Uniform(1.0, 1.01)
    assert len(red.children) == 1 + 6  # N = 2Kn
    m, v = d.moments(red)
    assert m > 1.0 and v > 0.0


def test_preset_main_theorem():
    red, blue = d.preset("main_theorem", a=0.5, lam=14.0)
    assert red == d.Pareto(0.5) and blue == d.ShiftedExp(14.0)
    red, blue = d.preset("main_theorem")
    assert red == d.Pareto(1.0) and blue == d.ShiftedExp(3.0)


def test_preset_errors():
    with pytest.raises(UnknownPreset):
        d.preset("nope")
    with pytest.raises(MissingParam):
        d.preset("mean_theorem", n=2)
    with pytest.raises(MissingParam):
        d.preset("toy")
