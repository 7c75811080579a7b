"""Directed-rounding helpers for rigorous enclosures.

Every quantity that feeds a VERIFIED/FALSIFIED decision is carried as a
(lo, hi) pair of floats.  Instead of pulling in an interval-arithmetic
dependency, each arithmetic step widens its float result by a few ulps,
which over-covers the true rounding error of a single IEEE operation.
"""
import math

_ULPS = 4


def next_up(x: float, steps: int = _ULPS) -> float:
    for _ in range(steps):
        x = math.nextafter(x, math.inf)
    return x


def next_down(x: float, steps: int = _ULPS) -> float:
    for _ in range(steps):
        x = math.nextafter(x, -math.inf)
    return x


def widen(lo: float, hi: float) -> tuple[float, float]:
    return next_down(lo), next_up(hi)


def add(a, b):
    return next_down(a[0] + b[0]), next_up(a[1] + b[1])


def sub(a, b):
    return next_down(a[0] - b[1]), next_up(a[1] - b[0])


def mul(a, b):
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return next_down(min(prods)), next_up(max(prods))


def div(a, b):
    if b[0] <= 0.0 <= b[1]:
        raise ZeroDivisionError("interval divisor straddles zero")
    quots = (a[0] / b[0], a[0] / b[1], a[1] / b[0], a[1] / b[1])
    return next_down(min(quots)), next_up(max(quots))


def square(a):
    lo, hi = mul(a, a)
    if a[0] <= 0.0 <= a[1]:
        lo = 0.0
    return lo, hi


def log_interval(a):
    if a[0] <= 0.0:
        raise DomainErrorLocal("log of non-positive interval")
    return next_down(math.log(a[0])), next_up(math.log(a[1]))


class DomainErrorLocal(ValueError):
    pass


def point(x: float) -> tuple[float, float]:
    return (x, x)


def log_of_rational(num: int, den: int) -> tuple[float, float]:
    """Enclosure of ln(num/den) for positive integers of arbitrary size."""
    if num <= 0 or den <= 0:
        raise ValueError("log_of_rational needs positive integers")
    # ln(n) = ln(top 64 bits) + (bits dropped) * ln 2, each factor widened.
    def _log_int(n: int) -> tuple[float, float]:
        shift = max(0, n.bit_length() - 64)
        top = n >> shift
        lo = math.log(top)       # top fits a float exactly up to 2^64: 1 ulp
        approx = lo + shift * math.log(2.0)
        # dropped low bits only increase the value, by < 2^-63 relative
        return next_down(approx, 8), next_up(approx * (1 + 2e-19) + 1e-300, 8)

    ln_n = _log_int(num)
    ln_d = _log_int(den)
    return next_down(ln_n[0] - ln_d[1], 8), next_up(ln_n[1] - ln_d[0], 8)


def logsumexp_bounds(log_terms_lo, log_terms_hi) -> tuple[float, float]:
    """Enclosure of ln(sum(exp(t))) given per-term log enclosures.

    Accepts any iterables (lists or numpy arrays); -inf entries allowed.
    The accumulated float summation error is covered by an n*eps widening.
    """
    lo_terms = [t for t in log_terms_lo if t > -math.inf]
    hi_terms = [t for t in log_terms_hi if t > -math.inf]
    n = max(len(lo_terms), len(hi_terms), 1)
    slack = n * 2.0 ** -50

    def _lse(terms):
        if not terms:
            return -math.inf
        m = max(terms)
        if m == -math.inf:
            return -math.inf
        s = math.fsum(math.exp(t - m) for t in terms)
        return m + math.log(s)

    lo = _lse(lo_terms)
    hi = _lse(hi_terms)
    if lo > -math.inf:
        lo = next_down(lo - slack, 8)
    if hi > -math.inf:
        hi = next_up(hi + slack, 8)
    return lo, hi
