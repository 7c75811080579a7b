"""Length-distribution expression trees: parse, sample, tails, moments.

Every distribution used anywhere in the project is expressible here:
constants, uniforms, (shifted) exponentials, the Pareto family with tail
(a+1)^2/(a+x)^2, Poisson, geometric on {1,2,...}, fixed and random sums,
shifts, scales, finite mixtures, and sums of independent non-identical
parts (``add``).  Specs are immutable and hashable; sampling takes a
numpy Generator so callers control the stream.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import rounding, uniformsum
from .errors import (
    DomainError,
    InfiniteMoment,
    MissingParam,
    ParseError,
    UnknownPreset,
    Unsupported,
)

_W_TOL = 1e-12  # mixture weights must sum to 1 within this
_GEOM_TRUNC = 1e-15  # leftover compound weight folded into the upper bound


@dataclass(frozen=True)
class DistSpec:
    """Base class for distribution expression nodes."""


@dataclass(frozen=True)
class Const(DistSpec):
    v: float


@dataclass(frozen=True)
class Uniform(DistSpec):
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"uniform needs a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class Exp(DistSpec):
    lam: float  # mean; tail exp(-x/lam)

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"exp rate parameter must be positive, got {self.lam}")


@dataclass(frozen=True)
class ShiftedExp(DistSpec):
    lam: float  # 1 + Exp(lam)

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"sexp parameter must be positive, got {self.lam}")


@dataclass(frozen=True)
class Pareto(DistSpec):
    a: float  # support [1, inf), tail (a+1)^2 / (a+x)^2

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError(f"pareto parameter must be >= 0, got {self.a}")


@dataclass(frozen=True)
class Poisson(DistSpec):
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"poisson rate must be positive, got {self.lam}")


@dataclass(frozen=True)
class Geom(DistSpec):
    p: float  # support {1,2,...}; P(X = k) = p^(k-1) (1-p)

    def __post_init__(self):
        if not 0 <= self.p < 1:
            raise DomainError(f"geom parameter must be in [0, 1), got {self.p}")


@dataclass(frozen=True)
class SumK(DistSpec):
    k: int
    child: DistSpec

    def __post_init__(self):
        if not (isinstance(self.k, int) and self.k >= 0):
            raise DomainError(f"sum count must be a non-negative integer, got {self.k}")


@dataclass(frozen=True)
class Compound(DistSpec):
    count: DistSpec  # integer-valued
    child: DistSpec


@dataclass(frozen=True)
class Shift(DistSpec):
    c: float
    child: DistSpec


@dataclass(frozen=True)
class Scale(DistSpec):
    c: float
    child: DistSpec

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"scale factor must be positive, got {self.c}")


@dataclass(frozen=True)
class Mixture(DistSpec):
    components: Tuple[Tuple[float, DistSpec], ...]

    def __post_init__(self):
        if not self.components:
            raise DomainError("mixture needs at least one component")
        total = math.fsum(w for w, _ in self.components)
        if any(w <= 0 for w, _ in self.components):
            raise DomainError("mixture weights must be positive")
        if abs(total - 1.0) > _W_TOL:
            raise DomainError(f"mixture weights sum to {total}, expected 1")
        object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class Add(DistSpec):
    """Sum of independent, not necessarily identical, parts."""

    children: Tuple[DistSpec, ...]

    def __post_init__(self):
        if not self.children:
            raise DomainError("add needs at least one part")
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class TailValue:
    lower: float
    upper: float
    method: str  # Exact | IrwinHall | BerryEsseen | MonteCarloOnly

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"bad tail enclosure [{self.lower}, {self.upper}]")


# --- parsing --------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[a-zA-Z_]\w*)|(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<punct>[(),:]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", at,
                             expected=("name", "number", "punctuation"))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want}, got {tok[1] or 'end of input'}",
                             tok[2], expected=(want,))
        self.i += 1
        return tok

    def number(self) -> float:
        tok = self.take("num")
        return float(tok[1])

    def dist(self) -> DistSpec:
        tok = self.take("name")
        name, at = tok[1].lower(), tok[2]
        self.take("punct", "(")
        try:
            node = self._body(name, at)
        except DomainError as exc:
            raise ParseError(str(exc), at, expected=("valid parameters",)) from exc
        self.take("punct", ")")
        return node

    def _body(self, name, at):
        if name == "const":
            return Const(self.number())
        if name == "uniform":
            a = self.number()
            self.take("punct", ",")
            return Uniform(a, self.number())
        if name == "exp":
            return Exp(self.number())
        if name == "sexp":
            return ShiftedExp(self.number())
        if name == "pareto":
            return Pareto(self.number())
        if name == "poisson":
            return Poisson(self.number())
        if name == "geom":
            return Geom(self.number())
        if name == "sum":
            tok = self.take("num")
            k = float(tok[1])
            if k != int(k):
                raise ParseError("sum count must be an integer", tok[2],
                                 expected=("integer",))
            self.take("punct", ",")
            return SumK(int(k), self.dist())
        if name == "compound":
            count = self.dist()
            self.take("punct", ",")
            return Compound(count, self.dist())
        if name == "shift":
            c = self.number()
            self.take("punct", ",")
            return Shift(c, self.dist())
        if name == "scale":
            c = self.number()
            self.take("punct", ",")
            return Scale(c, self.dist())
        if name == "mix":
            comps = [self._weighted()]
            while self.peek()[:2] == ("punct", ","):
                self.take("punct", ",")
                comps.append(self._weighted())
            return Mixture(tuple(comps))
        if name == "add":
            parts = [self.dist()]
            while self.peek()[:2] == ("punct", ","):
                self.take("punct", ",")
                parts.append(self.dist())
            return Add(tuple(parts))
        raise ParseError(f"unknown distribution {name!r}", at,
                         expected=("const", "uniform", "exp", "sexp", "pareto",
                                   "poisson", "geom", "sum", "compound",
                                   "shift", "scale", "mix", "add"))

    def _weighted(self):
        w = self.number()
        self.take("punct", ":")
        return (w, self.dist())


def parse_dist(text: str) -> DistSpec:
    p = _Parser(text)
    node = p.dist()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2], expected=("end",))
    return node


def _fmt(v) -> str:
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(spec: DistSpec) -> str:
    """Canonical serialization; round-trips through parse_dist."""
    if isinstance(spec, Const):
        return f"const({_fmt(spec.v)})"
    if isinstance(spec, Uniform):
        return f"uniform({_fmt(spec.a)},{_fmt(spec.b)})"
    if isinstance(spec, Exp):
        return f"exp({_fmt(spec.lam)})"
    if isinstance(spec, ShiftedExp):
        return f"sexp({_fmt(spec.lam)})"
    if isinstance(spec, Pareto):
        return f"pareto({_fmt(spec.a)})"
    if isinstance(spec, Poisson):
        return f"poisson({_fmt(spec.lam)})"
    if isinstance(spec, Geom):
        return f"geom({_fmt(spec.p)})"
    if isinstance(spec, SumK):
        return f"sum({spec.k},{to_text(spec.child)})"
    if isinstance(spec, Compound):
        return f"compound({to_text(spec.count)},{to_text(spec.child)})"
    if isinstance(spec, Shift):
        return f"shift({_fmt(spec.c)},{to_text(spec.child)})"
    if isinstance(spec, Scale):
        return f"scale({_fmt(spec.c)},{to_text(spec.child)})"
    if isinstance(spec, Mixture):
        body = ",".join(f"{_fmt(w)}:{to_text(d)}" for w, d in spec.components)
        return f"mix({body})"
    if isinstance(spec, Add):
        return "add(" + ",".join(to_text(d) for d in spec.children) + ")"
    raise Unsupported(f"cannot serialize {spec!r}")


# --- sampling -------------------------------------------------------------


def sample_array(spec: DistSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """size i.i.d. draws; inverse-CDF for the continuous primitives."""
    if isinstance(spec, Const):
        return np.full(size, float(spec.v))
    if isinstance(spec, Uniform):
        return spec.a + (spec.b - spec.a) * rng.random(size)
    if isinstance(spec, Exp):
        return -spec.lam * np.log1p(-rng.random(size))
    if isinstance(spec, ShiftedExp):
        return 1.0 - spec.lam * np.log1p(-rng.random(size))
    if isinstance(spec, Pareto):
        # tail (a+1)^2/(a+x)^2 inverts to x = (a+1)/sqrt(u) - a, u in (0,1]
        u = 1.0 - rng.random(size)
        return (spec.a + 1.0) / np.sqrt(u) - spec.a
    if isinstance(spec, Poisson):
        return rng.poisson(spec.lam, size).astype(np.float64)
    if isinstance(spec, Geom):
        if spec.p == 0.0:
            return np.ones(size)
        u = rng.random(size)
        return 1.0 + np.floor(np.log1p(-u) / math.log(spec.p))
    if isinstance(spec, SumK):
        if spec.k == 0:
            return np.zeros(size)
        draws = sample_array(spec.child, rng, spec.k * size)
        return draws.reshape(size, spec.k).sum(axis=1)
    if isinstance(spec, Compound):
        counts = sample_array(spec.count, rng, size)
        ints = counts.astype(np.int64)
        if not np.array_equal(ints, counts) or (ints < 0).any():
            raise Unsupported("compound count distribution must be "
                              "non-negative integer valued")
        pool = sample_array(spec.child, rng, int(ints.sum()))
        cs = np.concatenate(([0.0], np.cumsum(pool)))
        ends = np.cumsum(ints)
        return cs[ends] - cs[ends - ints]
    if isinstance(spec, Shift):
        return spec.c + sample_array(spec.child, rng, size)
    if isinstance(spec, Scale):
        return spec.c * sample_array(spec.child, rng, size)
    if isinstance(spec, Mixture):
        cum = np.cumsum([w for w, _ in spec.components])
        idx = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
        idx = np.minimum(idx, len(spec.components) - 1)
        out = np.empty(size)
        for i, (_, child) in enumerate(spec.components):
            mask = idx == i
            m = int(mask.sum())
            if m:
                out[mask] = sample_array(child, rng, m)
        return out
    if isinstance(spec, Add):
        out = np.zeros(size)
        for child in spec.children:
            out += sample_array(child, rng, size)
        return out
    raise Unsupported(f"cannot sample {spec!r}")


def sample(spec: DistSpec, rng: np.random.Generator) -> float:
    return float(sample_array(spec, rng, 1)[0])


# --- moments --------------------------------------------------------------


def moments(spec: DistSpec) -> tuple:
    """(mean, variance), exact by tree recursion; Wald for compounds."""
    if isinstance(spec, Const):
        return float(spec.v), 0.0
    if isinstance(spec, Uniform):
        return (spec.a + spec.b) / 2.0, (spec.b - spec.a) ** 2 / 12.0
    if isinstance(spec, Exp):
        return spec.lam, spec.lam**2
    if isinstance(spec, ShiftedExp):
        return 1.0 + spec.lam, spec.lam**2
    if isinstance(spec, Pareto):
        raise InfiniteMoment(f"pareto({spec.a}) has infinite variance")
    if isinstance(spec, Poisson):
        return spec.lam, spec.lam
    if isinstance(spec, Geom):
        q = 1.0 - spec.p
        return 1.0 / q, spec.p / q**2
    if isinstance(spec, SumK):
        m, v = moments(spec.child)
        return spec.k * m, spec.k * v
    if isinstance(spec, Compound):
        mn, vn = moments(spec.count)
        mx, vx = moments(spec.child)
        return mn * mx, mn * vx + vn * mx**2
    if isinstance(spec, Shift):
        m, v = moments(spec.child)
        return spec.c + m, v
    if isinstance(spec, Scale):
        m, v = moments(spec.child)
        return spec.c * m, spec.c**2 * v
    if isinstance(spec, Mixture):
        parts = [(w,) + moments(d) for w, d in spec.components]
        mean = math.fsum(w * m for w, m, _ in parts)
        second = math.fsum(w * (v + m * m) for w, m, v in parts)
        return mean, second - mean**2
    if isinstance(spec, Add):
        parts = [moments(d) for d in spec.children]
        return (math.fsum(m for m, _ in parts), math.fsum(v for _, v in parts))
    raise Unsupported(f"no moments for {spec!r}")


# --- analytic tails -------------------------------------------------------


def _method_max(*methods):
    order = {"Exact": 0, "IrwinHall": 1, "BerryEsseen": 2}
    return max(methods, key=lambda m: order[m])


def tail(spec: DistSpec, x: float) -> TailValue:
    """Rigorous enclosure of P(X >= x) for the analytic class."""
    if isinstance(spec, Const):
        t = 1.0 if x <= spec.v else 0.0
        return TailValue(t, t, "Exact")
    if isinstance(spec, Uniform):
        t = min(1.0, max(0.0, (spec.b - x) / (spec.b - spec.a)))
        return TailValue(t, t, "Exact")
    if isinstance(spec, Exp):
        t = 1.0 if x <= 0 else math.exp(-x / spec.lam)
        return TailValue(t, t, "Exact")
    if isinstance(spec, ShiftedExp):
        t = 1.0 if x <= 1 else math.exp(-(x - 1.0) / spec.lam)
        return TailValue(t, t, "Exact")
    if isinstance(spec, Pareto):
        t = 1.0 if x <= 1 else ((spec.a + 1.0) / (spec.a + x)) ** 2
        return TailValue(t, t, "Exact")
    if isinstance(spec, Geom):
        if x <= 1:
            return TailValue(1.0, 1.0, "Exact")
        t = spec.p ** (math.ceil(x) - 1)
        return TailValue(t, t, "Exact")
    if isinstance(spec, Poisson):
        k = math.ceil(x)
        if k <= 0:
            return TailValue(1.0, 1.0, "Exact")
        # P(X >= k) = 1 - sum_{j<k} pmf(j); fine for the moderate rates used here
        logpmf = [-spec.lam + j * math.log(spec.lam) - math.lgamma(j + 1)
                  for j in range(k)]
        cdf = math.fsum(math.exp(t) for t in logpmf)
        t = min(1.0, max(0.0, 1.0 - cdf))
        return TailValue(t, t, "Exact")
    if isinstance(spec, SumK):
        return _tail_sumk(spec.k, spec.child, x)
    if isinstance(spec, Shift):
        return tail(spec.child, x - spec.c)
    if isinstance(spec, Scale):
        return tail(spec.child, x / spec.c)
    if isinstance(spec, Mixture):
        lo = hi = 0.0
        methods = []
        for w, child in spec.components:
            t = tail(child, x)
            lo += w * t.lower
            hi += w * t.upper
            methods.append(t.method)
        return TailValue(max(0.0, rounding.next_down(lo, 8)),
                         min(1.0, rounding.next_up(hi, 8)),
                         _method_max(*methods))
    if isinstance(spec, Compound):
        return _tail_compound(spec, x)
    raise Unsupported(f"no analytic tail for {spec!r}")


def _tail_sumk(k: int, child: DistSpec, x: float) -> TailValue:
    if k == 0:
        t = 1.0 if x <= 0 else 0.0
        return TailValue(t, t, "Exact")
    if isinstance(child, Const):
        return tail(Const(k * child.v), x)
    if isinstance(child, Shift):
        return _tail_sumk(k, child.child, x - k * child.c)
    if isinstance(child, Scale):
        return _tail_sumk(k, child.child, x / child.c)
    if isinstance(child, Uniform):
        if k <= uniformsum.K_EXACT:
            lo, hi = uniformsum.ih_tail_enclosure(k, child.a, child.b, x)
            return TailValue(lo, hi, "IrwinHall")
        lo, hi = uniformsum.be_tail_bounds(k, child.a, child.b, x)
        return TailValue(lo, hi, "BerryEsseen")
    raise Unsupported(f"no analytic tail for a sum of {child!r}")


def _count_weights(count: DistSpec):
    """Yield (k, weight) with decreasing remaining mass; k from its support."""
    if isinstance(count, Geom):
        w = 1.0 - count.p
        k = 1
        while True:
            yield k, w
            w *= count.p
            k += 1
    elif isinstance(count, Poisson):
        w = math.exp(-count.lam)
        k = 0
        while True:
            yield k, w
            k += 1
            w *= count.lam / k
    elif isinstance(count, Const) and float(count.v).is_integer():
        yield int(count.v), 1.0
    else:
        raise Unsupported(f"unsupported compound count {count!r}")


def _tail_compound(spec: Compound, x: float) -> TailValue:
    lo = hi = 0.0
    seen = 0.0
    method = "Exact"
    for k, w in _count_weights(spec.count):
        remaining = max(0.0, 1.0 - seen)
        if remaining < _GEOM_TRUNC:
            hi += remaining  # truncation remainder charged to the upper bound
            break
        t = _tail_sumk(k, spec.child, x)
        if t.lower >= 1.0:
            # every larger count only adds mass; the rest of the series is 1
            lo += remaining
            hi += remaining
            break
        lo += w * t.lower
        hi += w * t.upper
        seen += w
        method = _method_max(method, t.method)
    return TailValue(max(0.0, rounding.next_down(lo, 8)),
                     min(1.0, rounding.next_up(hi, 8)), method)


def poisson_tail_bounds(lam: float, x: float) -> tuple:
    """Chernoff bounds: P(X <= lam-x) and P(X >= lam+x) for X ~ Po(lam)."""
    if not lam > 0:
        raise DomainError(f"poisson rate must be positive, got {lam}")
    if x < 0:
        raise DomainError(f"deviation must be non-negative, got {x}")
    lower = math.exp(-x * x / (2.0 * lam))
    upper = math.exp(-x * x / (2.0 * lam + 2.0 * x / 3.0))
    return lower, upper


# --- named pairs ----------------------------------------------------------


def _require(params: dict, *names):
    for name in names:
        if name not in params:
            raise MissingParam(f"preset needs parameter {name!r}")
    return [params[name] for name in names]


def _toy_red(gamma: float, p: float) -> DistSpec:
    q = 1.0 - p
    band = Shift(1.0, Compound(Geom(1.0 / (1.0 + gamma)), Uniform(1.0, 2.0)))
    atom_w = q * gamma / (q * gamma + 1.0)
    if atom_w == 0.0:
        return band
    return Mixture(((atom_w, Const(1.0)), (1.0 - atom_w, band)))


def _toy_blue(gamma: float, p: float) -> DistSpec:
    rho = p * gamma / (1.0 + gamma)
    return Shift(-1.0, Compound(Geom(rho), Uniform(2.0, 2.0 + gamma)))


def preset(name: str, **params) -> tuple:
    """Named (red, blue) distribution pairs used throughout the project."""
    if name == "mean_theorem":
        n, K = _require(params, "n", "K")
        k = int(params.get("k", 10))
        eps = 1.0 / n**2
        N = int(round(2 * K / eps))
        red = Shift(1.0, Add(tuple(
            Scale(float(k**i), Poisson(eps * float(k) ** -i))
            for i in range(1, N + 1))))
        return red, Uniform(1.0, 1.0 + eps)
    if name == "counter":
        c1 = float(params.get("c1", 0.08))
        c2 = float(params.get("c2", 0.01))
        red = Uniform(1.0, 1.0 + c2)
        blue = Mixture(((c1, Uniform(0.0, c1 * c2)),
                        (1.0 - c1, Uniform(1.0 + c1 * c2, 1.0 + c2))))
        return red, blue
    if name == "counter_blownup":
        n, K = _require(params, "n", "K")
        c1 = float(params.get("c1", 0.08))
        c2 = float(params.get("c2", 0.01))
        k = int(params.get("k", 10))
        N = int(round(2 * K * n))
        red = Add((Uniform(1.0, 1.0 + c2),) + tuple(
            Scale(float(k**i), Poisson(1.0 / (float(k) ** i * n)))
            for i in range(1, N + 1)))
        _, blue = preset("counter", c1=c1, c2=c2)
        return red, blue
    if name in ("trans_RG", "trans_GB", "trans_BR"):
        table = {"R": Const(1.0), "G": Exp(1.22), "B": Uniform(0.0, 2.19)}
        first, second = name[-2], name[-1]
        return table[first], table[second]
    if name == "toy":
        (gamma,) = _require(params, "gamma")
        p = float(params.get("p", 1.0))
        if not 0 < p <= 1:
            raise DomainError(f"toy mixture needs p in (0, 1], got {p}")
        return _toy_red(float(gamma), p), _toy_blue(float(gamma), p)
    if name == "main_theorem":
        a = float(params.get("a", 1.0))
        lam = float(params.get("lam", params.get("lambda", 3.0)))
        return Pareto(a), ShiftedExp(lam)
    raise UnknownPreset(f"unknown preset {name!r}")


PRESET_NAMES = ("mean_theorem", "counter", "counter_blownup",
                "trans_RG", "trans_GB", "trans_BR", "toy", "main_theorem")
