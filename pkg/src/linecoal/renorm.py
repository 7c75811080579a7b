"""Renormalisation certificates for blue wins.

A triple (alpha, beta, k) is renormalisable when the two block-coalescence
inequalities hold; with finite-variance length distributions, a Chebyshev
bound gives the atypicality schedule eta_t = c / (k^t n), and the bad-rate
recursion q_{t+1} = (2k-3) q_t^2 + k eta_t certifies a blue win whenever
the observed bad rate sits below the largest root Q of the fixed-point
quadratic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .distributions import DistSpec, moments, to_text
from .errors import PreconditionFailed


@dataclass(frozen=True)
class RenormParams:
    alpha: float
    beta: float
    k: int
    n: int

    def __post_init__(self):
        if not 0 < self.alpha <= 0.25:
            raise ValueError(f"need 0 < alpha <= 1/4, got {self.alpha}")
        if not self.beta > 1:
            raise ValueError(f"need beta > 1, got {self.beta}")
        if self.k < 1 or self.n < 1:
            raise ValueError("need k >= 1 and n >= 1")


@dataclass(frozen=True)
class Certificate:
    params: RenormParams
    c: float
    Q: Optional[float]
    q_input: float
    eta_model: str
    q_sequence: tuple
    verdict: str  # BlueWinCertified | NotCertified
    confidence: Optional[float]  # log10 probability, if attached


def is_renormalisable(alpha: float, beta: float, k: int) -> bool:
    if not (0 < alpha <= 0.25 and beta > 1 and k >= 1):
        return False
    return (beta + alpha * beta < 2 - 3 * alpha
            and alpha * (k - 3) > 2 * beta * (1 - alpha))


def compute_c(mu_R: float, mu_B: float, var_R: float, var_B: float,
              beta: float) -> float:
    if not (mu_R > 0 and mu_B > 0):
        raise ValueError("means must be positive")
    return ((var_R + var_B) * (beta + 1) ** 2
            / ((mu_R + mu_B) ** 2 * (beta - 1) ** 2))


def renorm2_root(k: int, c: float, n: int) -> Optional[float]:
    """Largest root of x = (2k-3) x^2 + k c / n; None when n is too small."""
    disc = 1.0 - 4.0 * (2 * k - 3) * k * c / n
    if disc < 0.0:
        return None
    return (1.0 + math.sqrt(disc)) / (2.0 * (2 * k - 3))


def q_recursion(q0: float, eta: Callable[[int], float], k: int,
                T: int) -> tuple:
    """Iterate q_{t+1} = (2k-3) q_t^2 + k eta(t).

    Returns (sequence, converged, partial_sum).  Convergence means the
    iterate fell below 1e-30 with the quadratic term contracting; the
    iteration stops early once both the iterate and the forcing term are
    negligible.
    """
    if not 0.0 <= q0 <= 1.0:
        raise ValueError(f"need q0 in [0, 1], got {q0}")
    seq = [q0]
    q = q0
    converged = False
    for t in range(T):
        q = (2 * k - 3) * q * q + k * eta(t)
        seq.append(q)
        if q > 10.0:  # clearly above the fixed point and exploding
            break
        if q < 1e-30 and (2 * k - 3) * q < 1.0 and k * eta(t + 1) < 1e-30:
            converged = True
            break
    return seq, converged, math.fsum(seq)


def certify(params: RenormParams, red: DistSpec, blue: DistSpec,
            q_input: float, confidence: Optional[float] = None,
            T: int = 400) -> Certificate:
    """Assemble a blue-win certificate from moments and an asserted q.

    The verdict is conditional on q_input (typically a Monte Carlo estimate
    whose exact binomial confidence is recorded alongside, never claimed
    as proof).
    """
    if not is_renormalisable(params.alpha, params.beta, params.k):
        raise PreconditionFailed(
            f"({params.alpha}, {params.beta}, {params.k}) is not renormalisable")
    mu_R, var_R = moments(red)
    mu_B, var_B = moments(blue)
    c = compute_c(mu_R, mu_B, var_R, var_B, params.beta)
    Q = renorm2_root(params.k, c, params.n)

    def eta(t: int) -> float:
        return c / (params.k**t * params.n)

    seq, converged, _ = q_recursion(min(q_input, 1.0), eta, params.k, T)
    certified = Q is not None and q_input <= Q and converged
    return Certificate(
        params=params,
        c=c,
        Q=Q,
        q_input=q_input,
        eta_model=f"chebyshev: {c!r}/(k^t n)",
        q_sequence=tuple(seq),
        verdict="BlueWinCertified" if certified else "NotCertified",
        confidence=confidence,
    )


def certificate_to_json(cert: Certificate, red: DistSpec, blue: DistSpec,
                        extra: Optional[dict] = None) -> str:
    doc = {
        "params": {"alpha": cert.params.alpha, "beta": cert.params.beta,
                   "k": cert.params.k, "n": cert.params.n},
        "red": to_text(red),
        "blue": to_text(blue),
        "c": cert.c,
        "Q": cert.Q,
        "q_input": cert.q_input,
        "eta_model": cert.eta_model,
        "q_sequence_head": list(cert.q_sequence[:16]),
        "q_sequence_len": len(cert.q_sequence),
        "verdict": cert.verdict,
        "confidence_log10": cert.confidence,
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2)
