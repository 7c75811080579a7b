"""Two-colour interval coalescence on the line.

Simulation of the recolouring dynamics, deterministic Monte Carlo
estimation of goodness rates, and rigorous numerical verification of the
renormalisation, bound-tracking, and stochastic-dominance arguments.
"""
from .errors import (
    DegenerateTie,
    DomainError,
    InfiniteMoment,
    LinecoalError,
    MalformedAlternation,
    MissingParam,
    NotRedEnded,
    ParseError,
    PreconditionFailed,
    UnknownPreset,
    Unsupported,
)
from .interval import (
    BLUE,
    RED,
    ColoredInterval,
    GoodnessReport,
    RecolourTrace,
    cantor_construction,
    closure,
    concat,
    goodness,
    is_closed,
    lbound_update,
    recolour_counts,
    red_content,
)
from .distributions import parse_dist, preset, tail, to_text
from .lbound import LBoundState, certify_trajectory, reddom_empirical
from .montecarlo import binomial_tail, estimate_q, run_trial, typicality_rate
from .renorm import RenormParams, certify, is_renormalisable
from .verify import (
    DEFAULT_LAMBDA,
    VerificationReport,
    conv_tail_closed_form,
    dominance_chain,
    geom_half_bound,
    verify_e1,
    verify_e1_largex,
    verify_toy,
)

__version__ = "0.1.0"
