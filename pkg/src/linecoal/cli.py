"""Command-line front end: simulation, estimation, certification, plots.

Exit codes follow the verification convention: 0 for success/VERIFIED,
1 for FALSIFIED (or an uncertified verdict), 2 for INCONCLUSIVE, 64 for
usage errors, 70 for runtime failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import distributions as dists
from . import kernels, lbound, montecarlo, renorm, verify
from ._closure_py import close_segments
from .errors import LinecoalError
from .interval import ColoredInterval

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_RUNTIME = 70

_STATUS_EXIT = {"VERIFIED": EXIT_OK, "FALSIFIED": EXIT_FALSIFIED,
                "INCONCLUSIVE": EXIT_INCONCLUSIVE}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors -> 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _threads(args) -> int:
    env = os.environ.get("COALESCE_THREADS")
    if env is not None:
        return max(1, int(env))
    return max(1, getattr(args, "threads", 1) or 1)


def _coerce(text: str):
    try:
        v = float(text)
    except ValueError:
        return text
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


def _dist_pair(args, parser):
    if getattr(args, "preset", None):
        params = {}
        for item in args.param or ():
            if "=" not in item:
                parser.error(f"--param expects key=value, got {item!r}")
            key, _, value = item.partition("=")
            params[key] = _coerce(value)
        return dists.preset(args.preset, **params)
    if not (getattr(args, "red", None) and getattr(args, "blue", None)):
        parser.error("need either --preset or both --red and --blue")
    return dists.parse_dist(args.red), dists.parse_dist(args.blue)


def _json(doc: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    return json.dumps(doc, sort_keys=True, indent=2)


def _report_doc(r: verify.VerificationReport, leaves: bool = False) -> dict:
    doc = {
        "status": r.status,
        "description": r.description,
        "rectangles_processed": r.rectangles_processed,
        "chain_length": r.chain_length,
        "witness": r.witness,
        "slack": r.slack,
    }
    if leaves:
        doc["leaves"] = [list(leaf) for leaf in r.details]
    elif r.details and isinstance(r.details[0], dict):
        doc["checks"] = list(r.details)
    return doc


# --- rendering --------------------------------------------------------------

_SVG_COLOURS = {0: "#c23b22", 1: "#2b6cb0"}
_BAR_H, _GAP, _MARGIN, _WIDTH = 22, 10, 12, 840


def render_snapshots(c: ColoredInterval, thresholds, path) -> str:
    """Threshold-sweep SVG: one bar per threshold, recolouring below it.

    Each bar shows the state after exhaustively recolouring every
    recolourable segment strictly shorter than the threshold; red/blue
    rectangles are drawn to scale.  Output bytes are a pure function of
    the inputs.
    """
    thresholds = list(thresholds)
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be increasing")
    total = c.total_length
    scale = (_WIDTH - 2 * _MARGIN) / total
    height = _MARGIN * 2 + len(thresholds) * (_BAR_H + _GAP) - _GAP
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{height}">',
    ]
    for row, ell in enumerate(thresholds):
        colors, lengths, _, _ = close_segments(
            list(c.colors), list(c.lengths), limit=ell)
        y = _MARGIN + row * (_BAR_H + _GAP)
        x = float(_MARGIN)
        lines.append(f'<g data-threshold="{ell!r}">')
        for col, length in zip(colors, lengths):
            w = float(length) * scale
            lines.append(
                f'<rect x="{x:.4f}" y="{y}" width="{w:.4f}" '
                f'height="{_BAR_H}" fill="{_SVG_COLOURS[col]}"/>')
            x += w
        lines.append("</g>")
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _default_thresholds(c: ColoredInterval):
    # sweep up to just past the largest closure segment (= full closure)
    _, lengths, _, _ = close_segments(list(c.colors), list(c.lengths))
    max_len = max(lengths)
    fracs = (0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0)
    return [f * max_len for f in fracs] + [max_len * (1 + 1e-9)]


# --- subcommands ------------------------------------------------------------


def _cmd_simulate(args, parser) -> int:
    red, blue = _dist_pair(args, parser)
    rng = montecarlo._trial_rng(args.seed, args.trial)
    colors, lengths = montecarlo._sample_window(red, blue, args.n, rng)
    window = ColoredInterval.from_arrays(colors, lengths)
    oc, ol, _ = kernels.close_arrays(colors, lengths, want_counts=False)
    doc = {
        "backend": kernels.BACKEND,
        "n": args.n,
        "seed": args.seed,
        "trial": args.trial,
        "window_length": float(lengths.sum()),
        "closure_segments": int(len(oc)),
    }
    if args.alpha is not None:
        doc["good"] = montecarlo._central_blue_good(oc, ol, args.alpha)
        doc["alpha"] = args.alpha
    if args.svg:
        render_snapshots(window, _default_thresholds(window), args.svg)
        doc["svg"] = args.svg
    _emit(_json(doc), args.out)
    return EXIT_OK


def _cmd_estimate_q(args, parser) -> int:
    red, blue = _dist_pair(args, parser)
    est = montecarlo.estimate_q(red, blue, args.n, args.alpha, args.trials,
                                args.seed, args.q_star, threads=_threads(args))
    extra = {"schema_version": SCHEMA_VERSION, "n": args.n,
             "alpha": args.alpha, "seed": args.seed,
             "red": dists.to_text(red), "blue": dists.to_text(blue)}
    _emit(montecarlo.qestimate_to_json(est, extra=extra), args.out)
    return EXIT_OK


def _cmd_certify_renorm(args, parser) -> int:
    red, blue = _dist_pair(args, parser)
    params = renorm.RenormParams(args.alpha, args.beta, args.k, args.n)
    cert = renorm.certify(params, red, blue, args.q,
                          confidence=args.confidence)
    _emit(renorm.certificate_to_json(
        cert, red, blue, extra={"schema_version": SCHEMA_VERSION}), args.out)
    return EXIT_OK if cert.verdict == "BlueWinCertified" else EXIT_FALSIFIED


def _cmd_evolve_lbound(args, parser) -> int:
    s0 = lbound.LBoundState(a=args.a, lam=args.lam, eps=args.eps,
                            Lambda=args.Lambda)
    report = lbound.certify_trajectory(s0, args.delta)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(lbound.trajectory_to_csv(report))
    _emit(lbound.report_to_json(report, extra={
        "schema_version": SCHEMA_VERSION, "delta": args.delta}), args.out)
    return _STATUS_EXIT[report.status]


def _cmd_verify_e1(args, parser) -> int:
    r = verify.verify_e1(args.lam, args.delta,
                         a_range=(args.a_min, args.a_max),
                         x_range=(args.x_min, args.x_max),
                         collect_leaves=args.leaves)
    docs = {"small_x": _report_doc(r, leaves=args.leaves)}
    status = r.status
    if not args.skip_largex:
        r2 = verify.verify_e1_largex(args.lam, args.x_max)
        docs["large_x"] = _report_doc(r2)
        order = ("FALSIFIED", "INCONCLUSIVE", "VERIFIED")
        status = min(status, r2.status, key=order.index)
    _emit(_json({"lambda": args.lam, "delta": args.delta,
                 "status": status, **docs}), args.out)
    return _STATUS_EXIT[status]


def _cmd_verify_toy(args, parser) -> int:
    r = verify.verify_toy(args.gamma, args.side, c=args.c, a=args.a)
    _emit(_json({"gamma": args.gamma, "side": args.side, "c": args.c,
                 "a": args.a, **_report_doc(r)}), args.out)
    return _STATUS_EXIT[r.status]


def _cmd_verify_dominance(args, parser) -> int:
    red, blue = _dist_pair(args, parser)
    rng_r = montecarlo._trial_rng(args.seed, 0)
    rng_b = montecarlo._trial_rng(args.seed, 1)
    xs = dists.sample_array(red, rng_r, args.samples)
    ys = dists.sample_array(blue, rng_b, args.samples)
    if args.grid:
        grid = sorted(float(t) for t in args.grid.split(","))
    else:
        grid = sorted(set(float(v) for v in np.quantile(
            np.concatenate([xs, ys]), np.linspace(0.05, 0.99, 20))))
    rows = []
    worst = math.inf
    for g in grid:
        tr = float((xs >= g).mean())
        tb = float((ys >= g).mean())
        sigma = math.sqrt((tr * (1 - tr) + tb * (1 - tb)) / args.samples)
        margin = (tr - tb) / sigma if sigma > 0 else math.inf
        worst = min(worst, margin)
        rows.append({"x": g, "tail_first": tr, "tail_second": tb,
                     "z": None if margin == math.inf else margin})
    verdict = "DOMINATES" if worst > -args.z_crit else "VIOLATION"
    _emit(_json({"first": dists.to_text(red), "second": dists.to_text(blue),
                 "samples": args.samples, "seed": args.seed,
                 "z_crit": args.z_crit, "verdict": verdict,
                 "worst_z": None if worst == math.inf else worst,
                 "rows": rows}), args.out)
    return EXIT_OK if verdict == "DOMINATES" else EXIT_FALSIFIED


def _cmd_preset_list(args, parser) -> int:
    _emit(_json({"presets": list(dists.PRESET_NAMES)}), args.out)
    return EXIT_OK


def _cmd_plot(args, parser) -> int:
    red, blue = _dist_pair(args, parser)
    rng = montecarlo._trial_rng(args.seed, args.trial)
    colors, lengths = montecarlo._sample_window(red, blue, args.n, rng)
    window = ColoredInterval.from_arrays(colors, lengths)
    if args.thresholds:
        thresholds = [float(t) for t in args.thresholds.split(",")]
    else:
        thresholds = _default_thresholds(window)
    render_snapshots(window, thresholds, args.svg)
    return EXIT_OK


# --- argument wiring ---------------------------------------------------------


def _add_pair_flags(p):
    p.add_argument("--red", help="red length distribution, e.g. 'pareto(1)'")
    p.add_argument("--blue", help="blue length distribution, e.g. 'sexp(3)'")
    p.add_argument("--preset", help="named (red, blue) pair")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="preset parameter (repeatable)")


def _add_out(p):
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="linecoal",
                     description="Two-colour interval coalescence toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample one window and close it")
    _add_pair_flags(p)
    p.add_argument("--n", type=int, required=True, help="red/blue pairs")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--svg", help="write a threshold-sweep snapshot plot")
    _add_out(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate-q", help="Monte Carlo bad-rate estimate")
    _add_pair_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--q-star", type=float, default=0.058)
    p.add_argument("--threads", type=int, default=1)
    _add_out(p)
    p.set_defaults(func=_cmd_estimate_q)

    p = sub.add_parser("certify-renorm", help="blue-win certificate")
    _add_pair_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, required=True,
                   help="asserted bad rate (e.g. a Monte Carlo estimate)")
    p.add_argument("--confidence", type=float, default=None,
                   help="log10 binomial confidence to record")
    _add_out(p)
    p.set_defaults(func=_cmd_certify_renorm)

    p = sub.add_parser("evolve-lbound", help="bound-tracking trajectory")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--Lambda", type=float, default=verify.DEFAULT_LAMBDA)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--csv", help="also write the trajectory as CSV")
    _add_out(p)
    p.set_defaults(func=_cmd_evolve_lbound)

    p = sub.add_parser("verify-e1", help="rectangle verification of the "
                       "convolution-tail inequality")
    p.add_argument("--lambda", dest="lam", type=float,
                   default=verify.DEFAULT_LAMBDA)
    p.add_argument("--delta", type=float, default=1e-10)
    p.add_argument("--a-min", type=float, default=0.0)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=4.0)
    p.add_argument("--x-max", type=float, default=100.0)
    p.add_argument("--leaves", action="store_true",
                   help="include the leaf-rectangle ledger in the JSON")
    p.add_argument("--skip-largex", action="store_true")
    _add_out(p)
    p.set_defaults(func=_cmd_verify_e1)

    p = sub.add_parser("verify-toy", help="one-parameter family dominance")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--side", required=True, choices=["Red", "Blue",
                                                     "red", "blue"])
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--a", type=float, default=0.999)
    _add_out(p)
    p.set_defaults(func=_cmd_verify_toy)

    p = sub.add_parser("verify-dominance",
                       help="empirical CDF comparison of two distributions")
    _add_pair_flags(p)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", help="comma-separated tail evaluation points")
    p.add_argument("--z-crit", type=float, default=4.0)
    _add_out(p)
    p.set_defaults(func=_cmd_verify_dominance)

    p = sub.add_parser("preset-list", help="list named distribution pairs")
    _add_out(p)
    p.set_defaults(func=_cmd_preset_list)

    p = sub.add_parser("plot", help="threshold-sweep snapshot SVG")
    _add_pair_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--thresholds", help="comma-separated increasing list")
    p.add_argument("--svg", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except LinecoalError as exc:
        sys.stderr.write(f"linecoal: {exc}\n")
        return EXIT_RUNTIME
    except OSError as exc:
        sys.stderr.write(f"linecoal: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
