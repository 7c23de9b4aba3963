"""
Command Line Interface
Batch front end: each subcommand reads flags and files, computes, prints a
JSON document or a text table on stdout and exits.

Exit codes: 0 success, 1 verification or coverage failure, 2 input or scope error.
"""

import argparse
import json
import logging
import sys
from collections import Counter
from typing import Callable, Dict, List, Optional

import numpy as np
import yaml

from analysis.combinatorics import METHODS, lemma_report
from analysis.degree_engine import EpsSeq, degree, parse_angles, preimage_point
from analysis.numeric_search import SearchConfig, multistart
from analysis.verification import PropertySuite
from core.matrix_core import frobenius_dist, matrix_to_json
from framework.gamma_framework import (
    AntiIso,
    anti_iso_law_deviation,
    closure_summary,
    component_spectrum,
    random_unit_vector,
    su2_fix_point,
)
from models.lagrangian_models import (
    MODEL_INVOLUTION,
    MODEL_UNITARY,
    AntiSympInvolution,
    SymmetricUnitary,
    involution_to_unitary,
    load_point,
    point_to_json,
    theta_involution,
    theta_unitary,
)
from utils.config import load_config, setup_logging
from utils.errors import (
    DegeneracyError,
    DimensionMismatchError,
    InvariantViolationError,
    ScopeError,
    VerificationError,
)
from utils.reporting import dumps, render_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

BANNER_WIDTH = 70
CLOSURE_BOUND = 1e-9
LAW_BOUND = 1e-10
SU2_BOUND = 1e-12
MODEL_CHOICES = {"unitary": MODEL_UNITARY, "involution": MODEL_INVOLUTION}


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _emit(args: argparse.Namespace, title: str, document: Dict, tables: List[tuple]) -> None:
    """Print the JSON document, or a banner and one table per (caption, rows)."""
    if args.json:
        print(dumps(document))
        return

    print("=" * BANNER_WIDTH)
    print(title)
    print("=" * BANNER_WIDTH)
    for caption, rows in tables:
        if caption:
            print(f"\n{caption}")
        print(rows if isinstance(rows, str) else render_table(rows))
    print("=" * BANNER_WIDTH)


def _seed(args: argparse.Namespace, config: Dict, section: str, default: int) -> int:
    if args.seed is not None:
        return args.seed
    return config.get(section, {}).get("seed", default)


def cmd_degree(args: argparse.Namespace, config: Dict) -> int:
    """Mapping degree of Theta_0 at id by signed preimage count."""
    spec = parse_angles(args.angles, args.n)
    report = degree(spec, strict=False)

    _emit(
        args,
        f"DEGREE OF THETA_0  n={report.n}  m={report.m}",
        report.to_dict(),
        [
            (None, report.to_frame().to_string(index=False)),
            (
                f"Signed sum: {report.degree_signed_sum}   closed form 2^(m+1): "
                f"{report.degree_closed_form}   all regular: {report.all_regular}",
                "",
            ),
        ],
    )
    return EXIT_OK if report.verified else EXIT_FAILED


def cmd_preimages(args: argparse.Namespace, config: Dict) -> int:
    """List every preimage A^eps with its residual and both signs."""
    spec = parse_angles(args.angles, args.n)
    points = [preimage_point(spec, eps) for eps in EpsSeq.all_of_length(spec.n)]

    document = {
        "n": spec.n,
        "angles": list(spec.thetas),
        "points": [
            {
                "eps": list(p.eps.bits),
                "a_eps": matrix_to_json(p.a_eps.a),
                "sign_numeric": p.sign_numeric,
                "sign_analytic": p.sign_analytic,
                "residual": p.residual,
                "log_abs_det": p.log_abs_det,
            }
            for p in points
        ],
    }
    rows = [
        {
            "eps": "".join(str(b) for b in p.eps.bits),
            "diag(A_eps)": " ".join(f"{z.real:+.6f}{z.imag:+.6f}i" for z in np.diag(p.a_eps.a)),
            "sign_numeric": p.sign_numeric,
            "sign_analytic": p.sign_analytic,
            "residual": p.residual,
        }
        for p in points
    ]
    _emit(args, f"PREIMAGES OF id  n={spec.n}  count={len(points)}", document, [(None, rows)])

    ok = all(p.residual < 1e-11 and p.sign_numeric == p.sign_analytic for p in points)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_lemma(args: argparse.Namespace, config: Dict) -> int:
    """d_n by brute force, recursion and closed form."""
    methods = METHODS if args.method == "all" else (args.method,)
    max_brute_n = config.get("lemma", {}).get("brute_force_max_n", 25)
    report = lemma_report(args.n, methods=methods, max_brute_n=max_brute_n)

    summary = [
        {"route": name, "d_n": value}
        for name, value in (
            ("brute", report.d_brute),
            ("recursion", report.d_rec),
            ("closed", report.d_closed),
        )
        if value is not None
    ]
    tables = [("Routes", summary)]
    if report.M:
        tables.append(("Counts", report.to_frame().to_string(index=False)))
    for note in report.notes:
        tables.append((f"Note: {note}", ""))

    _emit(args, f"SIGNED COUNT d_n  n={args.n}", report.to_dict(), tables)
    return EXIT_OK if report.agree else EXIT_FAILED


def cmd_search(args: argparse.Namespace, config: Dict) -> int:
    """Multistart root search for Theta_0(A) = id."""
    spec = parse_angles(args.angles, args.n)
    search_config = SearchConfig.from_config(
        args.n,
        config,
        spec=spec,
        starts=args.starts,
        seed=_seed(args, config, "search", 7),
    )
    outcome = multistart(search_config, show_progress=args.progress)

    rows = [
        {
            "solution": index,
            "eps": "".join(str(b) for b in eps.bits) if eps is not None else "unmatched",
            "diag(A)": " ".join(f"{z.real:+.6f}{z.imag:+.6f}i" for z in np.diag(a.a)),
        }
        for index, (a, eps) in enumerate(zip(outcome.solutions, outcome.matched))
    ]
    stats = [
        {
            "starts": search_config.starts,
            "converged": outcome.converged,
            "failures": outcome.failures,
            "solutions": len(outcome.solutions),
            "coverage": outcome.coverage,
            "strays": outcome.strays,
        }
    ]
    _emit(
        args,
        f"MULTISTART SEARCH  n={args.n}  seed={search_config.seed}",
        outcome.to_dict(),
        [("Solutions", rows), ("Summary", stats)],
    )
    return EXIT_OK if outcome.complete else EXIT_FAILED


def cmd_verify(args: argparse.Namespace, config: Dict) -> int:
    """Randomized property suite."""
    extra = None
    if args.matrix:
        point = load_point(args.matrix, tol=_tolerance(config))
        extra = involution_to_unitary(point) if isinstance(point, AntiSympInvolution) else point

    suite = PropertySuite(
        args.n,
        config,
        trials=args.trials,
        seed=_seed(args, config, "verify", 42),
        extra=extra,
    )
    report = suite.run()

    _emit(
        args,
        f"PROPERTY SUITE  n={args.n}  trials={suite.trials}  seed={suite.seed}",
        report.to_dict(),
        [(None, report.to_frame().drop(columns=["detail"]).to_string(index=False))],
    )
    return EXIT_OK if report.all_passed else EXIT_FAILED


def cmd_product(args: argparse.Namespace, config: Dict) -> int:
    """Theta(A, B) of two stored points, written in their model."""
    tol = _tolerance(config)
    first = load_point(args.file_a, tol=tol)
    second = load_point(args.file_b, tol=tol)

    expected = MODEL_CHOICES[args.model] if args.model else _model_of(first)
    for path, point in ((args.file_a, first), (args.file_b, second)):
        model = _model_of(point)
        if model != expected:
            raise InvariantViolationError(
                "model tag matches", detail=f"{path} holds a {model} point"
            )

    if isinstance(first, SymmetricUnitary):
        product = theta_unitary(first, second)
    else:
        product = theta_involution(first, second)

    print(dumps(point_to_json(product)))
    return EXIT_OK


def cmd_framework(args: argparse.Namespace, config: Dict) -> int:
    """Structural demos for the fixed sets of the two anti-isomorphisms."""
    rng = np.random.default_rng(_seed(args, config, "framework", 42))
    samples = args.samples or config.get("framework", {}).get("spectrum_samples", 100)

    if args.demo == "grassmannian":
        spectrum = component_spectrum(args.n, samples, rng)
        counts = Counter(spectrum)
        rows = [{"k": k, "count": counts[k]} for k in sorted(counts)]
        document = {"n": args.n, "samples": samples, "components": rows, "distinct": len(counts)}
        _emit(args, f"Fix(g -> g^-1) IN O({args.n})  samples={samples}", document, [(None, rows)])
        return EXIT_OK if len(counts) >= 2 else EXIT_FAILED

    if args.demo == "su2":
        rows = []
        worst = 0.0
        for _ in range(samples):
            p = random_unit_vector(rng)
            g = su2_fix_point(p)
            deviation = max(
                frobenius_dist(g.conj().T @ g, np.eye(2)),
                abs(np.linalg.det(g) - 1.0),
                frobenius_dist(g.T, g),
            )
            worst = max(worst, deviation)
            rows.append({"p1": p[0], "p2": p[1], "p3": p[2], "deviation": deviation})
        document = {"samples": samples, "max_deviation": worst, "points": rows}
        _emit(args, f"Fix(transpose) IN SU(2)  samples={samples}", document, [(None, rows)])
        return EXIT_OK if worst <= SU2_BOUND else EXIT_FAILED

    summary = closure_summary(args.n, samples, rng)
    rows = [
        {"fixed_set": name, "max_deviation": value, "bound": CLOSURE_BOUND}
        for name, value in summary.items()
    ]
    rows += [
        {
            "fixed_set": f"laws/{anti_iso.value}",
            "max_deviation": anti_iso_law_deviation(anti_iso, args.n, samples, rng),
            "bound": LAW_BOUND,
        }
        for anti_iso in AntiIso
    ]
    document = {"n": args.n, "samples": samples, "checks": rows}
    _emit(args, f"CLOSURE OF g h^-1 g  n={args.n}  samples={samples}", document, [(None, rows)])
    return EXIT_OK if all(r["max_deviation"] <= r["bound"] for r in rows) else EXIT_FAILED


def _tolerance(config: Dict) -> float:
    return config.get("tolerances", {}).get("validation", 1e-10)


def _model_of(point) -> str:
    return MODEL_UNITARY if isinstance(point, SymmetricUnitary) else MODEL_INVOLUTION


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subparser per command.

    Returns:
        Configured ArgumentParser
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Path to a YAML config file")
    common.add_argument(
        "--log-level",
        type=str.upper,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Override the configured log level",
    )
    common.add_argument("--seed", type=non_negative_int, default=None, help="Random seed")
    common.add_argument("--json", action="store_true", help="Print JSON instead of a table")

    parser = argparse.ArgumentParser(
        prog="lagrangian-gamma",
        description="Theta(R, S) = RSR on the Lagrangian Grassmannian and its mapping degree",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    degree_parser = subparsers.add_parser(
        "degree", parents=[common], help="Signed preimage count of Theta_0 at id"
    )
    degree_parser.add_argument("--n", type=positive_int, required=True, help="Dimension (odd)")
    degree_parser.add_argument("--angles", type=str, default=None, help="Comma-separated angles")
    degree_parser.set_defaults(handler=cmd_degree)

    preimages_parser = subparsers.add_parser(
        "preimages", parents=[common], help="List all preimages of id"
    )
    preimages_parser.add_argument("--n", type=positive_int, required=True, help="Dimension")
    preimages_parser.add_argument("--angles", type=str, default=None, help="Comma-separated angles")
    preimages_parser.set_defaults(handler=cmd_preimages)

    lemma_parser = subparsers.add_parser(
        "lemma", parents=[common], help="Signed count d_n over binary sequences"
    )
    lemma_parser.add_argument("--n", type=positive_int, required=True, help="Sequence length")
    lemma_parser.add_argument(
        "--method", choices=list(METHODS) + ["all"], default="all", help="Route(s) to d_n"
    )
    lemma_parser.set_defaults(handler=cmd_lemma)

    search_parser = subparsers.add_parser(
        "search", parents=[common], help="Multistart root search for Theta_0(A) = id"
    )
    search_parser.add_argument("--n", type=positive_int, required=True, help="Dimension")
    search_parser.add_argument("--angles", type=str, default=None, help="Comma-separated angles")
    search_parser.add_argument("--starts", type=non_negative_int, default=None, help="Start count")
    search_parser.add_argument("--progress", action="store_true", help="Progress bar on stderr")
    search_parser.set_defaults(handler=cmd_search)

    verify_parser = subparsers.add_parser(
        "verify", parents=[common], help="Randomized property suite"
    )
    verify_parser.add_argument("--n", type=positive_int, required=True, help="Dimension")
    verify_parser.add_argument("--trials", type=non_negative_int, default=None, help="Samples")
    verify_parser.add_argument("--matrix", type=str, default=None, help="Stored point to include")
    verify_parser.set_defaults(handler=cmd_verify)

    product_parser = subparsers.add_parser(
        "product", parents=[common], help="Theta(A, B) of two stored points"
    )
    product_parser.add_argument("file_a", type=str, help="First factor (matrix JSON)")
    product_parser.add_argument("file_b", type=str, help="Second factor (matrix JSON)")
    product_parser.add_argument(
        "--model", choices=list(MODEL_CHOICES), default=None, help="Expected model of both files"
    )
    product_parser.set_defaults(handler=cmd_product)

    framework_parser = subparsers.add_parser(
        "framework", parents=[common], help="Fixed sets of involutive anti-isomorphisms"
    )
    framework_parser.add_argument(
        "--demo", choices=["grassmannian", "su2", "closure"], required=True, help="Demo to run"
    )
    framework_parser.add_argument("--n", type=positive_int, default=3, help="Dimension")
    framework_parser.add_argument("--samples", type=positive_int, default=None, help="Samples")
    framework_parser.set_defaults(handler=cmd_framework)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return its exit code.

    Args:
        argv: Argument list (defaults to sys.argv[1:])

    Returns:
        Exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[argparse.Namespace, Dict], int] = args.handler

    try:
        config = load_config(args.config)
        setup_logging(config, args.log_level)
        logger.debug(f"Running {args.command} with {vars(args)}")
        return handler(args, config)
    except (
        ScopeError,
        InvariantViolationError,
        DimensionMismatchError,
        FileNotFoundError,
        json.JSONDecodeError,
        yaml.YAMLError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (VerificationError, DegeneracyError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_FAILED


def run() -> None:
    """Console entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
