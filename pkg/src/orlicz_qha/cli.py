"""Command-line front end: inspect Young functions, compute norms, run
verification suites, and render reports.

Subcommands: ``young``, ``norm``, ``verify``, ``report``. All structured
output is JSON on stdout (CSV only for per-trial tables); identical argv
and seed produce byte-identical stdout and report files. Exit codes:
0 success, 1 mathematical infeasibility or gating failure, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import errors
from .phase_space import GridFunction, grid_lp_norm, grid_orlicz_norm, grid_weak_orlicz_norm
from .rearrangement import (
    StepFunction,
    lp_norm,
    orlicz_norm,
    weak_lp_norm,
    weak_orlicz_norm,
)
from .weyl import operator_from_bytes, schatten_orlicz_norm
from .young import (
    Sampled,
    check_equivalence,
    construct_phi,
    convexify,
    interpolate,
    theta_solver,
    verify_young_relation,
    young_from_json,
)
from .verify import SuiteConfig, run_suite

_USAGE_ERROR = 2
_MATH_ERROR = 1

_MATH_ERRORS = (
    errors.ConditionViolated,
    errors.ExponentOutOfRange,
    errors.InfeasibleTheta,
    errors.NotAInc1,
    errors.ExponentOrderViolated,
    errors.ConstraintViolated,
    errors.DegenerateFunction,
    errors.UnboundedNorm,
)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _num(x: float):
    """JSON-safe number: infinities become the string 'inf'."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _load_young(text: str):
    """Parse a Young function from inline JSON or from an @file path."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return young_from_json(json.loads(text))


def _parse_young_list(items):
    return [_load_young(item) for item in items]


# -- young -------------------------------------------------------------------


def _cmd_young(args) -> int:
    if args.action == "exponents":
        phi = _load_young(args.fn[0])
        q, p = phi.exponents()
        _emit({"q": _num(q), "p": _num(p), "delta2": phi.is_delta2()})
    elif args.action == "interpolate":
        fns = _parse_young_list(args.fn)
        theta = [float(x) for x in args.theta.split(",")]
        out = interpolate(fns, theta)
        _emit(out.to_json_dict())
    elif args.action == "solve-theta":
        fns = _parse_young_list(args.fn)
        theta = theta_solver(fns)
        _emit({"theta": list(theta.theta)})
    elif args.action == "check-relation":
        fns = _parse_young_list(args.fn)
        if len(fns) < 2:
            raise errors.DimensionMismatch("need psi0 followed by psi_1..psi_n")
        residual = verify_young_relation(fns[0], fns[1:])
        _emit({"residual": residual})
    elif args.action == "construct-phi":
        if args.theta_j is None:
            raise ValueError("construct-phi requires --theta-j")
        phi = construct_phi(_load_young(args.fn[0]), args.theta_j)
        _emit(phi.to_json_dict())
    elif args.action == "convexify":
        psi, L = convexify(_load_young(args.fn[0]))
        blob = psi.to_json_dict()
        # downsample the envelope table for readable output
        step = max(1, len(blob["params"]["log_t"]) // args.knots)
        blob["params"]["log_t"] = blob["params"]["log_t"][::step]
        blob["params"]["log_v"] = blob["params"]["log_v"][::step]
        _emit({"fn": blob, "L": L})
    elif args.action == "check-equivalence":
        fns = _parse_young_list(args.fn)
        if len(fns) != 2:
            raise errors.DimensionMismatch("need exactly two functions")
        L = check_equivalence(fns[0], fns[1])
        _emit({"L": L})
    return 0


# -- norm ---------------------------------------------------------------------


def _load_input(path: str):
    """Payload sniffing: binary tags for grid/operator blobs, otherwise
    the CSV headers of grid functions ('#...') and step functions."""
    blob = Path(path).read_bytes()
    if blob[:8] == b"OQHAGF1\x00":
        return GridFunction.from_bytes(blob)
    if blob[:8] == b"OQHAOM1\x00":
        return operator_from_bytes(blob)
    text = blob.decode()
    if text.lstrip().startswith("#"):
        return GridFunction.from_csv(text)
    return StepFunction.from_csv(text)


def _norm_payload(args):
    if args.indicator is not None:
        return StepFunction([args.indicator], [1.0])
    if args.diag is not None:
        entries = [float(x) for x in args.diag.split(",")]
        return np.diag(entries).astype(complex)
    if args.input is None:
        raise ValueError("need --input, --indicator or --diag")
    return _load_input(args.input)


def _cmd_norm(args) -> int:
    phi = _load_young(args.phi) if args.phi else None
    payload = _norm_payload(args)

    if args.action == "schatten":
        if not isinstance(payload, np.ndarray):
            raise ValueError("schatten expects an operator payload")
        if phi is not None:
            _emit({"norm": schatten_orlicz_norm(payload, phi)})
        else:
            from .rearrangement import singular_values

            _emit({"norm": lp_norm(singular_values(payload), args.p)})
        return 0

    if isinstance(payload, np.ndarray):
        from .rearrangement import singular_values

        payload = singular_values(payload)

    if isinstance(payload, GridFunction):
        if args.action == "orlicz":
            _emit({"norm": grid_orlicz_norm(payload, phi)})
        elif args.action == "weak":
            _emit({"norm": grid_weak_orlicz_norm(payload, phi)})
        else:
            _emit({"norm": grid_lp_norm(payload, args.p)})
        return 0

    if args.action == "orlicz":
        _emit({"norm": orlicz_norm(payload, phi)})
    elif args.action == "weak":
        if phi is not None:
            _emit({"norm": weak_orlicz_norm(payload, phi)})
        else:
            _emit({"norm": weak_lp_norm(payload, args.p)})
    elif args.action == "lp":
        _emit({"norm": lp_norm(payload, args.p)})
    return 0


# -- verify / report -----------------------------------------------------------


def _cmd_verify(args) -> int:
    try:
        config_doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    try:
        out_prefix = config_doc.pop("out_prefix", None)
        config = SuiteConfig.from_dict(config_doc)
    except (TypeError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    report = run_suite(config)
    if out_prefix is None:
        out_prefix = f"{config.suite}_report"
    json_path = Path(f"{out_prefix}.json")
    csv_path = Path(f"{out_prefix}.csv")
    json_path.write_text(report.to_json())
    csv_path.write_text(report.to_csv())
    _emit(
        {
            "suite": config.suite,
            "pass": report.passed,
            "report_json": str(json_path),
            "report_csv": str(csv_path),
        }
    )
    return 0 if report.passed else _MATH_ERROR


def _cmd_report(args) -> int:
    doc = json.loads(Path(args.report).read_text())
    summary = doc.get("summary", {})
    _emit(
        {
            "suite": doc.get("suite"),
            "pass": summary.get("pass"),
            "n_records": summary.get("n_records"),
            "n_fail": summary.get("n_fail"),
            "worst_margin": summary.get("worst_margin"),
            "empirical_constant": summary.get("empirical_constant"),
        }
    )
    return 0 if summary.get("pass") else _MATH_ERROR


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-qha",
        description="Orlicz-space calculus and phase-space convolution toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    young = sub.add_parser("young", help="Young-function calculus")
    young.add_argument(
        "action",
        choices=[
            "exponents",
            "interpolate",
            "solve-theta",
            "check-relation",
            "construct-phi",
            "convexify",
            "check-equivalence",
        ],
    )
    young.add_argument("fn", nargs="+", help="Young function JSON (or @file)")
    young.add_argument("--theta", help="comma-separated interpolation weights")
    young.add_argument("--theta-j", type=float, help="single weight in (0,1)")
    young.add_argument("--knots", type=int, default=257,
                       help="envelope table size emitted by convexify")

    norm = sub.add_parser("norm", help="Orlicz / weak / Lp / Schatten norms")
    norm.add_argument("action", choices=["orlicz", "weak", "lp", "schatten"])
    norm.add_argument("--phi", help="Young function JSON (or @file)")
    norm.add_argument("--p", type=float, help="Lebesgue/Schatten exponent")
    norm.add_argument("--input", help="step CSV, grid blob/CSV, or operator blob")
    norm.add_argument(
        "--indicator", type=float, help="indicator step function of this measure"
    )
    norm.add_argument("--diag", help="comma-separated diagonal entries")

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("config", help="SuiteConfig JSON path")

    report = sub.add_parser("report", help="summarize a report JSON")
    report.add_argument("report", help="report JSON path")

    return parser


_HANDLERS = {
    "young": _cmd_young,
    "norm": _cmd_norm,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except _MATH_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _MATH_ERROR
    except (ValueError, KeyError, OSError, json.JSONDecodeError,
            errors.DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
