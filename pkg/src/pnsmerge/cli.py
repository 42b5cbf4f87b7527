"""Command-line front end.

Exit codes: 0 success, 1 input or configuration error, 2 incompatible
trials, 3 falsified hypothesis.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bounds import (
    check_compatibility,
    degeneracy_profile,
    restricted_lambda_range,
    tightened_pns_bounds,
)
from .errors import DimensionTooHigh, Incompatible, Infeasible, PnsMergeError
from .info import falsify_by_conditional_info, falsify_by_marginal_info, info_bounds, info_report
from .maxent import maxent_lambda_single, maxent_scm, single_entropy
from .oracle import GridSpec, grid_lambda_range
from .polytope import build_polytope
from .scm import lambda_range, pns_bounds_single, pns_from_lambda
from .sweep import SweepConfig, fmt, rows_to_csv, run_sweep
from .trial_data import parse_marginal, parse_trivariate

EXIT_OK, EXIT_INPUT, EXIT_INCOMPATIBLE, EXIT_FALSIFIED = 0, 1, 2, 3


class InputError(Exception):
    """Unreadable file or unusable argument."""


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return fmt(float(obj))


def _emit(report: dict, as_json: bool) -> None:
    report = _round(report)
    if as_json:
        print(json.dumps(report))
        return
    for key, value in report.items():
        print(f"{key}: {json.dumps(value)}")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def load_marginal(path: str):
    fmt_name = "csv" if path.lower().endswith(".csv") else "json"
    return parse_marginal(_read(path), fmt_name)


def _dump(args, mX, mY) -> None:
    if args.dump_polytope:
        Path(args.dump_polytope).write_text(build_polytope(mX, mY).to_json())


def _incompatible(report: dict, violated) -> int:
    report.update(compatible=False, violated=list(violated))
    return EXIT_INCOMPATIBLE


def cmd_bounds(args) -> tuple[dict, int]:
    mX, mY = load_marginal(args.trial_x), load_marginal(args.trial_y)
    _dump(args, mX, mY)
    report = {
        "single": {"lambda": lambda_range(mX).as_list(), "pns": pns_bounds_single(mX).as_list()},
        "degenerate": degeneracy_profile(mY).flags(),
    }
    try:
        tb = tightened_pns_bounds(mX, mY, verify=args.verify)
    except Incompatible as exc:
        return report, _incompatible(report, exc.violated)
    report.update(tb.to_dict())
    if args.verify:
        report["verify"] = _grid_check(mX, mY, tb.lam)
    return report, EXIT_OK


def _grid_check(mX, mY, lam) -> dict:
    g = GridSpec(resolution=100, dimension_cap=3)
    try:
        grid = grid_lambda_range(build_polytope(mX, mY), g)
    except (DimensionTooHigh, Infeasible) as exc:
        return {"grid": None, "skipped": str(exc)}
    step = 1.0 / g.resolution
    ok = lam.lo - 1e-9 <= grid.lo <= lam.lo + step + 1e-9 and lam.hi - step - 1e-9 <= grid.hi <= lam.hi + 1e-9
    return {"grid": grid.as_list(), "resolution": g.resolution, "agrees": ok}


def cmd_compat(args) -> tuple[dict, int]:
    mX, mY = load_marginal(args.trial_x), load_marginal(args.trial_y)
    _dump(args, mX, mY)
    degenerate = degeneracy_profile(mY).is_degenerate
    rep = check_compatibility(mX, mY)
    report = {"method": "certificate" if degenerate else "lp", "compatible": rep.compatible,
              "violated": list(rep.violated)}
    if args.verify and degenerate:
        try:
            restricted_lambda_range(mX, mY)
            lp_ok = True
        except Incompatible:
            lp_ok = False
        report["verify"] = {"lp_feasible": lp_ok, "agrees": lp_ok == rep.compatible}
    return report, EXIT_OK if rep.compatible else EXIT_INCOMPATIBLE


def cmd_maxent(args) -> tuple[dict, int]:
    mX = load_marginal(args.trial_x)
    if args.trial_y is None:
        lam = maxent_lambda_single(mX)
        report = {"lambda_x": lam, "pns": pns_from_lambda(mX, lam), "entropy_bits": single_entropy(mX, lam)}
        return report, EXIT_OK
    mY = load_marginal(args.trial_y)
    _dump(args, mX, mY)
    try:
        res = maxent_scm(build_polytope(mX, mY))
    except Incompatible:
        report = {}
        return report, _incompatible(report, check_compatibility(mX, mY).violated)
    report = res.to_dict()
    report["pns"] = pns_from_lambda(mX, res.lambda_x)
    return report, EXIT_OK


def cmd_info(args) -> tuple[dict, int]:
    if args.hyp is not None:
        if (args.trial_y is None) == (args.trivariate is None):
            raise InputError("--hyp needs exactly one of --trial-y or --trivariate")
        if args.trial_y is not None:
            verdict = falsify_by_marginal_info(args.hyp, load_marginal(args.trial_y))
        else:
            verdict = falsify_by_conditional_info(args.hyp, parse_trivariate(_read(args.trivariate)))
        return verdict.to_dict(), EXIT_FALSIFIED if verdict.falsified else EXIT_OK
    if args.trial_x is None or args.lam is None:
        raise InputError("info needs TRIAL_X and --lambda, or --hyp with a comparison dataset")
    mX = load_marginal(args.trial_x)
    report = info_report(mX, args.lam).to_dict()
    nz, xz = info_bounds(mX)
    report["bounds"] = {"i_nz_z": nz.as_list(), "i_xz_given_nz": xz.as_list()}
    return report, EXIT_OK


def cmd_sweep(args) -> tuple[dict, int]:
    cfg = SweepConfig.from_json(_read(args.config))
    rows = run_sweep(cfg, workers=args.workers)
    try:
        Path(args.out).write_text(rows_to_csv(rows))
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror}") from exc
    return {"rows": len(rows), "compatible": sum(r["compatible"] for r in rows), "out": args.out}, EXIT_OK


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--json", action="store_true", default=default, help="emit JSON")
    p.add_argument("--verify", action="store_true", default=default, help="run oracle cross-checks")
    p.add_argument("--dump-polytope", metavar="PATH", default=default, help="write the polytope as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnsmerge", description="Merge two trials to bound PNS.")
    _global_flags(parser, None)
    shared = argparse.ArgumentParser(add_help=False)
    # subcommand copies must not reset values given before the subcommand
    _global_flags(shared, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[shared], help="tightened PNS bounds")
    p.add_argument("trial_x")
    p.add_argument("trial_y")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compat", parents=[shared], help="compatibility check")
    p.add_argument("trial_x")
    p.add_argument("trial_y")
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("maxent", parents=[shared], help="MaxEnt model")
    p.add_argument("trial_x")
    p.add_argument("trial_y", nargs="?")
    p.set_defaults(func=cmd_maxent)

    p = sub.add_parser("info", parents=[shared], help="information report or falsification test")
    p.add_argument("trial_x", nargs="?")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--hyp", type=float, help="hypothesised information in bits")
    p.add_argument("--trial-y")
    p.add_argument("--trivariate")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("sweep", parents=[shared], help="grid sweep to CSV")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        report, code = args.func(args)
    except (InputError, PnsMergeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, bool(args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
