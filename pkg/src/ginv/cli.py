"""Command-line interface.

Subcommands:
  compute    instance file {a, p, q} -> inverse with prescribed idempotents
  exists     instance file -> existence report with the individual conditions
  gap        two basis files -> directed and symmetric gap between subspaces
  perturb    scenario file -> update formula result plus equivalence checks
  verify     one check id against a scenario file or a generated ensemble
  ensemble   campaign over every configured check id

Exit codes: 0 all checks passed (or the requested object was produced),
1 a mathematical check failed or the requested inverse does not exist,
2 malformed input, unknown ids, or generation problems.

The environment variable GINV_DEFAULT_TOL overrides the default equality
tolerance; --tol-rank/--tol-eq/--tol-inv override individual fields and win
over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import GenerationFailed, GinvError, InputError, NotExists
from .gen_inverse import (
    compute_outer_pql,
    compute_outer_pql_exact,
    exists_outer_pql,
)
from .harness import run_campaign, run_check
from .linalg import DEFAULT_TOL, Tolerances
from .perturbation import update_formula
from .serialize import (
    bound_reports_to_csv,
    campaign_report_to_json,
    config_from_json,
    dump_file,
    dumps,
    equivalence_report_to_json,
    exact_matrix_from_json,
    exact_matrix_to_json,
    existence_report_to_json,
    gap_result_to_json,
    ginv_result_to_json,
    idempotent_from_json,
    implication_report_to_json,
    load_file,
    matrix_from_json,
    matrix_to_json,
    scenario_from_json,
)
from .subspaces import Subspace, gap, orth_basis

__all__ = ["cli", "main"]


def _resolve_tol(args, base: Tolerances = DEFAULT_TOL) -> Tolerances:
    tol_eq = base.tol_eq
    env = os.environ.get("GINV_DEFAULT_TOL")
    if env is not None:
        try:
            tol_eq = float(env)
        except ValueError as e:
            raise InputError(f"GINV_DEFAULT_TOL is not a number: {env!r}") from e
    return Tolerances(
        tol_rank=args.tol_rank if args.tol_rank is not None else base.tol_rank,
        tol_eq=args.tol_eq if args.tol_eq is not None else tol_eq,
        tol_inv=args.tol_inv if args.tol_inv is not None else base.tol_inv,
    )


def _emit(obj, out_path):
    text = dumps(obj)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        print(text)


def _add_tol_flags(sp):
    sp.add_argument("--tol-rank", type=float, default=None)
    sp.add_argument("--tol-eq", type=float, default=None)
    sp.add_argument("--tol-inv", type=float, default=None)


def _load_instance(path, tol):
    d = load_file(path)
    try:
        a = matrix_from_json(d["a"])
        p = idempotent_from_json(d["p"], tol)
        q = idempotent_from_json(d["q"], tol)
    except KeyError as e:
        raise InputError(f"instance file is missing field {e}") from e
    return a, p, q


def _cmd_compute(args) -> int:
    tol = _resolve_tol(args)
    d = load_file(args.infile)
    if args.exact:
        try:
            a = exact_matrix_from_json(d["a"])
            p = exact_matrix_from_json(d["p"])
            q = exact_matrix_from_json(d["q"])
        except KeyError as e:
            raise InputError(f"instance file is missing field {e}") from e
        try:
            b = compute_outer_pql_exact(a, p, q)
        except NotExists as e:
            print(f"does not exist: {e}", file=sys.stderr)
            return 1
        out = {
            "exact": True,
            "b": exact_matrix_to_json(b),
            "b_float": matrix_to_json(b.to_complex()),
            "checks": {
                "bab_equals_b": (b @ a @ b - b).is_zero(),
                "aba_equals_a": (a @ b @ a - a).is_zero(),
            },
        }
        _emit(out, args.out)
        return 0
    a, p, q = _load_instance(args.infile, tol)
    try:
        res = compute_outer_pql(a, p, q, tol)
    except NotExists as e:
        print(f"does not exist: {e}", file=sys.stderr)
        return 1
    _emit(ginv_result_to_json(res), args.out)
    return 0


def _cmd_exists(args) -> int:
    tol = _resolve_tol(args)
    a, p, q = _load_instance(args.infile, tol)
    report = exists_outer_pql(a, p, q, tol)
    _emit(existence_report_to_json(report), args.out)
    return 0


def _cmd_gap(args) -> int:
    tol = _resolve_tol(args)
    m = matrix_from_json(load_file(args.m))
    n = matrix_from_json(load_file(args.n))
    if m.shape[0] != n.shape[0]:
        raise InputError("the two subspaces live in different ambient dimensions")
    sm = Subspace(m.shape[0], orth_basis(m, tol))
    sn = Subspace(n.shape[0], orth_basis(n, tol))
    _emit(gap_result_to_json(gap(sm, sn)), args.out)
    return 0


def _cmd_perturb(args) -> int:
    tol = _resolve_tol(args)
    s = scenario_from_json(load_file(args.infile), tol)
    out = {}
    code = 0
    try:
        base = compute_outer_pql(s.a, s.p, s.q, s.tol)
        upd = update_formula(base.b, s.delta_a, s.tol)
        out["update"] = matrix_to_json(upd)
    except NotExists as e:
        out["update"] = None
        out["update_error"] = str(e)
    checks = {}
    for name in ("thm2.4", "lemma2.6", "thm2.7", "cor2.8"):
        try:
            kind, report = run_check(name, s)
            checks[name] = equivalence_report_to_json(report)
            if not report.consistent:
                code = 1
        except NotExists as e:
            checks[name] = {"error": str(e)}
    out["checks"] = checks
    _emit(out, args.out)
    return code


def _write_csv(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bound_reports_to_csv(rows))


def _campaign(config, args) -> int:
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    tol = _resolve_tol(args, config.tolerances)
    config = replace(config, tolerances=tol)
    csv_rows = []

    def collect(theorem, index, kind, report):
        if kind == "bound":
            csv_rows.append(report)

    report = run_campaign(config, on_report=collect if args.csv else None)
    _emit(campaign_report_to_json(report), args.out)
    if args.csv:
        _write_csv(csv_rows, args.csv)
    return 0 if report.ok else 1


def _cmd_verify(args) -> int:
    theorem = args.theorem_pos or args.theorem
    if not theorem:
        raise InputError("verify needs a check id (positional or --theorem)")
    if args.infile:
        tol = _resolve_tol(args)
        s = scenario_from_json(load_file(args.infile), tol)
        kind, report = run_check(theorem, s)
        if kind == "bound":
            _emit(
                {"kind": kind, "report": _bound_json(report)},
                args.out,
            )
            if args.csv:
                _write_csv([report], args.csv)
            return 0 if report.holds else 1
        if kind == "equiv":
            _emit({"kind": kind, "report": equivalence_report_to_json(report)}, args.out)
            return 0 if report.consistent else 1
        _emit({"kind": kind, "report": implication_report_to_json(report)}, args.out)
        return 0 if report.ok else 1
    if args.config:
        config = config_from_json(load_file(args.config))
        config = replace(config, theorems=(theorem,))
        return _campaign(config, args)
    raise InputError("verify needs --in or --config")


def _bound_json(report):
    from .serialize import bound_report_to_json

    return bound_report_to_json(report)


def _cmd_ensemble(args) -> int:
    if not args.config:
        raise InputError("ensemble needs --config")
    config = config_from_json(load_file(args.config))
    return _campaign(config, args)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ginv",
        description="inverses with prescribed idempotents: compute, check, campaign",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("compute", help="inverse for one instance file")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--exact", action="store_true")
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_compute)

    sp = sub.add_parser("exists", help="existence report for one instance file")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_exists)

    sp = sub.add_parser("gap", help="gap between two subspaces given by basis files")
    sp.add_argument("--m", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--out", default=None)
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_gap)

    sp = sub.add_parser("perturb", help="update formula plus equivalence checks")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_perturb)

    sp = sub.add_parser("verify", help="run one check id on a scenario or an ensemble")
    sp.add_argument("theorem_pos", nargs="?", default=None, metavar="check-id")
    sp.add_argument("--theorem", default=None)
    sp.add_argument("--in", dest="infile", default=None)
    sp.add_argument("--config", default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None)
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("ensemble", help="campaign over a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None)
    _add_tol_flags(sp)
    sp.set_defaults(fn=_cmd_ensemble)

    return ap


def cli(argv=None) -> int:
    """Parse and execute; returns the process exit code."""
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        return args.fn(args)
    except (InputError, GenerationFailed) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except GinvError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))
