"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 degenerate geometry,
3 verification failure (``verify --strict`` and ``selfcheck``). Errors are
written to stderr as one JSON object ``{"code": ..., "message": ...}``.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bertrand, io, selfcheck
from .config import load_config
from .errors import LieBertrandError, ValidationError
from .frenet import classify, integrate_frenet
from .indicatrix import KINDS, indicatrix
from .verify import run_full_verification

EXIT_OK, EXIT_VALIDATION, EXIT_GEOMETRY, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(ValidationError):
    code = "usage_error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="RunConfig JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", type=float,
                        help="tolerance of the subcommand's main test")
    common.add_argument("--epsilon", type=int, choices=(1, -1))
    common.add_argument("--samples", type=int, help="override curve.n")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="liebertrand",
                     description="Bertrand curves and spherical indicatrices "
                                 "in 3-dimensional Lie groups.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    sub.add_parser("apparatus", parents=[common],
                   help="integrate the curve and emit its Frenet apparatus")
    sub.add_parser("classify", parents=[common],
                   help="planar / general helix / slant helix verdicts")
    sub.add_parser("bertrand", parents=[common],
                   help="Bertrand test and partner apparatus")
    p = sub.add_parser("indicatrix", parents=[common],
                       help="closed-form apparatus of one indicatrix")
    p.add_argument("--kind", choices=("t", "n", "b"), required=True)
    p = sub.add_parser("verify", parents=[common],
                       help="residual report for every closed form")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 unless every report passes")
    sub.add_parser("sphere-export", parents=[common],
                   help="indicatrix samples on the unit sphere")
    sub.add_parser("selfcheck", parents=[common],
                   help="randomized algebra and round-trip checks")
    return parser


def _config(args):
    if not args.config:
        raise UsageError("--config is required for this command")
    cfg = load_config(args.config)
    if args.samples is not None:
        cfg.spec = cfg.spec.with_samples(args.samples)
    if args.epsilon is not None:
        cfg.epsilon = args.epsilon
    return cfg


def _emit(args, cfg, text):
    path = args.out or (cfg.output_path if cfg is not None else None)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _format(args, cfg, default):
    return args.format or (cfg.output_format if cfg else None) or default


def cmd_apparatus(args):
    cfg = _config(args)
    app = integrate_frenet(cfg.spec)
    if _format(args, cfg, "csv") == "csv":
        text = io.format_csv(io.APPARATUS_COLUMNS, io.apparatus_table(app))
    else:
        text = io.format_json(io.apparatus_dict(app))
    _emit(args, cfg, text)
    return EXIT_OK


def cmd_classify(args):
    cfg = _config(args)
    tol = args.tol if args.tol is not None else cfg.tolerance["classify"]
    verdict = classify(integrate_frenet(cfg.spec), tol)
    _emit(args, cfg, io.format_json({"tol": tol, **verdict.as_dict()}))
    return EXIT_OK


def cmd_bertrand(args):
    cfg = _config(args)
    tol = args.tol if args.tol is not None else cfg.tolerance["pair"]
    app = integrate_frenet(cfg.spec)
    report = bertrand.check_bertrand(app, cfg.epsilon, tol)
    mate = bertrand.mate_apparatus(app, cfg.epsilon)
    if _format(args, cfg, "json") == "csv":
        columns = io.APPARATUS_COLUMNS + ("s_partner", "kappa_signed", "flagged")
        table = np.column_stack([io.apparatus_table(mate.derived),
                                 mate.s_of_sstar, mate.kappa_signed,
                                 mate.flags.astype(float)])
        text = io.format_csv(columns, table)
    else:
        text = io.format_json({
            "report": report.summary(),
            "mate": {
                "columns": list(io.APPARATUS_COLUMNS),
                "rows": io.apparatus_table(mate.derived),
                "s_partner": mate.s_of_sstar,
                "kappa_signed": mate.kappa_signed,
                "flagged": mate.flags,
            },
        })
    _emit(args, cfg, text)
    return EXIT_OK


def cmd_indicatrix(args):
    cfg = _config(args)
    ind = indicatrix(integrate_frenet(cfg.spec), args.kind, cfg.epsilon)
    table = io.indicatrix_table(ind)
    if _format(args, cfg, "csv") == "csv":
        text = io.format_csv(io.INDICATRIX_COLUMNS, table)
    else:
        text = io.format_json({"kind": ind.kind, "epsilon": ind.epsilon,
                               "columns": list(io.INDICATRIX_COLUMNS),
                               "rows": table})
    _emit(args, cfg, text)
    return EXIT_OK


def cmd_sphere_export(args):
    cfg = _config(args)
    app = integrate_frenet(cfg.spec)
    inds = {k: indicatrix(app, k, cfg.epsilon) for k in KINDS}
    table = io.sphere_table(inds)
    if _format(args, cfg, "csv") == "csv":
        text = io.format_csv(io.SPHERE_COLUMNS, table)
    else:
        text = io.format_json({"epsilon": cfg.epsilon,
                               "columns": list(io.SPHERE_COLUMNS),
                               "rows": table})
    _emit(args, cfg, text)
    return EXIT_OK


def format_table(bundle):
    lines = [f"{'equation':<20} {'verdict':<10} {'max_abs':>11} {'tol':>8}  note"]
    for rep in bundle.reports:
        for c in (rep.components or [rep]):
            lines.append(f"{c.equation_id:<20} {c.verdict:<10} "
                         f"{c.max_abs:>11.3e} {c.tolerance:>8.0e}  {c.note[:60]}")
    s = bundle.to_dict()["summary"]
    lines.append(f"{s['n_pass']}/{s['n_equations']} equations pass, "
                 f"{s['n_fail']} fail, {s['n_degenerate']} degenerate; "
                 f"oracle self-consistent: {s['self_consistent']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    cfg = _config(args)
    profile = dict(cfg.tolerance)
    if args.tol is not None:
        for key in ("algebraic", "first", "second"):
            profile[key] = args.tol
    bundle = run_full_verification(cfg.spec, cfg.epsilon, profile)
    doc = io.format_json(bundle.to_dict())
    out = args.out or cfg.output_path
    if out:
        Path(out).write_text(doc, encoding="utf-8")
        sys.stdout.write(format_table(bundle))
    elif _format(args, cfg, "json") == "json" and args.format:
        sys.stdout.write(doc)
    else:
        sys.stdout.write(format_table(bundle))
    if args.strict and not (bundle.all_passed and bundle.self_consistent):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_selfcheck(args):
    trials = args.samples if args.samples is not None else 1000
    result = selfcheck.run_selfcheck(seed=args.seed, trials=trials)
    _emit(args, None, io.format_json(result))
    return EXIT_OK if result["ok"] else EXIT_VERIFY


COMMANDS = {
    "apparatus": cmd_apparatus,
    "classify": cmd_classify,
    "bertrand": cmd_bertrand,
    "indicatrix": cmd_indicatrix,
    "verify": cmd_verify,
    "sphere-export": cmd_sphere_export,
    "selfcheck": cmd_selfcheck,
}


def _fail(code, message, exit_code):
    sys.stderr.write(json.dumps({"code": code, "message": message}) + "\n")
    return exit_code


def cli_main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        # downstream reader (e.g. ``head``) closed the pipe early
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except LieBertrandError as exc:
        sys.stderr.write(json.dumps(io.jsonable(exc.to_dict())) + "\n")
        return exc.exit_code
    except ValueError as exc:
        return _fail("validation_error", str(exc), EXIT_VALIDATION)
    except OSError as exc:
        return _fail("io_error", str(exc), EXIT_VALIDATION)


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
