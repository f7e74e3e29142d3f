"""Command-line interface.

Subcommands: rate, phase, exact, sample, saddle, validate. Every run writes
a manifest (<output>.manifest.json) recording the subcommand, the full
parameter set, the tool version, the output paths, and the wall-clock time;
JSON outputs carry a "manifest" key pointing back at it. Data outputs are
byte-reproducible for fixed seeds; manifests are not, since they record
timing.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 domain error.

A plain-text configuration file of `key = value` lines may supply defaults
for any long flag (without the leading dashes, hyphens or underscores both
accepted); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, oracle, rates, sampler, trees, validate
from .errors import DomainError, EnumerationLimitError
from .textio import fmt17, json_dumps, write_text

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _read_config(path):
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(args, parser_defaults):
    """Fill argparse results from the config file, flags taking precedence.

    A flag is considered explicit when it differs from the parser default;
    config values are parsed with the same type as the existing default.
    """
    if not getattr(args, "config", None):
        return args
    values = _read_config(args.config)
    for key, raw in values.items():
        if not hasattr(args, key):
            continue
        current = getattr(args, key)
        default = parser_defaults.get(key)
        if current != default:
            continue  # explicitly set on the command line
        if isinstance(default, bool):
            parsed = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(default, int) and not isinstance(default, bool):
            parsed = int(raw)
        elif isinstance(default, float):
            parsed = float(raw)
        elif isinstance(default, list):
            parsed = [float(tok) for tok in raw.split()]
        else:
            parsed = raw
        setattr(args, key, parsed)
    return args


def _manifest(subcommand, args, outputs, started):
    doc = {
        "subcommand": subcommand,
        "parameters": {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func",)
        },
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "outputs": outputs,
        "wall_clock_seconds": time.time() - started,
    }
    return doc


def _write_manifest(path, doc):
    write_text(path, json.dumps(doc, indent=2, default=str) + "\n")


def cmd_rate(args):
    started = time.time()
    curve = rates.rate_curve(args.lam, args.q, args.grid_size)
    point = rates.phase_point(args.lam, args.q)
    json_out = args.json_out or args.out + ".phase.json"
    manifest_path = args.out + ".manifest.json"
    write_text(args.out, curve.to_csv())
    point_doc = json.loads(point.to_json())
    point_doc["manifest"] = manifest_path
    write_text(json_out, json_dumps(point_doc))
    _write_manifest(
        manifest_path, _manifest("rate", args, [args.out, json_out], started)
    )
    print(f"wrote {args.out} and {json_out}")
    return EXIT_OK


def cmd_phase(args):
    started = time.time()
    lines = ["lambda,q,lambda_c,theta_star,theta_max,free_energy"]
    lam = args.lambda_min
    grid = []
    while lam <= args.lambda_max + 1e-12:
        grid.append(lam)
        lam = round(lam + args.lambda_step, 12)
    for q in args.q:
        for lam in grid:
            point = rates.phase_point(lam, q)
            lines.append(
                ",".join(
                    fmt17(v)
                    for v in (
                        point.lam,
                        point.q,
                        point.lambda_c,
                        point.theta_star,
                        point.theta_max,
                        point.free_energy,
                    )
                )
            )
    manifest_path = args.out + ".manifest.json"
    write_text(args.out, "\n".join(lines) + "\n")
    _write_manifest(manifest_path, _manifest("phase", args, [args.out], started))
    print(f"wrote {args.out} ({len(lines) - 1} rows)")
    return EXIT_OK


def cmd_exact(args):
    started = time.time()
    params = oracle.ModelParams(n=args.n, lam=args.lam, q=args.q)
    report = oracle.enumerate_report(
        params, r_list=args.r, eps_list=args.eps, allow_large=args.allow_large
    )
    doc = report.to_json_dict()
    manifest_path = args.out + ".manifest.json"
    doc["manifest"] = manifest_path
    write_text(args.out, json_dumps(doc))
    _write_manifest(manifest_path, _manifest("exact", args, [args.out], started))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_sample(args):
    started = time.time()
    cfg = sampler.ChainConfig(
        params=oracle.ModelParams(n=args.n, lam=args.lam, q=args.q),
        seed=args.seed,
        burn_in_sweeps=args.burnin,
        sample_sweeps=args.sweeps,
        thin=args.thin,
        eps=tuple(args.eps),
        init=args.init,
    )
    summary_out = args.summary_out or args.out + ".summary.json"
    manifest_path = args.out + ".manifest.json"
    records = []
    with open(args.out, "w", newline="") as fh:
        try:
            record_iter = sampler.iter_records(cfg)
            first = True
            for rec in record_iter:
                if first:
                    fh.write(
                        next(sampler.samples_csv_lines([], len(cfg.eps))) + "\n"
                    )
                    first = False
                records.append(rec)
                row = list(sampler.samples_csv_lines([rec], len(cfg.eps)))[1]
                fh.write(row + "\n")
                fh.flush()
        except KeyboardInterrupt:
            print("interrupted; partial samples flushed", file=sys.stderr)
    summary = sampler.summarize(records, cfg.eps) if len(records) >= 20 else {
        "records": len(records)
    }
    summary["manifest"] = manifest_path
    write_text(summary_out, json_dumps(summary))
    _write_manifest(
        manifest_path,
        _manifest("sample", args, [args.out, summary_out], started),
    )
    print(f"wrote {args.out} ({len(records)} records) and {summary_out}")
    return EXIT_OK


def cmd_saddle(args):
    started = time.time()
    point = trees.solve_saddle(args.alpha, args.r)
    s_lim, th_lim, v_lim = trees.saddle_limits(args.alpha)
    doc = {
        "r": point.r,
        "alpha": fmt17(point.alpha),
        "s_r": fmt17(point.s),
        "theta_r": fmt17(point.theta),
        "value": fmt17(point.value),
        "s_limit": fmt17(s_lim),
        "theta_limit": fmt17(th_lim),
        "value_limit": fmt17(v_lim),
    }
    if args.n:
        discrete = trees.discrete_saddle(args.alpha, args.r, args.n)
        doc["n"] = args.n
        doc["s_rn"] = fmt17(discrete.s)
        doc["theta_rn"] = fmt17(discrete.theta)
        doc["value_n"] = fmt17(discrete.value)
    text = json_dumps(doc)
    if args.out:
        manifest_path = args.out + ".manifest.json"
        doc["manifest"] = manifest_path
        write_text(args.out, json_dumps(doc))
        _write_manifest(
            manifest_path, _manifest("saddle", args, [args.out], started)
        )
    print(text, end="")
    return EXIT_OK


def cmd_validate(args):
    started = time.time()
    results = validate.run_suite(args.level)
    for res in results:
        print(res.line())
    doc = {
        "level": args.level,
        "passed": all(r.passed for r in results),
        "criteria": [r.to_json_dict() for r in results],
    }
    if args.out:
        manifest_path = args.out + ".manifest.json"
        doc["manifest"] = manifest_path
        write_text(args.out, json_dumps(doc))
        _write_manifest(
            manifest_path, _manifest("validate", args, [args.out], started)
        )
    return EXIT_OK if doc["passed"] else EXIT_VALIDATION


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rcmtools",
        description=(
            "Rate functions, exact enumeration, and MCMC sampling for the "
            "random cluster model on the complete graph"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument(
            "--config",
            default=None,
            help="plain-text 'key = value' defaults file; flags override it",
        )

    p = sub.add_parser("rate", help="rate curve and phase summary at one (lambda, q)")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=rates.SUP_GRID_SIZE)
    p.add_argument("--out", required=True, help="CSV output path (theta, phi)")
    p.add_argument("--json-out", default=None, help="phase summary JSON path")
    add_common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("phase", help="phase table over a lambda grid")
    p.add_argument("--q", type=float, nargs="+", required=True)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--lambda-step", type=float, default=0.1)
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("exact", help="exhaustive small-n enumeration report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--r", type=int, nargs="*", default=[])
    p.add_argument("--eps", type=float, nargs="*", default=[])
    p.add_argument(
        "--allow-large",
        action="store_true",
        help="permit the 2^21-configuration n=7 sweep",
    )
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("sample", help="heat-bath MCMC run")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--burnin", type=int, default=100)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--eps", type=float, nargs="*", default=[])
    p.add_argument("--init", choices=("auto", "empty", "full"), default="auto")
    p.add_argument("--out", required=True, help="samples CSV path")
    p.add_argument("--summary-out", default=None)
    add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("saddle", help="order-r saddle point diagnostics")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r", type=int, default=200)
    p.add_argument("--n", type=int, default=None, help="also report the n-lattice point")
    p.add_argument("--out", default=None)
    add_common(p)
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--level", choices=(validate.QUICK, validate.FULL), default=validate.QUICK)
    p.add_argument("--out", default=None, help="JSON report path")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = {
        action.dest: action.default
        for action in parser._subparsers._group_actions[0].choices[
            args.subcommand
        ]._actions
    }
    try:
        args = _apply_config(args, defaults)
        return args.func(args)
    except (DomainError, EnumerationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
