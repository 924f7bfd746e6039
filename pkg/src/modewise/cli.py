"""Command-line entry points: recovery sweeps, distortion audits, bound calculators."""
from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    SCHEMES,
    parse_config,
    run_experiment,
    write_report,
)
from .measurement import save_operator
from .rip import (
    DISTORTION_SETS,
    M_BOUND_FORMULAS,
    dudley_estimate,
    estimate_distortion,
    eval_covering_bound,
    eval_m_bound,
)
from .harness import build_operator


def _add_run_parser(sub):
    p = sub.add_parser("run", help="run a recovery sweep and write a report")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--out", default="report.csv", help="output path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--noise", type=float, help="measurement noise norm")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--trials", type=int)
    p.add_argument("--m0", help="comma-separated target dimensions")
    p.add_argument("--intermediate-m", dest="intermediate_m", help="comma-separated intermediate dimensions")
    p.add_argument("--rank", help="comma-separated multilinear rank")
    p.add_argument("--quiet", action="store_true")


def _add_audit_parser(sub):
    p = sub.add_parser("audit", help="estimate distortion of one operator on a sample set")
    p.add_argument("--scheme", choices=SCHEMES, default="vectorized_gaussian")
    p.add_argument("--set", dest="set_label", choices=DISTORTION_SETS, default="s1")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--m", type=int, default=80, help="intermediate dimension")
    p.add_argument("--m0", type=int, default=500, help="target dimension")
    p.add_argument("--rank", help="rank for the lowrank set, e.g. 2,2,2,2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON record here instead of stdout")
    p.add_argument("--save-operator", dest="save_op", help="serialize the audited operator")


def _add_bounds_parser(sub):
    p = sub.add_parser("bounds", help="evaluate sample-size and covering bounds")
    p.add_argument("--formula", choices=M_BOUND_FORMULAS)
    p.add_argument("--covering", choices=("s12", "fancyb"))
    p.add_argument("--dudley", choices=("s12", "fancyb"))
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--t", type=float, default=1.0, help="covering radius")
    p.add_argument("--big-r", dest="big_r", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument(
        "--constants",
        help="comma-separated constant overrides, e.g. C=2,C1=4",
    )
    p.add_argument("--out", help="write the JSON record here instead of stdout")


def _emit(record: dict, out: str | None):
    payload = json.dumps(record, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.noise is not None:
        overrides["noise_norm"] = args.noise
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    if args.trials is not None:
        overrides["trials"] = args.trials
    for key in ("m0", "intermediate_m", "rank"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    spec = parse_config(args.config, overrides)
    log = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
    report = run_experiment(spec, threads=args.threads, log=log)
    write_report(report, args.format, args.out)
    if not args.quiet:
        print(f"wrote {len(report.rows)} rows to {args.out}", file=sys.stderr)
        for skip in report.skipped:
            print(f"skipped cell: {skip['reason']}", file=sys.stderr)
    return 0


def _cmd_audit(args) -> int:
    op = build_operator(args.scheme, args.n, args.d, args.kappa, args.m, args.m0, args.seed)
    rank = tuple(int(v) for v in args.rank.split(",")) if args.rank else None
    est = estimate_distortion(op, args.set_label, args.samples, seed=args.seed, rank=rank)
    record = est.to_record()
    record["scheme"] = args.scheme
    record["operator"] = {
        "input_shape": list(op.input_shape),
        "output_length": op.output_length,
        "storage_entries": op.storage_entries(),
    }
    if args.save_op:
        save_operator(op, args.save_op)
        record["operator"]["sidecar"] = args.save_op
    _emit(record, args.out)
    return 0


def _parse_constants(raw: str | None) -> dict:
    constants = {}
    for item in (raw or "").split(","):
        item = item.strip()
        if not item:
            continue
        name, value = item.split("=", 1)
        constants[name.strip()] = float(value)
    return constants


def _cmd_bounds(args) -> int:
    if sum(x is not None for x in (args.formula, args.covering, args.dudley)) != 1:
        raise SystemExit("bounds: give exactly one of --formula, --covering, --dudley")
    if args.formula:
        report = eval_m_bound(
            args.formula,
            delta=args.delta,
            r=args.r,
            d=args.d,
            kappa=args.kappa,
            n=args.n,
            eta=args.eta,
            constants=_parse_constants(args.constants),
        )
        _emit(report.to_record(), args.out)
        return 0
    params = {"n": args.n, "kappa": args.kappa, "r": args.r, "d": args.d,
              "big_r": args.big_r, "mu": args.mu}
    if args.covering:
        names = {"s12": ("n", "kappa"), "fancyb": ("r", "d", "n", "big_r", "mu")}[args.covering]
        kwargs = {k: params[k] for k in names}
        record = {
            "set": args.covering,
            "t": args.t,
            "inputs": kwargs,
            "log_covering_bound": eval_covering_bound(args.covering, args.t, **kwargs),
        }
    else:
        names = {"s12": ("n", "kappa"), "fancyb": ("r", "d", "n", "big_r", "mu")}[args.dudley]
        kwargs = {k: params[k] for k in names}
        record = {
            "set": args.dudley,
            "inputs": kwargs,
            "dudley_integral": dudley_estimate(args.dudley, **kwargs),
        }
    _emit(record, args.out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="modewise",
        description="Modewise compression operators and low-rank tensor recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    _add_audit_parser(sub)
    _add_bounds_parser(sub)
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "audit": _cmd_audit, "bounds": _cmd_bounds}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
