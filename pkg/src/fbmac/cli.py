"""Command-line front end.

Every run writes a provenance header (``#`` lines for CSV, a ``provenance``
object for structured output) followed by the body. Numbers are written with
17 significant digits; rates are in nats unless ``--bits`` is given.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .bounds import bound_triple
from .channel import ChannelError, InputPair, load_channel, simplex_grid
from .kernels import BACKEND
from .measures import WHICH, density_table, moments
from .region import capacity_region, outer_region
from .simulate import converse_check, exact_error, monte_carlo_error, random_codebook
from .tails import GuardExceeded, InfeasibleTarget

MODES = ("explicit-exact", "explicit-be", "normal")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _eps(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < val < 1.0:
        raise argparse.ArgumentTypeError(f"eps must lie in (0, 1), got {text}")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return val


def _prob_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated probabilities, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fbmac", description="Finite-blocklength converse regions for two-user DM-MACs.")
    parser.add_argument("--version", action="version", version=f"fbmac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, channel=True, n=False, eps=False, mode=False, inputs=False, grid=False):
        if channel:
            p.add_argument("--channel", required=True, help="channel file (JSON)")
        if n:
            p.add_argument("--n", type=_positive_int, required=True, help="blocklength")
        if eps:
            p.add_argument("--eps", type=_eps, required=True, help="average error probability")
        if mode:
            p.add_argument("--mode", choices=MODES, default="explicit-exact")
        if inputs:
            p.add_argument("--uniform", action="store_true", help="uniform inputs (default)")
            p.add_argument("--p1", type=_prob_list, help="input law of sender 1, e.g. 0.3,0.7")
            p.add_argument("--p2", type=_prob_list, help="input law of sender 2")
        if grid:
            p.add_argument("--grid", type=_positive_int, default=32, help="simplex grid resolution")
            p.add_argument("--lambdas", type=_positive_int, default=101, help="number of sweep directions")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "structured"), default=None)
        p.add_argument("--bits", action="store_true", help="report rates in bits instead of nats")

    p = sub.add_parser("info", help="moments of the three information densities")
    common(p, inputs=True)
    p.add_argument("--sweep", type=_positive_int, metavar="RES", help="every input pair on a simplex grid")

    p = sub.add_parser("bounds", help="converse bound triple at fixed inputs")
    common(p, n=True, eps=True, mode=True, inputs=True)

    p = sub.add_parser("region", help="outer region sweep")
    common(p, n=True, eps=True, mode=True, grid=True)
    p.add_argument("--u", type=int, choices=(1, 2, 3), default=1, help="time-sharing cardinality")
    p.add_argument("--pad", action="store_true", help="add grid Lipschitz padding to every constraint")

    p = sub.add_parser("capacity", help="first-order capacity region")
    common(p, grid=True)

    p = sub.add_parser("validate", help="tail-engine oracle battery")
    common(p, channel=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=_positive_int, default=40)

    p = sub.add_parser("simulate", help="random code, exact ML error, converse check")
    common(p, n=True, mode=True, inputs=True)
    p.add_argument("--m1", type=_positive_int, default=2)
    p.add_argument("--m2", type=_positive_int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-grid", type=_positive_int, default=16)
    p.add_argument("--mc-trials", type=int, default=0, help="also estimate the error by sampling")
    return parser


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _provenance(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    labels = []
    mode = getattr(args, "mode", None)
    if mode == "normal":
        labels.append("approximation")
    elif mode:
        labels.append("bound")
    return {"tool": "fbmac", "version": __version__, "backend": BACKEND, "config": config, "labels": labels,
            "units": "bits" if args.bits else "nats"}


def _emit(args, rows: list, columns: list, record: dict | None = None) -> str:
    fmt = args.format or ("csv" if rows and record is None else "structured")
    prov = _provenance(args)
    if fmt == "csv":
        lines = [f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}" for k, v in prov.items()]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(row.get(c)) for c in columns))
        return "\n".join(lines) + "\n"
    doc = {"provenance": prov}
    if record is not None:
        doc.update(record)
    if rows:
        doc["rows"] = [{c: row.get(c) for c in columns} for row in rows]
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _inputs(args, channel) -> InputPair:
    p1 = args.p1 if args.p1 is not None else np.full(channel.x1_size, 1.0 / channel.x1_size)
    p2 = args.p2 if args.p2 is not None else np.full(channel.x2_size, 1.0 / channel.x2_size)
    return InputPair(p1, p2)


def _moment_row(table, scale) -> dict:
    row = {}
    for w, key in zip(WHICH, ("1", "2", "12")):
        m = moments(table, w)
        row[f"I{key}"] = m.mean * scale
        row[f"V{key}"] = m.variance * scale**2
        row[f"T{key}"] = m.third_abs_central * scale**3
    return row


def cmd_info(args) -> str:
    channel = load_channel(args.channel)
    scale = 1.0 / math.log(2) if args.bits else 1.0
    keys = [f"{s}{k}" for k in ("1", "2", "12") for s in "IVT"]
    if args.sweep:
        rows = []
        for a in simplex_grid(channel.x1_size, args.sweep):
            for b in simplex_grid(channel.x2_size, args.sweep):
                row = {"p1": "|".join(_fmt(x) for x in a), "p2": "|".join(_fmt(x) for x in b)}
                row.update(_moment_row(density_table(channel, InputPair(a, b)), scale))
                rows.append(row)
        return _emit(args, rows, ["p1", "p2"] + keys)
    inp = _inputs(args, channel)
    record = {"p1": inp.p1, "p2": inp.p2, **_moment_row(density_table(channel, inp), scale)}
    if args.format == "csv":
        return _emit(args, [record | {"p1": "|".join(map(_fmt, inp.p1)), "p2": "|".join(map(_fmt, inp.p2))}],
                     ["p1", "p2"] + keys)
    return _emit(args, [], [], record)


def cmd_bounds(args) -> str:
    channel = load_channel(args.channel)
    inp = _inputs(args, channel)
    t = bound_triple(channel, inp, args.n, args.eps, args.mode)
    scale = 1.0 / math.log(2) if args.bits else 1.0
    record = {"mode": t.mode, "b1": t.b1 * scale, "b2": t.b2 * scale, "b12": t.b12 * scale,
              "diagnostics": t.diagnostics}
    if args.format == "csv":
        return _emit(args, [record], ["mode", "b1", "b2", "b12"])
    return _emit(args, [], [], record)


def _region_rows(region, scale) -> list:
    # b1, b2, b12 are the per-use pentagon sides the point was taken from
    rows = []
    for pt in region.points:
        p = pt.pentagon
        rows.append({"lambda": pt.lam, "R1": pt.r1 * scale, "R2": pt.r2 * scale,
                     "b1": p.a * scale, "b2": p.b * scale, "b12": p.c * scale})
    return rows


REGION_COLUMNS = ["lambda", "R1", "R2", "b1", "b2", "b12"]


def cmd_region(args) -> str:
    channel = load_channel(args.channel)
    region = outer_region(channel, args.n, args.eps, args.grid, args.lambdas, args.mode, args.u, pad=args.pad)
    scale = 1.0 / math.log(2) if args.bits else 1.0
    args.format = args.format or "csv"
    return _emit(args, _region_rows(region, scale), REGION_COLUMNS)


def cmd_capacity(args) -> str:
    channel = load_channel(args.channel)
    region = capacity_region(channel, args.grid, args.lambdas)
    scale = 1.0 / math.log(2) if args.bits else 1.0
    args.format = args.format or "csv"
    return _emit(args, _region_rows(region, scale), REGION_COLUMNS)


def cmd_validate(args) -> str:
    from .validation import tail_battery

    results = tail_battery(seed=args.seed, cases=args.cases)
    args.format = args.format or "csv"
    text = _emit(args, results, ["check", "cases", "passed", "worst"])
    if not all(r["passed"] for r in results):
        raise _Failed("tail-engine oracle battery reported failures", text)
    return text


def cmd_simulate(args) -> str:
    channel = load_channel(args.channel)
    inp = _inputs(args, channel)
    code = random_codebook(channel, inp, args.m1, args.m2, args.n, args.seed)
    report = exact_error(channel, code)
    record = {
        "n": args.n, "m1": args.m1, "m2": args.m2, "seed": args.seed,
        "cw1": code.cw1, "cw2": code.cw2,
        "epsilon": report.epsilon, "eps_pair": report.eps_pair,
        "eps_row": report.eps_row, "eps_col": report.eps_col,
    }
    if args.mc_trials:
        est, hw = monte_carlo_error(channel, code, args.mc_trials, args.seed)
        record["mc_epsilon"], record["mc_half_width"] = est, hw
    scale = 1.0 / math.log(2) if args.bits else 1.0
    if 0.0 < report.epsilon < 1.0:
        v = converse_check(math.log(args.m1), math.log(args.m2), args.n, report, channel,
                           args.mode, args.check_grid)
        record["verdict"] = {
            "passed": v.passed,
            "b1": v.b1 * scale, "b2": v.b2 * scale, "b12": v.b12 * scale,
            "slack1": v.slack1 * scale, "slack2": v.slack2 * scale, "slack12": v.slack12 * scale,
        }
    else:
        record["verdict"] = None
    return _emit(args, [], [], record)


class _Failed(Exception):
    def __init__(self, message, text=""):
        super().__init__(message)
        self.text = text


COMMANDS = {
    "info": cmd_info,
    "bounds": cmd_bounds,
    "region": cmd_region,
    "capacity": cmd_capacity,
    "validate": cmd_validate,
    "simulate": cmd_simulate,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else 2
    try:
        text = COMMANDS[args.command](args)
    except _Failed as exc:
        if args.out:
            _write(args.out, exc.text)
        else:
            sys.stdout.write(exc.text)
        print(f"fbmac: {exc}", file=sys.stderr)
        return 1
    except (ChannelError, GuardExceeded, InfeasibleTarget, ValueError) as exc:
        print(f"fbmac: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"fbmac: I/O error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        try:
            _write(args.out, text)
        except OSError as exc:
            print(f"fbmac: I/O error: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
