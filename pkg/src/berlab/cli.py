"""``berlab`` command line.

JSON goes to stdout and a human summary to stderr. Exit codes: 0 success,
1 verification failure, 2 usage or config error, 3 data error (dimension
mismatch).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import harness
from .berezin import SearchConfig, berezin_number, berezin_set_sample, berezin_symbol, karaev_operator
from .cmatrix import matrix_from_json, operator_norm
from .errors import BerlabError, BoundViolation, DimMismatch, UnknownChecker
from .opmatrix import load_block_operator
from .radii import numerical_radius
from .report import MODES
from .rkhs import TruncatedHardy, parse_space

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- output ---------------------------------------------------------------------


def _fmt(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError("non-finite value in output")
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj) -> None:
    sys.stdout.write(_fmt(obj) + "\n")


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _point(p):
    if isinstance(p, tuple):
        return [_point(q) for q in p]
    if isinstance(p, complex):
        return [p.real, p.imag]
    return int(p)


# -- inputs ---------------------------------------------------------------------


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_op(path) -> np.ndarray:
    return matrix_from_json(_load_json(path))


def _space(desc: str):
    try:
        return parse_space(desc)
    except OSError as exc:
        raise UsageError(f"cannot read feature table: {exc}") from exc


def _pair_of_ints(text: str, what: str) -> tuple:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must look like R,A") from None
    return a, b


def _config(args) -> SearchConfig:
    kw = {}
    if getattr(args, "grid", None):
        kw["radial"], kw["angular"] = _pair_of_ints(args.grid, "--grid")
    if getattr(args, "refine", None) is not None:
        kw["refine"] = args.refine
    try:
        return SearchConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_point(text: str, space):
    if not space.is_disk:
        try:
            return int(text)
        except ValueError:
            raise UsageError("--at must be a point index for a finite space") from None
    try:
        return complex(*(float(v) for v in text.split(",")))
    except (TypeError, ValueError):
        raise UsageError("--at must look like RE,IM") from None


# -- commands -------------------------------------------------------------------


def cmd_ber(args) -> int:
    cfg = _config(args)
    if args.block:
        t = load_block_operator(args.block)
        op, space = t.flat, t.spaces
    else:
        if not (args.space and args.op):
            raise UsageError("ber needs --space and --op, or --block")
        op, space = _load_op(args.op), _space(args.space)
    est = berezin_number(op, space, cfg)
    _emit({"ber": est.value, "argmax": _point(est.argmax), "coarse": est.coarse_value, "mode": est.mode})
    _say(f"ber = {est.value:.10g} (lower estimate)")
    return EXIT_OK


def cmd_w(args) -> int:
    op = load_block_operator(args.block).flat if args.block else _load_op(args.op)
    est = numerical_radius(op, sweep=args.sweep)
    _emit({"w": est.value, "theta": est.theta, "norm": operator_norm(op)})
    _say(f"w = {est.value:.10g}")
    return EXIT_OK


def cmd_symbol(args) -> int:
    space = _space(args.space)
    op = _load_op(args.op)
    lam = _parse_point(args.at, space)
    val = berezin_symbol(op, space, lam)
    _emit({"re": val.real, "im": val.imag, "abs": abs(val), "at": _point(lam)})
    return EXIT_OK


def karaev_report(n: int, cfg: SearchConfig | None = None, grid: int = 64) -> dict:
    op = karaev_operator(n)
    space = TruncatedHardy(n)
    est = berezin_number(op, space, cfg)
    sample = berezin_set_sample(op, space, grid)
    return {
        "dim": n,
        "ber": est.value,
        "argmax": _point(est.argmax),
        "w": numerical_radius(op).value,
        "norm": operator_norm(op),
        "set_min": float(np.min(sample.real)),
        "set_max": float(np.max(sample.real)),
        "set_max_imag": float(np.max(np.abs(sample.imag))),
    }


def cmd_karaev(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    out = karaev_report(args.dim)
    _emit(out)
    _say(f"N={args.dim}: ber = {out['ber']:.6f}, w = {out['w']:.6f}, "
         f"Berezin set in [{out['set_min']:.3g}, {out['set_max']:.6f}]")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite:
        try:
            conf = harness.load_suite_config(args.suite)
        except OSError as exc:
            raise UsageError(f"cannot read {args.suite}: {exc.strerror}") from exc
    else:
        conf = {"checkers": list(harness.CATALOG), "n": 200, "seed": 0, "mode": "certified"}
    for key in ("n", "seed", "mode"):
        if getattr(args, key) is not None:
            conf[key] = getattr(args, key)
    if conf["n"] < 0:
        raise UsageError("--n must be >= 0")
    res = harness.run_suite(conf["checkers"], conf["n"], conf["seed"], conf["mode"])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(res.to_json() + "\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for row in res.csv_rows():
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])

    _emit({"total": res.n_total, "passed": res.n_passed, "failed": res.n_failed, "mode": res.mode,
           "worst_slack": res.worst_slack, "out": str(out)})
    for name, slack in res.worst_slack.items():
        _say(f"{name:16s} worst slack {slack: .3e}")
    _say(f"{res.n_passed}/{res.n_total} passed in {res.wall_time:.1f}s")
    return EXIT_OK if res.n_failed == 0 else EXIT_FAIL


def cmd_sweep(args) -> int:
    if args.budget < 1:
        raise UsageError("--budget must be >= 1")
    try:
        best = harness.tightness_search(args.checker, args.budget, args.seed, args.mode, family=args.family)
    except BoundViolation as exc:
        _say(f"violation: {exc}")
        return EXIT_FAIL
    _emit({"checker": args.checker, "ratio": best.ratio, "report": best.to_dict()})
    _say(f"{args.checker}: best ratio {best.ratio:.9f} at seed {best.provenance.get('seed')}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="berlab", description="Berezin numbers and operator-matrix inequalities.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ber", help="Berezin number of an operator")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--op", help="operator JSON (use with --space)")
    src.add_argument("--block", help="block-operator JSON")
    p.add_argument("--space", help="hardy:N, bergman:N or finite:<path>")
    p.add_argument("--grid", help="coarse polar grid R,A")
    p.add_argument("--refine", type=int, help="golden-section iterations")
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("w", help="numerical radius")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--op")
    src.add_argument("--block")
    p.add_argument("--sweep", type=int, default=360)
    p.set_defaults(func=cmd_w)

    p = sub.add_parser("symbol", help="Berezin symbol at one point")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--at", required=True, help="RE,IM for disk spaces, point index for finite ones")
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("karaev", help="rank-one example on truncated Hardy space")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_karaev)

    p = sub.add_parser("verify", help="run the checker suite")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--suite", help="suite config JSON")
    src.add_argument("--all", action="store_true", help="full catalog")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tightness search for one checker")
    p.add_argument("--checker", required=True)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=harness.FAMILIES, default="random")
    p.add_argument("--mode", choices=MODES, default="certified")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except DimMismatch as exc:
        _say(f"error: {exc}")
        return EXIT_DATA
    except UnknownChecker as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except (UsageError, BerlabError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    _say(f"[{args.command}] {time.perf_counter() - start:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
