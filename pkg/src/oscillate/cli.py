"""``oscillate`` command line: norms, decompositions, verification suites, Poisson fields.

Exit codes: 0 success, 1 a verification suite failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atoms import (DICT_FAMILIES, CapExceededError, InfeasibleError, b1_norm_exact, build_dictionary,
                    greedy_decompose)
from .grid import GENERATOR_DEFAULTS, GridFunction, dumps_csv, generate, load
from .maximal import CENTERINGS, bmo_norm, weak_bmo_norm, weak_bmo_star_norm
from .optimize import DEFAULT_MAX_PIVOTS
from .poisson import B1A_RMAX, DEFAULT_RMAX, b1a_norm, bmoa_norm, bmoa_weak_norm, default_radii, extend, hardy_norm
from .verify import SUITES, run_suite
from .zygmund import lambda_prime_norm, zygmund_seminorm

DEFAULT_N = 64
FAMILIES = ("all", "dyadic")


class InputError(Exception):
    """Anything wrong with what the user handed us; maps to exit code 2."""


# -- generator specs -------------------------------------------------------

def _scalar(text: str):
    low = text.strip().lower()
    if low in ("none", "null", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _modes(text: str) -> list[tuple[int, float]]:
    """``1*1.0;3*0.5`` -> [(1, 1.0), (3, 0.5)]; a bare ``k`` means amplitude 1."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        k, _, amp = item.partition("*")
        out.append((int(k), float(amp) if amp else 1.0))
    return out


def parse_gen(spec: str):
    """``kind:key=val,key=val`` -> (kind, params, domain, torus)."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if kind not in GENERATOR_DEFAULTS:
        raise InputError(f"unknown generator {kind!r}; expected one of {sorted(GENERATOR_DEFAULTS)}")
    params, lo, hi, torus = {}, None, None, None
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InputError(f"generator parameter {item!r} is not key=val")
        key = key.strip()
        try:
            if key in ("cos", "sin"):
                params[key] = _modes(val)
            elif key == "lo":
                lo = float(val)
            elif key == "hi":
                hi = float(val)
            elif key == "torus":
                torus = bool(_scalar(val))
            else:
                params[key] = _scalar(val)
        except ValueError as exc:
            raise InputError(f"bad value for {key!r}: {exc}") from None
    domain = None
    if lo is not None or hi is not None:
        domain = (0.0 if lo is None else lo, 1.0 if hi is None else hi)
    return kind, params, domain, torus


def resolve_input(args) -> tuple[GridFunction, dict]:
    """Load or generate the input; return it with a fully resolved description."""
    if bool(args.input) == bool(args.gen):
        raise InputError("give exactly one of --input PATH or --gen SPEC")
    if args.input:
        try:
            f = load(args.input)
        except FileNotFoundError:
            raise InputError(f"no such file: {args.input}") from None
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise InputError(str(exc)) from None
        if getattr(args, "torus", False) and f.dim == 1 and not f.torus:
            f = GridFunction.on_torus(f.values)
        source = {"file": str(args.input)}
    else:
        kind, params, domain, torus = parse_gen(args.gen)
        N = DEFAULT_N if args.N is None else args.N
        try:
            f = generate(kind, N, domain=domain, torus=torus, **params)
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from None
        if kind == "trig" and "sin" in params and "cos" not in params:
            params["cos"] = []
        resolved = {**GENERATOR_DEFAULTS[kind], **params}
        source = {"generator": kind, "params": {k: _plain(v) for k, v in resolved.items()}}
    desc = {**source, "N": list(f.n_cells) if f.dim > 1 else f.n_cells[0],
            "domain": [list(d) for d in f.domain], "torus": f.torus}
    return f, desc


# -- output ----------------------------------------------------------------

def _plain(obj):
    """Recursively turn numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_csv(rows) -> str:
    return "quantity,value\n" + "".join(f"{k},{v!r}\n" for k, v in rows)


# -- commands --------------------------------------------------------------

def cmd_norms(args) -> int:
    f, desc = resolve_input(args)
    report = {"command": "norms", "input": desc,
              "config": {"family": args.family, "centering": args.centering}}
    norms = {
        "bmo": bmo_norm(f, args.family),
        "weak_bmo": weak_bmo_norm(f, args.family, args.centering),
        "weak_bmo_star": weak_bmo_star_norm(f, args.family),
    }
    if f.dim == 1 and f.n_cells[0] >= 3:
        norms["zygmund"] = zygmund_seminorm(f)
        norms["lambda_prime"] = lambda_prime_norm(f, args.family)
    else:
        report["notes"] = ["zygmund and lambda_prime need 1D input with at least 3 cells"]
    for name in ("bmo", "weak_bmo", "weak_bmo_star", "zygmund", "lambda_prime"):
        report[name] = norms[name].to_dict() if name in norms else None
    report["witnesses"] = {name: r.witness for name, r in norms.items()}
    if args.format == "csv":
        rows = [(name, r.value) for name, r in norms.items()]
        rows += [(f"{name}.{k}", v) for name, r in norms.items() for k, v in r.parts.items() if v is not None]
        _emit(_rows_csv(rows), args.out)
    else:
        _emit(dumps(report), args.out)
    return 0


def cmd_decompose(args) -> int:
    f, desc = resolve_input(args)
    dictionary = build_dictionary(f, args.dict)
    config = {"method": args.method, "dict": args.dict, "max_cells": args.max_cells,
              "max_atoms": args.max_atoms, "max_pivots": args.max_pivots, "atoms": len(dictionary),
              "greedy_dict": "dyadic"}
    report = {"command": "decompose", "input": desc, "config": config}
    methods = ["greedy", "lp"] if args.method == "both" else [args.method]
    try:
        for m in methods:
            if m == "greedy":
                dyadic = dictionary if args.dict == "dyadic" else build_dictionary(f, "dyadic")
                report["greedy"] = greedy_decompose(f, dyadic).to_dict(dyadic)
            else:
                d = b1_norm_exact(f, dictionary, args.max_cells, args.max_atoms, max_pivots=args.max_pivots)
                report["lp"] = d.to_dict(dictionary)
                report["lp"].update(iterations=d.solution.iterations, duality_gap=d.solution.duality_gap)
    except CapExceededError as exc:
        raise InputError(f"cap exceeded: {exc}") from None
    except InfeasibleError as exc:
        raise InputError(f"infeasible: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if len(methods) == 2:
        g, lp = report["greedy"]["l1_cost"], report["lp"]["l1_cost"]
        report["comparison"] = {"greedy_cost": g, "lp_cost": lp, "greedy_minus_lp": g - lp}
    if args.format == "csv":
        rows = [(f"{m}.l1_cost", report[m]["l1_cost"]) for m in methods]
        rows += [(f"{m}.residual", report[m]["residual"]) for m in methods]
        _emit(_rows_csv(rows), args.out)
    else:
        _emit(dumps(report), args.out)
    return 0


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = []
    try:
        for name in names:
            results.append(run_suite(name, args.trials, args.seed, args.N))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    ok = all(r.passed for r in results)
    report = {"command": "verify", "passed": ok,
              "config": {"suite": args.suite, "trials": args.trials or "suite default", "seed": args.seed,
                         "N": args.N or "suite default"},
              "suites": [r.to_dict() for r in results]}
    if args.format == "csv":
        text = "suite,check,passed,informational,worst_margin\n" + "".join(
            f"{r.name},{c.name},{c.passed},{c.informational},{c.worst_margin!r}\n" for r in results for c in r.checks)
        _emit(text, args.out)
    else:
        _emit(dumps(report), args.out)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.name}: {status}", file=sys.stderr)
    return 0 if ok else 1


def cmd_poisson(args) -> int:
    f, desc = resolve_input(args)
    if not f.torus:
        raise InputError("poisson needs torus data: use trig, add torus=1 to --gen, or pass --torus")
    try:
        radii = default_radii(args.rmax, args.n_radii)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    field = extend(f, radii)
    if args.field:
        Path(args.field).write_text(field.to_csv("complex"))
    if args.format == "csv":
        _emit(field.to_csv("complex"), args.out)
        return 0
    strong, weak = bmoa_norm(f, radii), bmoa_weak_norm(f, radii)
    report = {
        "command": "poisson", "input": desc,
        "config": {"rmax": args.rmax, "n_radii": args.n_radii, "hardy_p": args.p, "b1a_rmax": args.b1a_rmax,
                   "field": args.field},
        "F0": float(np.mean(f.values)),
        "hardy_norm": hardy_norm(field, args.p),
        "bmoa": strong.to_dict(),
        "b1a": b1a_norm(f, args.b1a_rmax),
        "informational": {"bmoa_weak": weak.to_dict()},
    }
    _emit(dumps(report), args.out)
    return 0


def cmd_generate(args) -> int:
    f, desc = resolve_input(args)
    if args.format == "csv":
        _emit(dumps_csv(f), args.out)
    else:
        _emit(dumps({**f.to_dict(), "input": desc}), args.out)
    return 0


# -- parser ----------------------------------------------------------------

def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscillate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(p, formats=("json", "csv")):
        p.add_argument("--input", metavar="PATH", help="CSV (one value per line, or rows,cols header) or JSON")
        p.add_argument("--gen", metavar="SPEC", help="generator, e.g. 'step:at=0.3' or 'trig:cos=1*1.0;3*0.5'")
        p.add_argument("--N", type=int, default=None, help=f"cells for --gen (default {DEFAULT_N})")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--format", choices=formats, default="json")

    p = sub.add_parser("norms", help="BMO, weak BMO, Zygmund and derivative-space norms")
    with_input(p)
    p.add_argument("--family", choices=FAMILIES, default="all")
    p.add_argument("--centering", choices=CENTERINGS, default="literal-abs")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("decompose", help="special-atom decomposition (greedy cascade or exact LP)")
    with_input(p)
    p.add_argument("--method", choices=("greedy", "lp", "both"), default="greedy")
    p.add_argument("--dict", choices=DICT_FAMILIES, default="dyadic")
    p.add_argument("--max-cells", type=_positive_int, default=64)
    p.add_argument("--max-atoms", type=_positive_int, default=4096)
    p.add_argument("--max-pivots", type=_positive_int, default=DEFAULT_MAX_PIVOTS)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="run seeded property suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("poisson", help="harmonic extension of torus data and disk norms")
    with_input(p)
    p.add_argument("--torus", action="store_true", help="treat 1D file input as samples on [0, 2pi)")
    p.add_argument("--rmax", type=float, default=DEFAULT_RMAX)
    p.add_argument("--n-radii", type=_positive_int, default=32)
    p.add_argument("--p", type=float, default=2.0, help="Hardy exponent")
    p.add_argument("--b1a-rmax", type=float, default=B1A_RMAX)
    p.add_argument("--field", metavar="PATH", help="also write the sampled field as CSV")
    p.set_defaults(func=cmd_poisson)

    p = sub.add_parser("generate", help="write generator samples")
    with_input(p)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"oscillate: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
