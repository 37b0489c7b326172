"""Command line entry point: ``br2d <command> [options]``.

Exit codes: 0 success, 1 a requested check failed, 2 usage or config error.
JSON is the canonical output; CSV is a projection of the same rows.
Every JSON document carries the version, the full config and the tolerances.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, certificate, identities, kernel, spectral, unbounded
from .quadrature import build_radial_grid

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

OUTPUT_DIR_ENV = "BR2D_OUTPUT_DIR"
FLOOR_TOL = 0.02


class ConfigError(ValueError):
    pass


# -- argument parsing helpers -------------------------------------------------

def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _int(text: str) -> int:
    # scientific notation such as 4e2 is accepted when it is integral
    x = _float(text)
    if not math.isfinite(x) or x != int(x):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(x)


def _float_list(text: str) -> list:
    return [_float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list:
    return [_int(t) for t in text.split(",") if t.strip()]


def _tol_scale(text: str) -> float:
    t = text.strip().lower()
    if t.endswith("x"):
        t = t[:-1]
    x = _float(t)
    if not x > 0:
        raise argparse.ArgumentTypeError("--strict-tol must be positive, e.g. 0.5x")
    return x


def _round_sig(obj, digits):
    if digits is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj) or obj == 0.0:
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_sig(v, digits) for v in obj]
    return obj


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _resolve_output(args, stem: str):
    if args.output:
        return args.output
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base:
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, f"{stem}.{args.format}")
    return None


def _emit(args, stem: str, doc: dict, rows: list):
    """Write ``doc`` (json) or ``rows`` (csv) to the output target."""
    if args.format == "csv":
        buf = io.StringIO()
        rows = [_round_sig(_jsonable(r), args.precision) for r in rows]
        fields = []
        for r in rows:
            fields += [k for k in r if k not in fields]
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        full = {"version": __version__, "command": stem, "config": _config(args), **doc}
        text = json.dumps(_round_sig(_jsonable(full), args.precision), indent=2) + "\n"
    path = _resolve_output(args, stem)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {path}", file=sys.stderr)


# -- commands -----------------------------------------------------------------

def cmd_critical(args) -> int:
    cc = certificate.critical_coupling()
    row = {"delta_c": cc.delta_c, "floor": cc.floor, "gamma_quarter": cc.gamma_quarter}
    _emit(args, "critical", {**row, "tolerances": {}}, [row])
    return EXIT_OK


def _grid_from(args):
    if args.n < 8:
        raise ConfigError("--n must be >= 8")
    if not args.p_max > args.scale > 0:
        raise ConfigError("need 0 < --scale < --p-max")
    return build_radial_grid(args.n, args.map, args.p_max, args.scale)


def cmd_spectrum(args) -> int:
    deltas = list(args.delta or [])
    if args.delta_c:
        deltas.append(certificate.DELTA_C)
    if not deltas:
        raise ConfigError("give --delta and/or --delta-c")
    if any(not d >= 0 for d in deltas):
        raise ConfigError("couplings must be >= 0")
    grid = _grid_from(args)
    reports = []
    for k in args.k:
        reports += spectral.delta_sweep(grid, k, deltas)
    rows = []
    failed = False
    for r in reports:
        row = r.row()
        bound = 1.0 - 2.0 * r.delta - args.floor_tol
        row["floor_bound"] = bound
        if args.assert_floor:
            ok = r.delta > certificate.DELTA_C or r.lowest_eigenvalue >= bound
            row["floor_pass"] = bool(ok)
            failed |= not ok
        rows.append(row)
    doc = {"grid": grid.describe(), "rows": rows,
           "tolerances": {"floor_tol": args.floor_tol,
                          "eigen_residual_rtol": spectral.RESIDUAL_RTOL}}
    _emit(args, "spectrum", doc, rows)
    return EXIT_FAIL if failed else EXIT_OK


def _suite_rows(name, tol_scale):
    if name == "identities":
        return [r.to_dict() for r in identities.identity_suite(tol_scale)]
    if name == "certificates":
        return [r.to_dict() for r in certificate.certificate_suite(tol_scale)]
    if name == "lemmas":
        rows = unbounded.lemma_suite(tol_scale)
        bound, target = unbounded.beta2_window_bound(unbounded.TrialWindow(50.0, 5e5))
        rows.append({"name": "beta2_window", "a": 50.0, "min_beta2": bound,
                     "required": target, "pass": bool(bound >= target)})
        return rows
    raise ConfigError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    names = ["identities", "certificates", "lemmas"] if args.suite == "all" else [args.suite]
    doc = {"tolerances": {"scale": args.strict_tol}, "suites": {}}
    flat = []
    all_pass = True
    for name in names:
        t0 = time.perf_counter()
        rows = _suite_rows(name, args.strict_tol)
        ok = all(r["pass"] for r in rows)
        all_pass &= ok
        doc["suites"][name] = {"pass": ok, "seconds": time.perf_counter() - t0, "reports": rows}
        for r in rows:
            flat.append({"suite": name, "name": r["name"], "pass": r["pass"],
                         "rel_error": r.get("rel_error", ""), "min_value": r.get("min_value", "")})
        print(f"{name}: {sum(r['pass'] for r in rows)}/{len(rows)} passed", file=sys.stderr)
    doc["pass"] = all_pass
    _emit(args, f"verify_{args.suite}", doc, flat)
    return EXIT_OK if all_pass else EXIT_FAIL


def cmd_diverge(args) -> int:
    if not args.delta > certificate.DELTA_C:
        raise ConfigError(f"delta = {args.delta} is not above delta_c = {certificate.DELTA_C:.10f}; "
                          "the trial construction needs a supercritical coupling")
    a_min = unbounded.minimum_qualifying_a(args.delta)
    if not args.a > a_min:
        raise ConfigError(f"a = {args.a} does not qualify at delta = {args.delta}: "
                          f"need 1 - (delta/delta_c)(1 - 2/a) < 0, i.e. a > {a_min:.6g}")
    if any(not b > args.a for b in args.b):
        raise ConfigError("every --b must exceed --a")
    res = unbounded.divergence_demo(args.delta, args.a, args.b, tol=args.tol)
    rows = [{"a": r.a, "b": r.b, "delta": r.delta, "form_value": r.form_value,
             "norm_sq": r.norm_sq, "log_ratio": r.log_ratio} for r in res.rows]
    doc = {"rows": rows, "slope": res.slope, "slope_bound": res.slope_bound,
           "strictly_decreasing": res.strictly_decreasing, "a_min": a_min,
           "tolerances": {"quadrature_rtol": args.tol}}
    _emit(args, "diverge", doc, rows)
    return EXIT_OK if res.strictly_decreasing else EXIT_FAIL


def cmd_kernel_eval(args) -> int:
    rows = []
    for k in args.k:
        for p in args.p:
            for q in args.q:
                if not (p > 0 and q > 0):
                    raise ConfigError("momenta must be positive")
                b1, b2 = kernel.beta_weights(p, q)
                row = {"k": k, "p": p, "q": q, "beta1": float(b1), "beta2": float(b2)}
                row["K_k"] = None if p == q else float(kernel.channel_kernel(k, p, q))
                if p == q:
                    row["diagonal_remainder"] = float(kernel.diagonal_remainder(k, p))
                rows.append(row)
    _emit(args, "kernel_eval", {"rows": rows, "tolerances": {}}, rows)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="br2d",
        description="Partial-wave spectra and proof checks for the 2D Brown-Ravenhall form.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None,
                        help=f"output file (default: ${OUTPUT_DIR_ENV}/<command>.<format> or stdout)")
    common.add_argument("--precision", type=_int, default=None,
                        help="significant digits for floats in the output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critical", parents=[common], help="print delta_c and 1 - 2 delta_c")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("spectrum", parents=[common], help="lowest eigenvalue of channel forms")
    p.add_argument("--delta", type=_float_list, default=None, help="comma-separated couplings")
    p.add_argument("--delta-c", action="store_true", help="also run at delta_c")
    p.add_argument("--k", type=_int_list, default=[0], help="comma-separated channels")
    p.add_argument("--n", type=_int, default=200)
    p.add_argument("--p-max", type=_float, default=1e4)
    p.add_argument("--scale", type=_float, default=1.0)
    p.add_argument("--map", choices=("rational", "exponential"), default="rational")
    p.add_argument("--assert-floor", action="store_true",
                   help="fail unless lambda_min >= 1 - 2 delta - floor_tol for delta <= delta_c")
    p.add_argument("--floor-tol", type=_float, default=FLOOR_TOL)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="run a check suite")
    p.add_argument("suite", choices=("identities", "certificates", "lemmas", "all"))
    p.add_argument("--strict-tol", type=_tol_scale, default=1.0,
                   help="tolerance multiplier, e.g. 0.5x")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diverge", parents=[common], help="trial-function form values above delta_c")
    p.add_argument("--delta", type=_float, required=True)
    p.add_argument("--a", type=_float, required=True)
    p.add_argument("--b", type=_float_list, required=True, help="comma-separated upper cutoffs")
    p.add_argument("--tol", type=_float, default=1e-10)
    p.set_defaults(func=cmd_diverge)

    p = sub.add_parser("kernel-eval", parents=[common], help="pointwise channel kernels")
    p.add_argument("--k", type=_int_list, default=[0])
    p.add_argument("--p", type=_float_list, required=True)
    p.add_argument("--q", type=_float_list, required=True)
    p.set_defaults(func=cmd_kernel_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is not None and not 1 <= args.precision <= 17:
        parser.error("--precision must be between 1 and 17")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"br2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
