"""Command-line entry point: ``pascalasym <command> [options]``.

Output goes to stdout as JSON (numbers as strings) or CSV; timings and
progress go to stderr so that stdout is reproducible byte for byte.

Exit codes: 0 success, 1 usage, 2 computation error, 3 cache or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mpf

from . import __version__
from .asymptotics import AsymptoticParams, D_asym, special_series
from .exact_core import (CacheError, ThetaValue, cache_load, cache_store, char_poly,
                         eval_D, get_char_poly)
from .extraction import FitModel, fit_amplitudes
from .intrel import Rejection, find_relation
from .loop_observables import loop_stats
from .mpnum import PrecisionContext, PrecisionError, constant, polygamma
from .special_products import (asm_count, exact_special_value, htsasm_count,
                               loop_probabilities, phi_exact)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

COMMANDS = ("charpoly", "eval", "compare", "special", "extract", "relate", "loops",
            "probabilities")


class UsageError(Exception):
    pass


def parse_L_range(text: str, minimum: int = 1) -> tuple:
    """'8', '1..8' (inclusive) or '8,16,32'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            values = tuple(range(int(a), int(b) + 1))
        else:
            values = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad L specification {text!r}") from exc
    if not values:
        raise UsageError(f"empty L range {text!r}")
    if min(values) < minimum:
        raise UsageError(f"L must be >= {minimum}, got {min(values)}")
    return values


def _canon_L(values) -> str:
    values = list(values)
    if len(values) > 2 and values == list(range(values[0], values[-1] + 1)):
        return f"{values[0]}..{values[-1]}"
    return ",".join(str(v) for v in values)


@dataclass(frozen=True)
class RunConfig:
    command: str
    L: str = ""
    theta: str = ""
    digits: int = 50
    n_max: int = 6
    k_max: int = 7
    cache_dir: str = "./cache"
    format: str = "json"
    extra: tuple = field(default_factory=tuple)   # sorted (key, value) pairs

    _FIELDS = ("command", "L", "theta", "digits", "n_max", "k_max", "cache_dir", "format")

    def canonical(self) -> str:
        parts = [f"{k}={getattr(self, k)}" for k in self._FIELDS]
        parts += [f"{k}={v}" for k, v in self.extra]
        return ";".join(parts)

    @classmethod
    def from_canonical(cls, text: str) -> "RunConfig":
        kv = dict(item.split("=", 1) for item in text.split(";"))
        base = {k: kv.pop(k) for k in cls._FIELDS}
        for k in ("digits", "n_max", "k_max"):
            base[k] = int(base[k])
        return cls(extra=tuple(sorted(kv.items())), **base)


# --------------------------------------------------------------------------
# formatting

class Emitter:
    def __init__(self, config: RunConfig):
        self.config = config
        self.digits = config.digits

    def num(self, x, csv_mode=False) -> str:
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
        if isinstance(x, (int, str)):
            return str(x)
        if x is None:
            return ""
        with mpmath.workdps(self.digits + 5):
            if csv_mode:
                return mpmath.nstr(mpf(x), self.digits, min_fixed=0, max_fixed=0, strip_zeros=False)
            return mpmath.nstr(mpf(x), self.digits)

    def emit(self, rows: list, extra: Optional[dict] = None, out=None):
        out = out or sys.stdout
        if self.config.format == "csv":
            buf = io.StringIO()
            if rows:
                w = csv.writer(buf, lineterminator="\n")
                w.writerow(list(rows[0].keys()))
                for r in rows:
                    w.writerow([self.num(v, True) for v in r.values()])
            out.write(buf.getvalue())
            return
        doc = {"version": __version__, "config": self.config.canonical()}
        if extra:
            doc.update({k: self._jsonable(v) for k, v in extra.items()})
        doc["rows"] = [{k: self._jsonable(v) for k, v in r.items()} for r in rows]
        out.write(json.dumps(doc, indent=2) + "\n")

    def _jsonable(self, v):
        if isinstance(v, bool) or v is None:
            return v
        if isinstance(v, dict):
            return {k: self._jsonable(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [self._jsonable(x) for x in v]
        return self.num(v)


def _log(msg: str):
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# commands

def cmd_charpoly(args, cfg, em):
    rows = []
    for L in args.L:
        t0 = time.perf_counter()
        try:
            rec = cache_load(L, args.cache_dir)
            status = "hit"
        except CacheError as exc:
            if not isinstance(exc, KeyError):
                raise
            rec = char_poly(L)
            cache_store(rec, args.cache_dir)
            status = "computed"
        problems = rec.check()
        _log(f"L={L} {status} {time.perf_counter() - t0:.3f}s")
        rows.append({"L": L, "status": status, "invariants": "ok" if not problems else "; ".join(problems),
                     "degree": L, "c1": rec.coeffs[1]})
    em.emit(rows)


def cmd_eval(args, cfg, em):
    ctx = PrecisionContext(args.digits)
    rows = []
    for L in args.L:
        rec = get_char_poly(L, args.cache_dir)
        d = eval_D(L, args.theta, ctx, record=rec)
        try:
            phi = phi_exact(L, args.theta, ctx)
        except ZeroDivisionError:
            phi = None
        rows.append({"L": L, "theta": args.theta.canonical(), "D": d, "phi": phi})
    em.emit(rows)


def cmd_compare(args, cfg, em):
    ctx = PrecisionContext(args.digits)
    params = AsymptoticParams(args.n_max, args.k_max)
    rows = []
    for L in args.L:
        rec = cache_load(L, args.cache_dir)
        d = eval_D(L, args.theta, ctx, record=rec)
        ws = D_asym(L, args.theta, params, ctx)
        with ctx.work():
            exact_zero = d == 0 and ws.sign == 0
            log_exact = mpmath.log(abs(d)) if d else None
            if exact_zero:
                rel = mpf(0)
            elif d == 0 or ws.sign == 0:
                rel = None
            else:
                rel = ws.value / d - 1
            try:
                phi = phi_exact(L, args.theta, ctx)
            except ZeroDivisionError:
                phi = None
        rows.append({"L": L, "log_D_exact": log_exact,
                     "log_D_asym": ws.log_abs if ws.sign else None,
                     "rel_error": rel, "last_pair_log10": ws.last_pair_log10 if ws.sign else None,
                     "phi_exact": phi, "exact_zero": exact_zero})
    em.emit(rows)


def cmd_special(args, cfg, em):
    ctx = PrecisionContext(args.digits)
    rows = []
    for L in args.L:
        row = {"L": L, "A": asm_count(L), "A_HT": htsasm_count(L)}
        for p in range(4):
            v = exact_special_value(L, p)
            row[f"D_p{p}"] = f"{em.num(v.coeff)}*sqrt3" if v.sqrt3_power else em.num(v.coeff)
        if args.series and L >= 2 and L % 2 == 0:
            for name in ("theta0", "theta2pi3", "thetapi"):
                row[f"series_{name}"] = special_series(name, L, 7, ctx)
        rows.append(row)
    em.emit(rows)


def cmd_extract(args, cfg, em):
    ctx = PrecisionContext(args.digits)
    Ls = [L for L in range(args.Lmin, args.Lmax + 1) if L % 2 == 0]
    model = FitModel(args.theta, derivative_order=args.order, k_terms=args.k_terms,
                     even_only=not args.all_powers)
    if args.source == "exact":
        for L in Ls:
            cache_load(L, args.cache_dir)    # fail early on a missing entry
    res = fit_amplitudes(args.theta, Ls, model, ctx, source=args.source,
                         cache_dir=args.cache_dir if args.source == "exact" else None,
                         params=AsymptoticParams(args.n_max, args.k_max))
    rows = [{"key": k, "estimate": v, "stable_digits": res.digits[k]}
            for k, v in res.estimates.items()]
    em.emit(rows, {"stability": res.stability, "residual": res.residual,
                   "merged": [list(m) for m in res.merged],
                   "windows": [list(w) for w in res.windows]})


def _named_constants(dps: int) -> dict:
    ctx = PrecisionContext(max(16, dps))
    with ctx.work():
        pi = constant("pi", ctx)
        g = constant("euler_gamma", ctx)
        return {
            "1": mpf(1), "pi": pi, "gamma": g, "log2": mpmath.log(2), "log3": mpmath.log(3),
            "zeta3": constant("zeta3", ctx), "sqrt3": mpmath.sqrt(3),
            "gamma/pi": g / pi, "log2/pi": mpmath.log(2) / pi, "log3/pi": mpmath.log(3) / pi,
            "1/pi": 1 / pi, "1/pi2": 1 / pi ** 2, "gamma/pi2": g / pi ** 2,
            "log3/pi2": mpmath.log(3) / pi ** 2,
            "psi1(1/3)/pi2": polygamma(1, mpf(1) / 3, ctx) / pi ** 2,
            "psi1(2/3)/pi2": polygamma(1, mpf(2) / 3, ctx) / pi ** 2,
            "zetaprime(-1)": constant("zeta_prime_minus1", ctx),
        }


def cmd_relate(args, cfg, em):
    names = list(args.const or [])
    values = {}
    for item in args.value or []:
        if "=" not in item:
            raise UsageError(f"--value expects NAME=DECIMAL, got {item!r}")
        k, v = item.split("=", 1)
        values[k] = v
        names.append(k)
    if not names:
        raise UsageError("give at least one --const or --value")

    def lookup(name):
        if name in values:
            text = values[name]
            return lambda dps: mpmath.mpf(text)
        if name not in _named_constants(20):
            raise UsageError(f"unknown constant {name!r}; known: {sorted(_named_constants(20))}")
        return lambda dps: _named_constants(dps)[name]

    ys = [(n, lookup(n)) for n in names]
    with mpmath.workdps(args.digits + 40):
        x = mpmath.mpf(args.x)
    res = find_relation(x, ys, args.digits)
    if isinstance(res, Rejection):
        em.emit([], {"found": False, "reason": res.reason, "smallest_tail": res.smallest_tail})
        return
    rows = [{"name": n, "coefficient": c, "rational": r}
            for n, c, r in zip(res.names, res.coefficients, res.rational_coefficients)]
    rows.append({"name": "x", "coefficient": res.coefficients[-1], "rational": ""})
    em.emit(rows, {"found": True, "quality": res.quality, "verified_digits": res.verified_digits,
                   "relation": res.describe()})


def cmd_loops(args, cfg, em):
    ctx = PrecisionContext(args.digits)
    rows = []
    for L in args.L:
        s = loop_stats(L, ctx, exact=not args.asym)
        rows.append({"L": L, "parity": s.parity, "mean_N": s.mean_N, "var_N": s.var_N,
                     "wrap_prob": s.wrap_prob})
    em.emit(rows)


def cmd_probabilities(args, cfg, em):
    rows = []
    for L in args.L:
        vec = loop_probabilities(L)
        for m, p in enumerate(vec.probs):
            rows.append({"L": L, "m": m, "P": p})
    em.emit(rows)


# --------------------------------------------------------------------------
# parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--digits", type=int, default=50)
    common.add_argument("--n-max", dest="n_max", type=int, default=6)
    common.add_argument("--k-max", dest="k_max", type=int, default=7)
    common.add_argument("--cache-dir", dest="cache_dir", default="./cache")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="pascalasym", description="Asymptotics of the Pascal-matrix characteristic polynomial")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, L=True, theta=False):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if L:
            sp.add_argument("--L", required=True, help="'8', '1..8' or '8,16,32'")
        if theta:
            sp.add_argument("--theta", required=True,
                            help="'P/Q' means (P/Q)*pi, an integer N means N*pi, decimals are radians")
        return sp

    add("charpoly", "compute and cache characteristic polynomials")
    add("eval", "exact D(L, theta) and phi(L, theta)", theta=True)
    add("compare", "exact D against the winding-sum asymptotics", theta=True)
    sp = add("special", "ASM counts and D at multiples of pi/3")
    sp.add_argument("--series", action="store_true", help="also evaluate the special-angle series")
    sp = add("extract", "fit expansion amplitudes", L=False, theta=True)
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--Lmin", type=int, default=10)
    sp.add_argument("--Lmax", type=int, default=64)
    sp.add_argument("--k-terms", dest="k_terms", type=int, default=8)
    sp.add_argument("--source", choices=("exact", "asym"), default="exact")
    sp.add_argument("--all-powers", dest="all_powers", action="store_true",
                    help="include odd powers of 1/L")
    sp = add("relate", "integer-relation search for a decimal constant", L=False)
    sp.add_argument("--x", required=True)
    sp.add_argument("--const", action="append", help="named constant (repeatable)")
    sp.add_argument("--value", action="append", help="NAME=DECIMAL custom constant (repeatable)")
    sp = add("loops", "loop-count mean, variance and wrapping probability")
    sp.add_argument("--asym", action="store_true", help="asymptotic formulas instead of exact values")
    add("probabilities", "exact loop-count distribution P(L, m)")
    return p


def _config(args) -> RunConfig:
    skip = {"command", "L", "theta", "digits", "n_max", "k_max", "cache_dir", "format"}
    extra = []
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None or v is False:
            continue
        extra.append((k, ",".join(v) if isinstance(v, list) else str(v)))
    return RunConfig(
        command=args.command,
        L=_canon_L(args.L) if getattr(args, "L", None) else "",
        theta=args.theta.canonical() if getattr(args, "theta", None) else "",
        digits=args.digits, n_max=args.n_max, k_max=args.k_max,
        cache_dir=args.cache_dir, format=args.format, extra=tuple(extra))


HANDLERS = {
    "charpoly": cmd_charpoly, "eval": cmd_eval, "compare": cmd_compare,
    "special": cmd_special, "extract": cmd_extract, "relate": cmd_relate,
    "loops": cmd_loops, "probabilities": cmd_probabilities,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.digits < 16:
            raise UsageError("--digits must be >= 16")
        if hasattr(args, "L") and args.L is not None:
            args.L = parse_L_range(args.L, 2 if args.command == "compare" else 1)
        if getattr(args, "theta", None) is not None:
            try:
                args.theta = ThetaValue.parse(args.theta)
            except (ValueError, ArithmeticError) as exc:
                raise UsageError(f"bad theta {args.theta!r}") from exc
        try:
            AsymptoticParams(args.n_max, args.k_max)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        cfg = _config(args)
        HANDLERS[args.command](args, cfg, Emitter(cfg))
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheError, OSError) as exc:
        print(f"cache/IO error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError, PrecisionError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
