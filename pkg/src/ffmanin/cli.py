"""Command-line driver: ffmanin <subcommand> [options]."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .curve import (SingularCurveError, UnsupportedCharacteristicError, WeierstrassCurve,
                    global_reduction)
from .ff import DEFAULT_PRECISION, FieldError, build_field, is_prime
from .funcfield import CharacterError, parse_character
from .jacobi import JacobiError, h2_polynomial, ulmer_curve, ulmer_report
from .lfun import (EulerCache, EulerData, FeasibilityError, LFunctionError, expected_degree,
                   lfunction, twisted_lfunction)
from .manin import (character_contribution, character_family, degree_bounds, grid_csv,
                    ordinary_check, pesenti_szpiro_check, upper_thm13)
from .padic import ValuedPoly, sample_min_valuation
from .poly import DEFAULT_SEED, ParseError

EXIT_OK, EXIT_PARSE, EXIT_SINGULAR, EXIT_UNSUPPORTED, EXIT_CONSISTENCY = 0, 2, 3, 4, 5
SLOW_DEGREE = 4


class UsageError(ValueError):
    pass


# --- helpers -------------------------------------------------------------------------------

def _int_list(text: str) -> list:
    """"1,2,5-7" -> [1, 2, 5, 6, 7]."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _field(args):
    if args.p is None:
        raise UsageError("--p is required")
    if not is_prime(args.p):
        raise ParseError(f"{args.p} is not prime")
    if args.p < 5:
        raise UnsupportedCharacteristicError("characteristic must be at least 5")
    return build_field(args.p, args.d)


def _curve(args):
    if not args.curve:
        ns = _int_list(args.n) if args.n else []
        if len(ns) != 1:
            raise UsageError("--curve (or a single Ulmer exponent --n) is required")
        return ulmer_curve(_field(args), ns[0])
    return WeierstrassCurve.from_string(_field(args), args.curve)


def _cache(args):
    if not args.cache:
        return None
    return EulerCache(args.cache, args.p, args.d)


def _slow_gate(args, degree_needed: int) -> bool:
    """Counts over places of degree >= SLOW_DEGREE need --deep."""
    return degree_needed < SLOW_DEGREE or args.deep


def _counted_degree(delta: int, mode: str, twisted: bool = False) -> int:
    if mode == "full":
        return delta + (2 if twisted else 0)
    return (delta + 1) // 2


def _characters(args, F, avoid):
    chars = [parse_character(F, c, args.seed) for c in args.char or []]
    if args.max_cond_deg:
        chars += character_family(F, args.max_cond_deg, _int_list(args.orders), avoid,
                                  seed=args.seed)
    return chars


def _header(args, command):
    return {"command": command, "version": __version__, "seed": args.seed}


def _reduction_table(E, red):
    F = E.F
    rows = []
    for r in sorted(red.local, key=lambda r: r.place):
        rows.append({
            "place": r.place.label(F), "degree": r.place.degree, "kodaira": r.kodaira,
            "reduction": r.reduction, "v_c4": _num(r.v_c4), "v_c6": _num(r.v_c6),
            "v_delta": r.v_delta, "v_delta_min": r.v_delta_min,
            "conductor_exponent": r.conductor_exponent,
        })
    return rows


def _num(x):
    if isinstance(x, float):
        return "inf" if x == float("inf") else x
    return x


def _is_ulmer_form(E):
    """n when E is y^2 + x y = x^3 - T^n, else None."""
    a1, a2, a3, a4, a6 = E.a
    if a1 != 1 or a2 != 0 or a3 != 0 or a4 != 0:
        return None
    f = -a6
    if not f.den.is_one() or f.num.degree < 1:
        return None
    c = f.num.c
    if c[-1] != 1 or any(c[:-1]):
        return None
    return f.num.degree


# --- subcommands ---------------------------------------------------------------------------

def cmd_tate(args):
    E = _curve(args)
    red = global_reduction(E, args.seed)
    rep = _header(args, "tate")
    rep.update({"curve": E.spec_string(), "deg_delta": red.deg_delta,
                "deg_conductor": red.deg_conductor, "places": _reduction_table(E, red)})
    return rep, rep["places"]


def cmd_lfun(args):
    E = _curve(args)
    cache = _cache(args)
    data = EulerData(E, cache, progress=SLOW_DEGREE)
    chars = [parse_character(E.F, c, args.seed) for c in args.char or []]
    if len(chars) > 1:
        raise UsageError("lfun takes at most one --char")
    chi = chars[0] if chars else None
    delta = expected_degree(data, chi)
    need = _counted_degree(delta, args.mode, chi is not None)
    if not _slow_gate(args, need):
        raise FeasibilityError(f"needs places of degree up to {need}; rerun with --deep")
    if chi is None:
        L = lfunction(E, args.mode, data=data)
    else:
        L = twisted_lfunction(E, chi, mode=args.mode, data=data)
    if cache is not None:
        cache.save()
    rep = _header(args, "lfun")
    rep.update({"curve": E.spec_string(), "character": chi.describe() if chi else "trivial",
                "mode": args.mode, "lpolynomial": L.to_json(args.precision)})
    return rep, None


def _lower_and_witnesses(args, E, data, L, chars):
    skipped = []
    rows = [{"character": "none (m >= 0)", "contribution": Fraction(0), "l_q": None,
             "v_q_epsilon_inverse": None}]
    if L is not None:
        lq = L.l_q(args.precision)
        rows = [{"character": "trivial", "contribution": E.d * lq, "l_q": lq,
                 "v_q_epsilon_inverse": None}]

    def run(a):
        try:
            return character_contribution(*a)
        except FeasibilityError:
            return None

    reachable = []
    for chi in chars:
        need = _counted_degree(expected_degree(data, chi), "completed")
        if not args.skip_slow and _slow_gate(args, need):
            reachable.append(chi)
        else:
            skipped.append(chi.describe() + " (needs --deep)")
    chars = reachable
    pool_args = [(E, chi, data, "completed", args.precision) for chi in chars]
    # Euler data for each degree is filled before the pool starts so threads only read it.
    if chars:
        delta = max(expected_degree(data, c) for c in chars)
        for e in range(1, _counted_degree(delta, "completed") + 1):
            try:
                data.degree(e)
            except FeasibilityError:
                break
        data.infinity_data()
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(run, pool_args))
    for chi, w in zip(chars, results):
        if w is None:
            skipped.append(chi.describe())
            continue
        rows.append({"character": w.character, "contribution": w.contribution,
                     "l_q": w.l_q, "v_q_epsilon_inverse": w.v_q_epsilon_inverse})
    return rows, skipped


def cmd_analyze(args):
    E = _curve(args)
    F = E.F
    red = global_reduction(E, args.seed)
    cache = _cache(args)
    data = EulerData(E, cache, progress=SLOW_DEGREE)
    bad = {r.place for r in red.bad()}
    chars = _characters(args, F, bad)
    for chi in chars:
        if any(P in bad for P in chi.conductor_places()):
            raise CharacterError(f"conductor of {chi.describe()} meets the conductor of E")
    upper = upper_thm13(E)
    notes = []
    delta = expected_degree(data)
    need = _counted_degree(delta, "completed")
    witnesses = [{"character": "none (m >= 0)", "contribution": Fraction(0)}]
    ordinary = None
    lpoly = None
    if args.skip_slow or not _slow_gate(args, need):
        notes.append(f"L(E, t) needs places of degree up to {need}; count skipped (use --deep)")
    else:
        L = lfunction(E, "completed", data=data)
        lpoly = L.to_json(args.precision)
        ordinary = ordinary_check(E, L, args.precision)
        rows, skipped = _lower_and_witnesses(args, E, data, L, chars)
        witnesses += rows
        if skipped:
            notes.append("characters out of reach: " + "; ".join(skipped))
    n = _is_ulmer_form(E)
    if n is not None and n % F.p and E.p >= 5:
        H = h2_polynomial(E.p, E.d, n)
        witnesses.append({"character": f"jacobi slopes of the Fermat quotient (n={n})",
                          "contribution": E.d * H.l_q()})
        notes.append("jacobi witness: l_q of the H^2 determinant from Stickelberger valuations")
    lower = max(w["contribution"] for w in witnesses)
    if lower > upper:
        raise ArithmeticError(f"lower bound {lower} exceeds upper bound {upper}")
    exact = None
    if lower == upper and upper.denominator == 1:
        exact = int(upper)
    elif ordinary and upper.denominator == 1:
        exact = int(upper)
    ps = pesenti_szpiro_check(E)
    if not ps.holds:
        raise ArithmeticError("Pesenti-Szpiro inequality fails after descent")
    if cache is not None:
        cache.save()
    rep = _header(args, "analyze")
    rep.update({
        "curve": E.spec_string(), "p": E.p, "d": E.d,
        "deg_delta": red.deg_delta, "deg_conductor": red.deg_conductor,
        "reduction": _reduction_table(E, red),
        "lower": str(lower), "upper": str(upper), "ordinary": ordinary,
        "scan": "restricted scan: " + (", ".join(c.describe() for c in chars) or "trivial only"),
        "witnesses": [_strs(w) for w in witnesses],
        "pesenti_szpiro": ps.to_json(), "conductor_bound": ps.conductor_bound_json(),
        "notes": notes,
    })
    if lpoly is not None:
        rep["lpolynomial"] = lpoly
    if exact is not None:
        rep["exact"] = exact
    return rep, None


def _strs(d):
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in d.items()}


def cmd_twist_scan(args):
    E = _curve(args)
    red = global_reduction(E, args.seed)
    bad = {r.place for r in red.bad()}
    chars = _characters(args, E.F, bad)
    if not chars:
        raise UsageError("give --char or --max-cond-deg")
    cache = _cache(args)
    data = EulerData(E, cache, progress=SLOW_DEGREE)
    need = _counted_degree(expected_degree(data), "completed")
    if args.skip_slow or not _slow_gate(args, need):
        L = None
        trivial_skipped = [f"trivial (needs --deep: places of degree up to {need})"]
    else:
        L = lfunction(E, "completed", data=data)
        trivial_skipped = []
    rows, skipped = _lower_and_witnesses(args, E, data, L, chars)
    skipped = trivial_skipped + skipped
    if cache is not None:
        cache.save()
    rows = [_strs(r) for r in rows]
    rep = _header(args, "twist-scan")
    rep.update({"curve": E.spec_string(), "upper": str(upper_thm13(E)),
                "lower": max((Fraction(r["contribution"]) for r in rows)).__str__(),
                "rows": rows, "skipped": skipped})
    return rep, rows


def cmd_jacobi(args):
    if args.p is None or args.n is None:
        raise UsageError("--p and --n are required")
    ns = _int_list(args.n)
    if len(ns) != 1:
        raise UsageError("jacobi takes a single --n")
    H = h2_polynomial(args.p, args.d, ns[0], exact=args.exact, precision=args.precision)
    rows = H.rows()
    for r, v in zip(rows, H.values):
        r["a"] = ",".join(map(str, r["a"]))
        if v.padic is not None:
            r["direct_valuation"] = str(Fraction(v.padic.valuation, args.d))
    rep = _header(args, "jacobi")
    rep.update({"p": args.p, "d": args.d, "n": ns[0], "degree": H.degree, "rows": rows,
                "slopes": [str(s) for s in H.slopes()], "l_q": str(H.l_q())})
    return rep, rows


def cmd_ulmer(args):
    if (args.p is None and not args.ps) or args.n is None:
        raise UsageError("--p (or --ps) and --n are required")
    ps = _int_list(args.ps) if args.ps else [args.p]
    ns = _int_list(args.n)
    reports = []
    rows = []
    for p in ps:
        for n in ns:
            if len(ps) * len(ns) > 1 and (n % p == 0 or 6 % p == 0):
                continue
            r = ulmer_report(p, args.d, n).to_json()
            if args.deep and len(ps) * len(ns) == 1:
                E = WeierstrassCurve.from_string(build_field(p, args.d), f"1;0;0;0;-T^{n}")
                data = EulerData(E, _cache_for(args, p), progress=SLOW_DEGREE)
                L = lfunction(E, "completed", data=data)
                r["counted_l_q"] = str(L.l_q(args.precision))
                if Fraction(r["counted_l_q"]) != Fraction(r["l_q"]):
                    raise ArithmeticError("point-counted l_q disagrees with the jacobi slopes")
            reports.append(r)
            rows.append({k: r[k] for k in ("p", "d", "n", "deg_delta", "deg_conductor", "l_q",
                                           "lower_bound", "upper_bound")}
                        | {"manin_exact": r.get("manin_exact", "")})
    rep = _header(args, "ulmer")
    if len(reports) == 1:
        rep.update(reports[0])
    else:
        rep["grid"] = reports
    return rep, rows


def _cache_for(args, p):
    return EulerCache(args.cache, p, args.d) if args.cache else None


def cmd_degree_bound(args):
    R = degree_bounds(args.q, args.g, args.deg_inf, args.deg_m, args.m_upper)
    rep = _header(args, "degree-bound")
    rep.update(R.to_json())
    return rep, [R.to_json()]


def cmd_lemma42(args):
    if args.p is None or not args.poly:
        raise UsageError("--p and --poly are required")
    try:
        coeffs = [int(c) for c in args.poly.split(",")]
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    P = ValuedPoly(coeffs, args.p, args.d)
    res = sample_min_valuation(P, max_orders=args.orders_count, precision=args.precision)
    rows = [{"m": m, "j": j, "valuation": str(v)} for m, j, v in res.samples]
    rep = _header(args, "lemma42")
    rep.update({"poly": coeffs, "p": args.p, "d": args.d, "formula": str(res.formula),
                "observed_min": str(res.observed_min), "attained": res.attained,
                "attained_at_order": res.attained_at, "exact_zero_orders": res.exact_zeros,
                "samples": rows})
    return rep, rows


def cmd_cache(args):
    if not args.cache:
        raise UsageError("--cache is required")
    if args.p is None:
        raise UsageError("--p is required")
    C = EulerCache(args.cache, args.p, args.d)
    rep = _header(args, "cache")
    if args.action == "clear":
        n = len(C)
        C.clear()
        rep.update({"cleared": n, "path": args.cache})
        return rep, None
    fps = sorted({fp for (fp, _, _), _ in C.entries()})
    rows = [{"fingerprint": fp, "entries": sum(1 for (f, _, _), _ in C.entries() if f == fp)}
            for fp in fps]
    rep.update({"path": args.cache, "header": C.header(), "entries": len(C), "curves": rows})
    return rep, rows


COMMANDS = {
    "analyze": cmd_analyze, "ulmer": cmd_ulmer, "jacobi": cmd_jacobi, "lfun": cmd_lfun,
    "twist-scan": cmd_twist_scan, "tate": cmd_tate, "degree-bound": cmd_degree_bound,
    "lemma42": cmd_lemma42, "cache": cmd_cache,
}


# --- argument parsing and output -------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="characteristic")
    common.add_argument("--d", type=int, default=1, help="q = p^d")
    common.add_argument("--n", help="Ulmer exponent n (list or range for ulmer grids)")
    common.add_argument("--curve", help='Weierstrass coefficients "a1;a2;a3;a4;a6"')
    common.add_argument("--char", action="append",
                        help='character "mod=<poly>;order=<r>;exps=<e1,..>;z=<k>" (repeatable)')
    common.add_argument("--max-cond-deg", type=int, default=0,
                        help="scan characters with conductor degree up to this")
    common.add_argument("--orders", default="2", help="character orders for the scan")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache", help="trace cache file")
    common.add_argument("--deep", action="store_true",
                        help="allow point counts over places of degree >= 4")
    common.add_argument("--skip-slow", action="store_true", help="never run slow point counts")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    parser = argparse.ArgumentParser(prog="ffmanin", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "jacobi", "tate", "twist-scan"):
        sp = sub.add_parser(name, parents=[common])
        if name == "jacobi":
            sp.add_argument("--exact", action="store_true",
                            help="also sum each Jacobi sum directly")
    sp = sub.add_parser("ulmer", parents=[common])
    sp.add_argument("--ps", help="list of primes for a grid (overrides --p)")
    sp = sub.add_parser("lfun", parents=[common])
    sp.add_argument("--mode", choices=["completed", "full"], default="completed")
    sp = sub.add_parser("degree-bound", parents=[common])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--g", type=int, default=0)
    sp.add_argument("--deg-inf", type=int, default=1)
    sp.add_argument("--deg-m", type=int, required=True)
    sp.add_argument("--m-upper", type=int, default=0)
    sp = sub.add_parser("lemma42", parents=[common])
    sp.add_argument("--poly", help="integer coefficients c0,c1,... of P(t)")
    sp.add_argument("--orders-count", type=int, default=10, help="length of the sampling schedule")
    sp = sub.add_parser("cache", parents=[common])
    sp.add_argument("action", choices=["inspect", "clear"])
    return parser


def _validate(args):
    if args.precision < 8:
        raise UsageError("--precision must be at least 8")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    if args.d < 1:
        raise UsageError("--d must be at least 1")


def render(report, rows, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, default=str)
    if fmt == "csv":
        if rows is None:
            rows = [{k: v for k, v in report.items() if not isinstance(v, (list, dict))}]
        cols = list(rows[0].keys()) if rows else []
        head = f"# ffmanin {report.get('command')} version={report.get('version')} seed={report.get('seed')}\n"
        return head + grid_csv(rows, cols).rstrip("\n")
    lines = []
    for k in sorted(report):
        v = report[k]
        if isinstance(v, (list, dict)):
            v = json.dumps(v, sort_keys=True, default=str)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        _validate(args)
        report, rows = COMMANDS[args.command](args)
    except (ParseError, UsageError, CharacterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularCurveError as exc:
        print(f"error: singular curve: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (UnsupportedCharacteristicError, FeasibilityError, JacobiError, FieldError) as exc:
        print(f"error: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ArithmeticError, LFunctionError) as exc:
        print(f"error: consistency check failed: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(render(report, rows, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
