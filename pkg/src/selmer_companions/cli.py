"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import companions as comp
from .curves import WeierstrassCurve, invariants, minimal_model
from .exactmath import DEFAULT_WINDOW, IncompleteFactorization
from .localred import bad_primes, tate_algorithm
from .modpoly import EVEN_KENKU_LEVELS, MissingLevelsError, ModPolyParseError, ModPolyStore, find_exceptional_t

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def _curve(values) -> WeierstrassCurve:
    if len(values) != 5:
        raise UsageError(f"a curve needs 5 coefficients a1 a2 a3 a4 a6, got {len(values)}")
    try:
        return WeierstrassCurve(*(Fraction(v) for v in values))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad coefficient: {exc}") from exc


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


# --------------------------------------------------------------------------


def cmd_invariants(args) -> int:
    E = _curve(args.coeffs)
    inv = invariants(E)
    payload = {
        "curve": str(E),
        "b2": str(inv.b2), "b4": str(inv.b4), "b6": str(inv.b6), "b8": str(inv.b8),
        "c4": str(inv.c4), "c6": str(inv.c6),
        "disc": str(inv.disc),
        "singular": inv.disc == 0,
    }
    lines = [f"curve {E}"]
    lines += [f"{k} = {payload[k]}" for k in ("b2", "b4", "b6", "b8", "c4", "c6")]
    lines.append(f"disc = {inv.disc}")
    if inv.disc == 0:
        lines.append("singular: disc = 0, no j-invariant or minimal model")
        payload["j"] = None
        payload["minimal_model"] = None
    else:
        Emin, _ = minimal_model(E)
        payload["j"] = str(inv.j)
        payload["minimal_model"] = str(Emin)
        lines.append(f"j = {inv.j}")
        lines.append(f"minimal model {Emin}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_localdata(args) -> int:
    E = _curve(args.coeffs)
    if E.is_singular():
        print(f"error: {E} is singular", file=sys.stderr)
        return EXIT_FAIL
    if args.prime is not None:
        primes = [args.prime]
    else:
        bad = bad_primes(E)
        if bad.partial:
            print(f"warning: unfactored cofactor {bad.residue}; listing known primes only", file=sys.stderr)
        primes = bad.sorted()
    records = [tate_algorithm(E, p) for p in primes]
    payload = [
        {"p": ld.p, "kodaira": str(ld.kodaira), "f": ld.f, "m": ld.m, "tamagawa": ld.tamagawa,
         "kind": ld.kind, "vdisc": ld.vdisc, "pot_mult": ld.pot_mult}
        for ld in records
    ]
    lines = [f"p={ld.p} {ld.kodaira} f={ld.f} c={ld.tamagawa} m={ld.m} {ld.kind}" for ld in records]
    _emit(args, payload, lines)
    return EXIT_OK


def _store(args, required: bool) -> ModPolyStore | None:
    store = ModPolyStore(args.data_dir)
    if required:
        store.require(EVEN_KENKU_LEVELS)
        return store
    if len(store.available()) == len(EVEN_KENKU_LEVELS):
        return store
    return None


def _record_lines(rec: comp.TableRecord) -> list[str]:
    c = rec.companion
    head = f"q={rec.q} t={rec.t}: {c.verdict}"
    if rec.singular:
        head += " [singular member]"
    elif rec.exceptional:
        head += " [listed exception]"
    lines = [head]
    if c.verdict != comp.DEGENERATE:
        for name, ok in c.conditions().items():
            lines.append(f"  {name}: {'yes' if ok else 'no'}")
        lines.append(f"  bad primes E={c.bad_primes_E} H={c.bad_primes_H}")
        lines.append(f"  pot. mult. primes E={c.pot_mult_primes_E} H={c.pot_mult_primes_H}")
        for p, (ke, kh) in sorted(c.kodaira_types.items()):
            lines.append(f"  kodaira at {p}: E {ke}, H {kh}")
    else:
        lines.append(f"  {c.reason}")
    if rec.isogeny is not None:
        iso = rec.isogeny
        lines.append(f"  isogeny: {iso.verdict} (cm_excluded={iso.cm_excluded}, odd_excluded={iso.odd_excluded})")
    return lines


def cmd_verify(args) -> int:
    q = args.q
    in_table = q in comp.TABLE1_Q
    if not in_table and not args.force:
        raise UsageError(f"q = {q} is not in the table; use 'search' for new q, or --force to check anyway")
    store = _store(args, required=False)
    if args.table1:
        if args.t_min is None or args.t_max is None:
            raise UsageError("--table1 needs --t-min and --t-max")
        ts = range(args.t_min, args.t_max + 1)
        if in_table:
            records = comp.verify_table1(q, ts, store, jobs=args.jobs)
        else:
            records = [comp.check_pair(q, t, store) for t in ts]
        failed = [r for r in records if not r.ok]
    else:
        if args.t is None:
            raise UsageError("give --t, or --table1 with --t-min/--t-max")
        rec = comp.check_pair(q, args.t, store)
        records = [rec]
        ok = rec.companion.certified and (rec.isogeny is None or rec.isogeny.certified)
        failed = [] if ok else [rec]
    lines = []
    for rec in records:
        lines += _record_lines(rec)
    if store is None:
        lines.append("note: modular polynomial data not found; isogeny checks skipped")
    lines.append(f"{len(records)} pair(s), {len(failed)} failing")
    payload = {
        "records": [r.to_dict() for r in records],
        "failing": [[r.q, r.t] for r in failed],
        "isogeny_checked": store is not None,
    }
    _emit(args, payload, lines)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_isogeny_scan(args) -> int:
    store = _store(args, required=True)
    scan = find_exceptional_t(args.q, store, window=args.window)
    lines = [f"q={args.q} window={args.window}"]
    if scan.roots:
        lines += [f"  N={n} t={t}" for n, t in scan.roots]
    else:
        lines.append("  no exceptional t")
    lines.append(f"  exceptional t: {sorted(scan.root_set())}")
    lines.append(f"  singular t: {scan.singular}")
    lines.append(f"caveat: {scan.caveat}")
    _emit(args, scan.to_dict(), lines)
    return EXIT_OK


def cmd_search(args) -> int:
    qs = range(args.q_min, args.q_max + 1)
    evidence = comp.search_q(qs, args.modulus, args.samples, args.t_bound, jobs=args.jobs)
    passing = [ev for ev in evidence if ev.passing]
    lines = [f"{comp.HEURISTIC_LABEL}"]
    for ev in passing:
        lines.append(f"q={ev.q} t = {ev.residue} mod {ev.modulus}: {ev.passed}/{ev.samples} samples pass")
    if not passing:
        lines.append("no passing classes")
    payload = {
        "label": comp.HEURISTIC_LABEL,
        "candidates": [ev.to_dict() for ev in passing],
        "classes": [ev.to_dict() for ev in evidence],
    }
    _emit(args, payload, lines)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--data-dir", default=None, help="modular polynomial directory (else $SELMER_DATA_DIR, else ./data)")
    common.add_argument("--jobs", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="selmer-companions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="invariants and minimal model of a curve")
    p.add_argument("coeffs", nargs="*", help="a1 a2 a3 a4 a6")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("localdata", parents=[common], help="Tate's algorithm at one or all bad primes")
    p.add_argument("coeffs", nargs="*", help="a1 a2 a3 a4 a6")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--prime", type=int)
    g.add_argument("--all-bad", action="store_true")
    p.set_defaults(func=cmd_localdata)

    p = sub.add_parser("verify", parents=[common], help="check the companion conditions for family members")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--table1", action="store_true", help="check every t of the tabulated class in a range")
    p.add_argument("--t-min", type=int)
    p.add_argument("--t-max", type=int)
    p.add_argument("--force", action="store_true", help="allow q outside the table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("isogeny-scan", parents=[common], help="integer t where E and H are isogenous")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--window", type=_positive_int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_isogeny_scan)

    p = sub.add_parser("search", parents=[common], help="sample residue classes of t for a range of q")
    p.add_argument("--q-min", type=int, required=True)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--modulus", type=_positive_int, required=True)
    p.add_argument("--samples", type=_positive_int, default=25)
    p.add_argument("--t-bound", type=_positive_int, default=200)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (MissingLevelsError, ModPolyParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IncompleteFactorization as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
