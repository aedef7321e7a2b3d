"""Command-line front end: ``betamaps <subcommand> ...`` or ``python -m betamaps``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import bfg, oracle, rp2
from .beta_exact import (bracket_table, cumulant_exact, cumulant_expansion, faulhaber_sum,
                         moment_exact, theta_of_profile)
from .maps import StructureError
from .perms import Perm
from .poly import BivariatePoly

EXACT_CAP = 8        # labels for exact enumeration and cumulants
BIJECTION_CAP = 6    # labels for exhaustive bijection checks
CLASSES = ("C", "S", "H", "S2", "RP2")
SUITES = ("bfg", "rp2", "faulhaber", "hermite", "oracle", "all")


class UsageError(Exception):
    pass


# Parsing --------------------------------------------------------------------------

def parse_profile(text: str) -> Tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise UsageError(f"profile {text!r} is not a comma-separated list of integers")
    if not parts or any(p < 1 for p in parts):
        raise UsageError(f"profile {text!r} must list positive integers")
    return parts


def parse_theta(text: str) -> Perm:
    try:
        theta = Perm.parse(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"cannot parse permutation {text!r}: {exc}")
    labels = sorted(theta.universe)
    if any(x.barred for x in labels) or [x.index for x in labels] != list(range(1, len(labels) + 1)):
        raise UsageError("the permutation must act on 1..n")
    return theta


def thread_count(arg: Optional[int]) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("BETAMAPS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"BETAMAPS_THREADS={env!r} is not an integer")
    return 1


def check_cap(size: int, cap: int, unsafe: bool, what: str):
    if size > cap and not unsafe:
        raise UsageError(f"{what} with {size} labels exceeds the default cap of {cap}; "
                         "pass --unsafe-large to run it anyway")


# Output ---------------------------------------------------------------------------

def poly_rows(poly: BivariatePoly) -> List[Tuple[int, int, str]]:
    return [(a, b, str(c)) for a, b, c in poly.sorted_terms()]


def emit_csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def jsonl(objs: Iterable[dict]) -> str:
    return "".join(json.dumps(o, sort_keys=True) + "\n" for o in objs)


# Subcommands ----------------------------------------------------------------------

def cmd_cumulant(args) -> Tuple[int, str]:
    parts = parse_profile(args.profile)
    check_cap(sum(parts), EXACT_CAP, args.unsafe_large, "an exact cumulant")
    threads = thread_count(args.threads)
    kappa = cumulant_exact(parts, threads)
    expansion = cumulant_expansion(parts, threads)
    if args.format == "csv":
        return 0, emit_csv(poly_rows(kappa), ("N_exp", "u_exp", "coeff"))
    if args.format == "text":
        lines = [f"kappa{list(parts)} = {kappa}"]
        lines += [f"  N^-{v}: {c}" for v, c in expansion]
        return 0, "\n".join(lines) + "\n"
    return 0, jsonl([{"profile": list(parts), "cumulant": kappa.to_json_obj(),
                      "expansion": [{"order": v, "coeff": c.to_json_obj()} for v, c in expansion]}])


def cmd_expand(args) -> Tuple[int, str]:
    parts = parse_profile(args.profile)
    check_cap(sum(parts), EXACT_CAP, args.unsafe_large, "an expansion")
    expansion = cumulant_expansion(parts, thread_count(args.threads))
    if args.format == "csv":
        rows = [(v, a, b, c) for v, poly in expansion for a, b, c in poly_rows(poly)]
        return 0, emit_csv(rows, ("order", "N_exp", "u_exp", "coeff"))
    if args.format == "text":
        return 0, "".join(f"N^-{v}: {c}\n" for v, c in expansion)
    return 0, jsonl({"profile": list(parts), "order": v, "coeff": c.to_json_obj()}
                    for v, c in expansion)


def cmd_bracket(args) -> Tuple[int, str]:
    theta = parse_theta(args.theta)
    check_cap(len(theta), EXACT_CAP, args.unsafe_large, "a bracket table")
    table = bracket_table(theta, thread_count(args.threads))
    rows = sorted((p, q, v) for (p, q), v in table.items()
                  if (args.p is None or p == args.p) and (args.q is None or q == args.q))
    if args.format == "csv":
        return 0, emit_csv(rows, ("p", "q", "value"))
    if args.format == "text":
        return 0, "".join(f"<e_{q}>_{{{theta},{p}}} = {v}\n" for p, q, v in rows)
    return 0, jsonl({"theta": str(theta), "p": p, "q": q, "value": v} for p, q, v in rows)


def enumerate_class(cls: str, theta: Perm) -> Iterator[dict]:
    if cls == "C":
        for gamma, sigma in bfg.configurations(theta):
            yield {"gamma": list(gamma.as_tuple()), "sigma": str(sigma)}
    elif cls == "H":
        for gamma, sigma in bfg.configurations(theta):
            yield bfg.hypermap_from_config(gamma, sigma).to_json_obj()
    elif cls == "S":
        for m in oracle.enumerate_suitably_labelled(theta):
            yield m.to_json_obj()
    elif cls == "S2":
        for m in oracle.enumerate_suitably_labelled(theta, oracle.planar_two_minima):
            yield m.to_json_obj()
    elif cls == "RP2":
        for fm in oracle.enumerate_flagged_rp2(theta):
            yield fm.to_json_obj()


def cmd_enumerate(args) -> Tuple[int, str]:
    theta = parse_theta(args.theta)
    check_cap(len(theta), EXACT_CAP, args.unsafe_large, "an enumeration")
    objs = list(enumerate_class(args.cls, theta))
    if args.format == "text":
        body = "".join(json.dumps(o, sort_keys=True) + "\n" for o in objs)
        return 0, body + f"count {len(objs)}\n"
    if args.format == "csv":
        rows = [(i, json.dumps(o, sort_keys=True)) for i, o in enumerate(objs)]
        return 0, emit_csv(rows, ("index", "object")) + f"count,{len(objs)}\n"
    return 0, jsonl(objs + [{"class": args.cls, "theta": str(theta), "count": len(objs)}])


def cmd_hermite(args) -> Tuple[int, str]:
    if args.n < 2 or args.n % 2:
        raise UsageError("--n must be even and at least 2")
    poly = oracle.beta_infinity_cumulant(args.n)
    rows = []
    for N in range(1, args.max_N + 1):
        lhs = poly.evaluate(N=N).coeff(0, 0)
        rhs = oracle.hermite_power_sums(N, args.n)
        rows.append((N, int(lhs) if lhs.denominator == 1 else str(lhs), rhs, lhs == rhs))
    code = 0 if all(r[3] for r in rows) else 1
    if args.format == "csv":
        return code, emit_csv(rows, ("N", "cumulant", "power_sum", "match"))
    if args.format == "text":
        return code, "".join(f"N={N}: {a} vs {b} {'ok' if m else 'MISMATCH'}\n" for N, a, b, m in rows)
    return code, jsonl({"check": "hermite", "n": args.n, "N": N, "lhs": a, "rhs": b, "match": m}
                       for N, a, b, m in rows)


def cmd_mc(args) -> Tuple[int, str]:
    profiles = [parse_profile(p) for p in args.profiles.split(";") if p.strip()]
    try:
        est = oracle.mc_sample(args.N, args.beta, args.samples, args.seed, profiles,
                               threads=thread_count(args.threads))
    except ValueError as exc:
        raise UsageError(str(exc))
    u = 2 / args.beta
    rows = []
    for p in profiles:
        exact = float(moment_exact(p).evaluate(N=args.N, u=u)) if sum(p) <= EXACT_CAP else None
        se = est.stderrs[p]
        z = None if exact is None or se == 0 else (est.means[p] - exact) / se
        rows.append((list(p), est.means[p], se, exact, z))
    if args.format == "csv":
        return 0, emit_csv([(";".join(map(str, p)), m, s, e, z) for p, m, s, e, z in rows],
                           ("profile", "mean", "stderr", "exact", "z"))
    if args.format == "text":
        return 0, "".join(f"{p}: {m:.6g} +- {s:.3g} (exact {e})\n" for p, m, s, e, _ in rows)
    return 0, jsonl({"check": "mc", "N": args.N, "beta": args.beta, "samples": args.samples,
                     "seed": args.seed, "profile": p, "mean": m, "stderr": s, "exact": e, "z": z}
                    for p, m, s, e, z in rows)


# Verification suites --------------------------------------------------------------

def partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def suite_faulhaber(args) -> Iterator[dict]:
    for e in range(11):
        poly = faulhaber_sum(e)
        bad = [N for N in range(1, 21) if poly.evaluate(N=N) != sum(h ** e for h in range(1, N + 1))]
        yield {"check": "faulhaber", "u": e, "match": not bad, "failing_N": bad}


def suite_hermite(args) -> Iterator[dict]:
    for n in range(2, 11, 2):
        poly = oracle.beta_infinity_cumulant(n)
        bad = [N for N in range(1, args.max_N + 1)
               if poly.evaluate(N=N) != oracle.hermite_power_sums(N, n)]
        yield {"check": "hermite", "n": n, "max_N": args.max_N, "match": not bad, "failing_N": bad}


def suite_oracle(args) -> Iterator[dict]:
    top = min(args.n, oracle.DEFAULT_CAP_K)
    max_N = min(args.max_N, oracle.DEFAULT_CAP_N)
    for total in range(1, top + 1):
        for parts in partitions(total):
            if len(parts) > 3:
                continue
            exact = moment_exact(parts)
            for N in range(1, max_N + 1):
                lhs = oracle.moment_by_direct_expectation(parts, N)
                rhs = exact.evaluate(N=N)
                yield json.loads(oracle.report("moment_direct", lhs == rhs,
                                               profile=list(parts), N=N, lhs=lhs, rhs=rhs))


def suite_bfg(args) -> Iterator[dict]:
    for n in range(1, min(args.n, BIJECTION_CAP if not args.unsafe_large else args.n) + 1):
        for parts in partitions(n):
            theta = theta_of_profile(parts)
            tally = bfg.verify_theta(theta, oracle.enumerate_suitably_labelled(theta))
            fails = {k: v for k, v in tally.items() if k.endswith("-fail")}
            yield {"check": "bfg", "profile": list(parts), "configurations": tally["configurations"],
                   "images": tally["images"], "failures": fails, "match": not fails}


def suite_rp2(args) -> Iterator[dict]:
    for n in range(2, min(args.n, BIJECTION_CAP if not args.unsafe_large else args.n) + 1, 2):
        for parts in partitions(n):
            theta = theta_of_profile(parts)
            maps = oracle.enumerate_suitably_labelled(theta, oracle.planar_two_minima)
            tally = rp2.verify_theta(theta, maps, oracle.enumerate_flagged_rp2(theta, pointed=True))
            fails = {k: v for k, v in tally.items() if k.endswith("-fail")}
            yield {"check": "rp2", "profile": list(parts), "maps": tally["maps"],
                   "pointed": tally["pointed"], "failures": fails, "match": not fails}


SUITE_RUNNERS = {
    "faulhaber": suite_faulhaber,
    "hermite": suite_hermite,
    "oracle": suite_oracle,
    "bfg": suite_bfg,
    "rp2": suite_rp2,
}


def cmd_verify(args) -> Tuple[int, str]:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    names = [s for s in SUITES if s != "all"] if args.suite == "all" else [args.suite]
    results = [r for name in names for r in SUITE_RUNNERS[name](args)]
    code = 0 if all(r["match"] for r in results) else 1
    if args.format == "text":
        return code, "".join(f"{'PASS' if r['match'] else 'FAIL'} {json.dumps(r, sort_keys=True)}\n"
                             for r in results)
    if args.format == "csv":
        rows = [(r["check"], r["match"], json.dumps(r, sort_keys=True)) for r in results]
        return code, emit_csv(rows, ("check", "match", "detail"))
    return code, jsonl(results)


# Entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--threads", type=int, default=None,
                        help="worker count (falls back to BETAMAPS_THREADS, then 1)")
    common.add_argument("--unsafe-large", action="store_true",
                        help="lift the default size caps")

    parser = argparse.ArgumentParser(prog="betamaps",
                                     description="Exact beta-ensemble cumulants and the maps behind them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cumulant", parents=[common], help="exact joint cumulant of a profile")
    p.add_argument("--profile", required=True, help="comma list, e.g. 2,4")
    p.set_defaults(run=cmd_cumulant)

    p = sub.add_parser("expand", parents=[common], help="1/N expansion of the normalized cumulant")
    p.add_argument("--profile", required=True)
    p.set_defaults(run=cmd_expand)

    p = sub.add_parser("bracket", parents=[common], help="bracket table of a face permutation")
    p.add_argument("--theta", required=True, help='cycle notation, e.g. "(1,2,3,4)"')
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(run=cmd_bracket)

    p = sub.add_parser("enumerate", parents=[common], help="list the objects of a class")
    p.add_argument("--class", dest="cls", required=True, choices=CLASSES)
    p.add_argument("--theta", required=True)
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", required=True, help="|".join(SUITES))
    p.add_argument("--n", type=int, default=BIJECTION_CAP, help="largest size checked")
    p.add_argument("--max-N", dest="max_N", type=int, default=10, help="largest matrix size checked")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("hermite", parents=[common], help="beta -> infinity cumulant vs Hermite roots")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-N", dest="max_N", type=int, default=10)
    p.set_defaults(run=cmd_hermite)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo trace moments")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profiles", default="2;4", help="semicolon-separated profiles")
    p.set_defaults(run=cmd_mc)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, out = args.run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (StructureError, oracle.CapExceeded) as exc:
        print(f"betamaps: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
