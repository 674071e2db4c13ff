"""Command-line interface.

Every command prints one JSON payload on stdout (sorted keys, a ``schema``
field, round-trip floats, ``"unbounded"`` for infinite bounds) and writes
CSV files when ``-o`` is given.  Exit codes: 0 pass or data produced,
1 a check ran and failed, 2 input error, 3 resource guard tripped.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import conditions, existence, spectra, transforms
from .core import (
    DomainError,
    ResourceGuardError,
    SpecificationError,
    expand_sequence,
    load_spec,
    spec_to_dict,
)
from .presets import BINARY_VARIANTS, PRESET_NAMES, get_preset

SCHEMA = "infconv/v1"

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


@dataclass
class CommandResult:
    command: list
    payload: dict
    exit_code: int = EXIT_OK


class InputError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: inf becomes "unbounded", NaN becomes null, numpy scalars become Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "unbounded" if x > 0 else "-unbounded"
        return x
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False)


def _fmt(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "unbounded"
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def parse_range(text: str) -> np.ndarray:
    """``a:b:step`` inclusive of both ends."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise InputError(f"expected a:b:step, got {text!r}") from exc
    if step <= 0 or b < a:
        raise InputError("range needs step > 0 and b >= a")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(n)


def _resolve(args):
    """``(spec, notes, label)`` from --spec or --preset."""
    if getattr(args, "spec", None):
        return load_spec(args.spec), (), str(args.spec)
    name = getattr(args, "preset", None)
    if not name:
        raise InputError("give --spec FILE or --preset NAME")
    try:
        p = get_preset(name, getattr(args, "variant", None))
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    return p.spec, p.notes, p.spec.name or name


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check_admissible(args) -> CommandResult:
    n, b = args.n, parse_ints(args.b)
    if args.l is not None:
        t = conditions.check_unitarity(n, b, parse_ints(args.l))
        return CommandResult([], {"triple": t.to_dict()}, EXIT_OK if t.certified else EXIT_FAILED)
    found = conditions.find_spectrum_sets(n, b, args.max_results)
    payload = {
        "scale": n, "digits": sorted(b),
        "zeroDifferences": conditions.zero_differences(n, sorted(b)),
        "results": [t.to_dict() for t in found],
        "normalization": "every L contains 0",
    }
    return CommandResult([], payload, EXIT_OK if found else EXIT_FAILED)


def cmd_classify(args) -> CommandResult:
    spec, notes, label = _resolve(args)
    v = conditions.classify(spec, args.n_max, notes)
    ev = existence.existence_verdict(spec, args.n_max)
    payload = {
        "source": label,
        "spec": spec_to_dict(spec),
        "nMax": args.n_max,
        "classification": v.to_dict(),
        "existence": ev.to_dict(),
        "hypotheses": conditions.ROUTE_HYPOTHESES.get(v.route, None),
    }
    return CommandResult([], payload)


def cmd_fourier(args) -> CommandResult:
    spec, _, label = _resolve(args)
    xi = parse_range(args.xi)
    depth, values, bounds = transforms.transform_grid(spec, xi, args.depth, start=args.start)
    if args.output:
        write_csv(args.output, ["xi", "re", "im", "abs", "tailErrorBound"],
                  ((x, v.real, v.imag, abs(v), u) for x, v, u in zip(xi, values, bounds)))
    payload = {
        "source": label, "start": args.start, "depth": depth, "points": len(xi),
        "maxModulus": float(np.abs(values).max()),
        "maxTailErrorBound": float(bounds.max()),
        "output": args.output,
    }
    return CommandResult([], payload)


def cmd_spectrum(args) -> CommandResult:
    spec, _, label = _resolve(args)
    triples = spectra.spectrum_triples(spec, args.level)
    payload = {"source": label, "level": args.level, "triples": [t.to_dict() for t in triples]}
    if not all(t.certified for t in triples):
        payload["check"] = "certification"
        return CommandResult([], payload, EXIT_FAILED)
    try:
        cand = spectra.candidate_spectrum(triples)
    except spectra.CollisionError as exc:
        payload["collision"] = {"message": str(exc), "first": exc.first, "second": exc.second}
        return CommandResult([], payload, EXIT_FAILED)
    payload["cardinality"] = cand.cardinality
    if cand.cardinality <= 4096:
        payload["points"] = list(cand.points)
    code = EXIT_OK
    check = args.check
    payload["check"] = check
    if check == "gram":
        g = spectra.finite_level_gram(triples)
        payload["gram"] = {"residual": g.residual, "size": g.size, "certified": g.certified}
        code = EXIT_OK if g.certified else EXIT_FAILED
    elif check == "orthogonality":
        r = spectra.orthogonality_check(spec, None, args.level, args.depth, args.tol)
        payload["orthogonality"] = r.to_dict()
        code = EXIT_OK if r.passed else EXIT_FAILED
    elif check == "completeness":
        xi = np.arange(args.grid) / args.grid
        c = spectra.completeness_scan(spec, None, args.level, xi, args.depth)
        lo, hi = c.interval
        payload["completeness"] = {"qMin": c.q_min, "qMax": c.q_max, "interval": [lo, hi],
                                   "threshold": args.q_min, "points": args.grid}
        if args.output:
            write_csv(args.output, ["xi", "q", "slack"], zip(c.xi, c.q, c.slack))
        code = EXIT_OK if c.q_min >= args.q_min and lo <= 1 <= hi else EXIT_FAILED
    return CommandResult([], payload, code)


def cmd_equipositive(args) -> CommandResult:
    spec, _, label = _resolve(args)
    tails = parse_ints(args.tails)
    r = spectra.equipositivity_scan(spec, tails, args.grid, args.shifts, args.depth, args.delta)
    if args.output:
        rows = []
        for n in tails:
            rows.extend((x, k, m, n) for x, k, m in zip(r.grid, r.shift_map[n], r.min_moduli[n]))
        write_csv(args.output, ["x", "k_x", "minModulus", "tail"], rows)
    payload = {"source": label, **r.to_dict()}
    if not args.full:
        payload.pop("shiftMap")
        payload.pop("minModulus")
    return CommandResult([], payload, EXIT_OK if r.witness else EXIT_FAILED)


def cmd_sample(args) -> CommandResult:
    spec, _, label = _resolve(args)
    rng = None if args.range is None else tuple(float(t) for t in args.range.split(":"))
    s = existence.sample_measure(spec, args.depth, args.count, args.seed, args.start, args.bins, rng, args.jobs)
    if args.output:
        write_csv(args.output, ["binLeft", "binRight", "count", "density"],
                  zip(s.edges[:-1], s.edges[1:], s.counts.tolist(), s.density))
    return CommandResult([], {"source": label, **s.to_dict(), "output": args.output})


def cmd_three_series(args) -> CommandResult:
    spec, _, label = _resolve(args)
    r = existence.three_series(spec, args.r, args.n_max)
    payload = {"source": label, "nMax": args.n_max, **r.to_dict()}
    if r.exact_totals:
        payload["exactTotals"] = {k: str(v) for k, v in zip(("mass", "mean", "var"), r.exact_totals)}
    return CommandResult([], payload)


def cmd_expand(args) -> CommandResult:
    spec, _, label = _resolve(args)
    pairs = expand_sequence(spec, args.n_max)
    return CommandResult([], {"source": label, "spec": spec_to_dict(spec),
                              "pairs": [{"scale": p.scale, "digits": [str(b) if abs(b) >= 2**53 else b
                                                                      for b in p.digits]} for p in pairs]})


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _source_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--spec", help="sequence spec JSON file")
    g.add_argument("--preset", choices=PRESET_NAMES, help="built-in sequence")
    p.add_argument("--variant", choices=BINARY_VARIANTS, help="variant of the example-6.2 preset")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infconv", description="Infinite convolutions of admissible pairs.")
    ap.add_argument("--jobs", type=int, default=1, help="maximum worker threads")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="maximum worker threads")
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("check-admissible", help="certify (N, B, L) or search for L")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", required=True, help="digits, e.g. 0,2")
    p.add_argument("--l", help="spectrum set, e.g. 0,1")
    p.add_argument("--max-results", type=int, default=16)
    p.set_defaults(func=cmd_check_admissible)

    p = sub.add_parser("classify", help="condition dashboard and strongest conclusion")
    _source_args(p)
    p.add_argument("--n-max", type=int, default=200)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fourier", help="truncated transform on a grid; CSV xi,re,im,abs,tailErrorBound")
    _source_args(p)
    p.add_argument("--xi", required=True, help="a:b:step")
    p.add_argument("--depth", type=int, help="factors kept (adaptive when omitted)")
    p.add_argument("--start", type=int, default=0, help="tail index n for nu_{>n}")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("spectrum", help="candidate spectrum checks")
    _source_args(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--check", choices=("points", "gram", "orthogonality", "completeness"), default="points")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--q-min", type=float, default=0.95)
    p.add_argument("-o", "--output", help="CSV xi,q,slack for completeness")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("equipositive", help="equi-positivity scan; CSV x,k_x,minModulus,tail")
    _source_args(p)
    p.add_argument("--tails", default="0", help="tail indices, e.g. 0,1,2")
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--shifts", type=int, default=3, help="shift range K")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--delta", type=float, default=1 / 64)
    p.add_argument("--full", action="store_true", help="include the shift map in the JSON payload")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_equipositive)

    p = sub.add_parser("sample", help="Monte-Carlo sample; CSV binLeft,binRight,count,density")
    _source_args(p)
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--bins", type=int, default=300)
    p.add_argument("--range", help="lo:hi histogram range (default: empirical)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("three-series", help="three-series test at radius r")
    _source_args(p)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=100)
    p.set_defaults(func=cmd_three_series)

    p = sub.add_parser("expand", help="print the first n pairs")
    _source_args(p)
    p.add_argument("--n-max", type=int, default=5)
    p.set_defaults(func=cmd_expand)
    return ap


def _join_ranges(argv: list) -> list:
    """Glue ``--xi -2:2:0.01`` into ``--xi=-2:2:0.01`` so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("--xi", "--range") and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> CommandResult:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = ap.parse_args(_join_ranges(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        return CommandResult(argv, {"schema": SCHEMA, "error": "usage"}, code)
    if args.jobs < 1:
        return CommandResult(argv, {"schema": SCHEMA, "error": "--jobs must be >= 1"}, EXIT_INPUT)
    try:
        res = args.func(args)
    except ResourceGuardError as exc:
        return CommandResult(argv, {"schema": SCHEMA, "error": str(exc), "kind": "resource"}, EXIT_GUARD)
    except (InputError, SpecificationError, DomainError, FileNotFoundError, ValueError) as exc:
        return CommandResult(argv, {"schema": SCHEMA, "error": str(exc), "kind": "input"}, EXIT_INPUT)
    res.command = argv
    res.payload = {"schema": SCHEMA, "command": args.command, **res.payload}
    return res


def main(argv=None) -> int:
    res = run(argv)
    stream = sys.stdout if res.exit_code in (EXIT_OK, EXIT_FAILED) else sys.stderr
    print(dumps(res.payload), file=stream)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
