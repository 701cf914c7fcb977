"""``gaplab`` command-line front end.

Every subcommand writes its result to ``--out`` (default stdout) and a run
manifest next to it (``<out>.manifest.json``, or stderr for stdout).
Exit codes: 0 success, 1 runtime error, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
import time

from . import __version__
from .errors import DomainError, GaplabError
from .gapstats import (
    gallagher_histogram,
    gap_blocks,
    gap_cdf,
    reciprocal_sum,
    survivor_gap_report,
)
from .sieve import DEFAULT_SEGMENT_LEN, prime_count, small_primes
from .singular import (
    OffsetTuple,
    hl_compare,
    hl_count,
    is_admissible,
    pair_sum,
    singular_series,
    triple_sum,
)
from .survivors import (
    CRT_MODULUS_MAX,
    SurvivorConfig,
    crt_pair_oracle,
    crt_triple_oracle,
    tuple_counts,
)
from .thresholds import ThresholdSpec

DEFAULT_MAX_X = 10**10

RECIPSUM_HEADER = ["x", "family", "k", "eps", "sum", "count", "comparator_log_k_plus_1_x"]
GALLAGHER_HEADER = ["x", "lambda", "h", "k", "P_k", "poisson_prediction", "ratio"]
CDF_HEADER = ["x", "family", "lambda_at_x", "empirical", "predicted", "ratio"]
SURVIVOR_REPORT_HEADER = ["M", "2M", "population", "qualifying_frozen", "qualifying_exact", "comparator"]


def parse_int(text: str) -> int:
    """Accept ``1000000``, ``1e6``, ``10^6`` or ``10**6``."""
    s = text.strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", s)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    try:
        return int(s)
    except ValueError:
        pass
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def parse_checkpoints(text: str, x: int, floor: int = 2) -> list[int]:
    """``geometric:R`` gives ``x/R, x/R**2, ...`` down to 1000; ``list:a,b,...`` is explicit."""
    kind, _, arg = text.partition(":")
    if kind == "list":
        return sorted(parse_int(a) for a in arg.split(",") if a)
    if kind == "geometric":
        ratio = float(arg)
        if not ratio > 1:
            raise DomainError(f"--checkpoints ratio must exceed 1, got {arg!r}")
        out, c = [], x / ratio
        while c >= max(1000, floor):
            out.append(round(c))
            c /= ratio
        return sorted(out)
    raise DomainError(f"bad --checkpoints {text!r}; expected geometric:R or list:a,b,...")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _population(args):
    if args.set == "primes":
        if args.z is not None or args.delta is not None:
            raise DomainError("--z/--delta only apply with --set survivors")
        return "primes"
    if args.z is None and args.delta is None:
        raise DomainError("--set survivors needs --z N or --delta 1/N")
    return SurvivorConfig.parse(args.x, z=args.z, delta=args.delta)


def _thresholds(args) -> list[ThresholdSpec]:
    specs = [ThresholdSpec.parse(t) for t in args.threshold]
    if args.threads > 1:
        for s in specs:
            if s.family == "adaptive":
                raise DomainError(f"--threshold {s} is sequential by contract; use --threads 1")
    return specs


def cmd_pi(args) -> str:
    return f"{prime_count(args.x, args.segment_len, threads=args.threads)}\n"


def cmd_gaps(args) -> str:
    rows = (
        (a, b, b - a)
        for p, q in gap_blocks(args.x, _population(args), args.segment_len, threads=args.threads)
        for a, b in zip(p.tolist(), q.tolist())
    )
    return _csv(["p", "p_next", "gap"], rows)


def cmd_recipsum(args) -> str:
    population = _population(args)
    rows = []
    for spec in _thresholds(args):
        cps = parse_checkpoints(args.checkpoints, args.x, spec.domain_floor) if args.checkpoints else []
        acc = reciprocal_sum(
            args.x, spec, population, cps, args.segment_len, threads=args.threads
        )
        for c in acc.checkpoint_log:
            rows.append((
                c.x, spec.grammar_name, c.k, spec.eps, c.sum, c.count,
                spec.comparator(c.x, c.k),
            ))
    return _csv(RECIPSUM_HEADER, rows)


def cmd_cdf(args) -> str:
    population = _population(args)
    rows = []
    for spec in _thresholds(args):
        r = gap_cdf(args.x, spec, population, args.segment_len, threads=args.threads)
        rows.append((r.x, str(spec), r.lambda_at_x, r.empirical, r.predicted, r.ratio))
    return _csv(CDF_HEADER, rows)


def cmd_gallagher(args) -> str:
    if (args.lam is None) == (args.h is None):
        raise DomainError("give exactly one of --lambda or --h")
    hist = gallagher_histogram(args.x, args.lam, args.kmax, h=args.h, segment_len=args.segment_len)
    pred = hist.poisson()
    rows = []
    for k, (pk, pr) in enumerate(zip(hist.counts.tolist(), pred.tolist())):
        rows.append((hist.x, hist.lambda0, hist.h, k, pk, pr, pk / pr if pr else None))
    tail = max(hist.x - math.fsum(pred.tolist()), 0.0)
    rows.append((
        hist.x, hist.lambda0, hist.h, f">{hist.kmax}", hist.overflow, tail,
        hist.overflow / tail if tail else None,
    ))
    return _csv(GALLAGHER_HEADER, rows)


def cmd_sing(args) -> str:
    res = singular_series(OffsetTuple.parse(args.tuple), args.rel_err, args.truncation_prime)
    return _json(res.to_dict())


def cmd_singsum(args) -> str:
    h = args.h
    if args.kind == "pair":
        s = pair_sum(h)
        return _json({"kind": "pair", "h": h, "sum": s, "normalized": s / h})
    s = triple_sum(h)
    return _json({
        "kind": "triple", "h": h, "sum": s, "normalized": s / h**2,
        "unordered_sum": s / 2, "unordered_normalized": s / 2 / (h * (h - 1) / 2),
    })


def cmd_survivors(args) -> str:
    args.set = "survivors"
    cfg = _population(args)
    if not args.count_pairs and not args.count_triples:
        return cmd_gaps(args)
    patterns = [(d,) for d in range(1, args.count_pairs + 1)]
    patterns += [
        (d1, d2) for d2 in range(1, args.count_triples + 1) for d1 in range(1, d2)
    ]
    counts = tuple_counts(cfg, patterns, args.segment_len)
    use_oracle = cfg.mode == "fixed_z" and math.prod(small_primes(cfg.z - 1).tolist()) <= CRT_MODULUS_MAX
    rows = []
    for pat, n in zip(patterns, counts):
        if len(pat) == 1:
            oracle = crt_pair_oracle(cfg.x, cfg.z, pat[0]) if use_oracle else None
            rows.append(("pair", pat[0], "", n, oracle))
        else:
            oracle = crt_triple_oracle(cfg.x, cfg.z, *pat) if use_oracle else None
            rows.append(("triple", pat[0], pat[1], n, oracle))
    return _csv(["kind", "d1", "d2", "count", "crt_oracle"], rows)


def cmd_hl(args) -> str:
    H = OffsetTuple.parse(args.tuple)
    if not is_admissible(H):
        n = hl_count(args.x, H)
        return _json({"tuple": list(H.offsets), "x": args.x, "admissible": False,
                      "actual": n, "predicted": None, "ratio": None})
    c = hl_compare(args.x, H)
    return _json({"tuple": list(H.offsets), "x": c.x, "admissible": True,
                  "actual": c.actual, "predicted": c.predicted, "ratio": c.ratio})


def cmd_report_dyadic(args) -> str:
    population = _population(args)
    spec = ThresholdSpec.parse(args.threshold)
    rep = survivor_gap_report(args.x, population, spec, args.x0, args.segment_len)
    rows = [
        (r.M, r.upper, r.population, r.qualifying_frozen, r.qualifying_exact, r.comparator)
        for r in rep.rows
    ]
    agg = rep.aggregate
    rows.append(("aggregate", agg.upper, agg.population, agg.qualifying_frozen,
                 agg.qualifying_exact, agg.comparator))
    return _csv(SURVIVOR_REPORT_HEADER, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaplab", description="Prime and sieve-survivor gap statistics."
    )
    parser.add_argument("--version", action="version", version=f"gaplab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--segment-len", type=parse_int, default=DEFAULT_SEGMENT_LEN)

    def with_x(p):
        p.add_argument("--x", type=parse_int, required=True)

    def with_set(p, default="primes"):
        p.add_argument("--set", choices=["primes", "survivors"], default=default)
        p.add_argument("--z", type=parse_int)
        p.add_argument("--delta", help="sifting exponent as 1/N")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pi", parents=[common], help="count primes up to x")
    with_x(p)
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("gaps", parents=[common], help="successor-gap records")
    with_x(p)
    with_set(p)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("recipsum", parents=[common], help="reciprocal sums over short gaps")
    with_x(p)
    with_set(p)
    p.add_argument("--threshold", action="append", required=True)
    p.add_argument("--checkpoints")
    p.set_defaults(func=cmd_recipsum)

    p = sub.add_parser("cdf", parents=[common], help="gap CDF against 1 - exp(-lambda)")
    with_x(p)
    with_set(p)
    p.add_argument("--threshold", action="append", required=True)
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("gallagher", parents=[common], help="primes-in-window histogram")
    with_x(p)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--kmax", type=int, default=16)
    p.set_defaults(func=cmd_gallagher)

    p = sub.add_parser("sing", parents=[common], help="singular series of a tuple")
    p.add_argument("--tuple", required=True)
    p.add_argument("--rel-err", type=float, default=1e-9)
    p.add_argument("--truncation-prime", type=parse_int)
    p.set_defaults(func=cmd_sing)

    p = sub.add_parser("singsum", parents=[common], help="pair or triple singular-series sums")
    p.add_argument("--h", type=parse_int, required=True)
    p.add_argument("--kind", choices=["pair", "triple"], default="pair")
    p.set_defaults(func=cmd_singsum)

    p = sub.add_parser("survivors", parents=[common], help="survivor gaps and tuple counts")
    with_x(p)
    p.add_argument("--set", choices=["survivors"], default="survivors")
    p.add_argument("--z", type=parse_int)
    p.add_argument("--delta")
    p.add_argument("--count-pairs", type=int, default=0, metavar="DMAX")
    p.add_argument("--count-triples", type=int, default=0, metavar="DMAX")
    p.set_defaults(func=cmd_survivors)

    p = sub.add_parser("hl", parents=[common], help="Hardy-Littlewood tuple count")
    with_x(p)
    p.add_argument("--tuple", required=True)
    p.set_defaults(func=cmd_hl)

    p = sub.add_parser("report-dyadic", parents=[common], help="per-dyadic-interval gap report")
    with_x(p)
    with_set(p, default="survivors")
    p.add_argument("--threshold", required=True)
    p.add_argument("--x0", type=parse_int)
    p.set_defaults(func=cmd_report_dyadic)
    return parser


def _max_x() -> int:
    raw = os.environ.get("GAPLAB_MAX_X")
    return parse_int(raw) if raw else DEFAULT_MAX_X


def _manifest(args, output: bytes, wall: float) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "command": args.command,
        "parameters": params,
        "version": __version__,
        "wall_time_s": round(wall, 6),
        "output_sha256": hashlib.sha256(output).hexdigest(),
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 1:
            raise DomainError(f"--threads must be at least 1, got {args.threads}")
        x = getattr(args, "x", None)
        if x is not None and x > _max_x():
            raise DomainError(f"--x {x} exceeds GAPLAB_MAX_X={_max_x()}")
        t0 = time.perf_counter()
        text = args.func(args)
        wall = time.perf_counter() - t0
    except DomainError as exc:
        parser.exit(2, f"gaplab: error: {exc}\n")
    except GaplabError as exc:
        parser.exit(1, f"gaplab: error: {exc}\n")
    data = text.encode()
    manifest = json.dumps(_manifest(args, data, wall), sort_keys=True, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        sys.stderr.write(manifest)
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
