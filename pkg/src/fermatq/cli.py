"""``fq``: command-line front end.

Every command writes its result (CSV or JSON) to stdout or ``--out``; timing
goes to stderr so result files are byte-identical across runs and thread
counts.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import build_table, primes_up_to, validate_prime
from .discrepancy import (
    box_count_discrepancy,
    complete_exp_sum,
    erdos_turan_bound,
    fermat_row_sequence,
    heath_brown_sum,
    koksma_szusz_bound,
    pattern_exp_sum,
    star_discrepancy,
    uniform_discrepancy,
)
from .lines import LineSpec, line_value, mean_line_distance
from .parallel import default_workers
from .patterns import (
    count_all_permutations,
    count_pattern,
    emit_point_sets,
    iter_spanned_residues,
    make_pattern,
    parse_pattern,
    parse_sigma,
)
from .repro import TABLE_IDS, load_fixtures, run_repro

MATRIX_DUMP_LIMIT = 10**4
ZERO_SCAN_LIMIT = 10**6


class JobError(Exception):
    """Invalid job parameters; reported without a traceback."""


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _coord(k: int, p: int) -> str:
    return repr(k / p)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(command: str, job: dict, results) -> dict:
    return {"command": command, "version": __version__, "job": job, "results": results}


def _prime(p: int):
    try:
        return validate_prime(p)
    except (ValueError, TypeError) as exc:
        raise JobError(str(exc)) from exc


# -- commands ---------------------------------------------------------------


def cmd_matrix(args) -> int:
    p = _prime(args.p)
    if p > MATRIX_DUMP_LIMIT and not args.force:
        raise JobError(f"p = {p} exceeds the dump limit {MATRIX_DUMP_LIMIT}; pass --force")
    t = build_table(p)
    if args.format == "json":
        rows = [t.row(a) for a in range(p)]
        _emit(_dumps(_report("matrix", {"p": int(p)}, {"inverses": t.inverses, "rows": rows})), args.out)
        return 0
    header = ["row"] + [str(b) for b in range(1, p)]
    rows = [["inv"] + t.inverses] + [[a] + t.row(a) for a in range(p)]
    _emit(_csv_text(header, rows), args.out)
    return 0


def cmd_repro(args) -> int:
    tables = TABLE_IDS if args.table == "all" else (args.table,)
    reports = []
    ok = True
    for name in tables:
        t0 = time.perf_counter()
        rep = run_repro(name, workers=args.threads)
        rep.wall_time = time.perf_counter() - t0
        ok &= rep.ok
        reports.append(rep.as_dict())
        print(f"{name}: {'PASS' if rep.ok else 'FAIL'} ({len(rep.cells) - len(rep.mismatches)}/{len(rep.cells)} cells)"
              f" in {rep.wall_time:.3f} s", file=sys.stderr)
        for c in rep.mismatches:
            print(f"  {c.name}: expected {c.expected!r}, got {c.actual!r}", file=sys.stderr)
    _emit(_dumps(_report("repro", {"table": args.table}, reports)), args.out)
    return 0 if ok else 1


def cmd_pattern_count(args) -> int:
    p = _prime(args.p)
    pattern = parse_pattern(args.vectors)
    sigma = parse_sigma(args.sigma)
    r = count_pattern(build_table(p), pattern, sigma, workers=args.threads)
    res = r.as_dict()
    res["distinct_t"] = pattern.distinct_t
    if args.format == "csv":
        _emit(_csv_text(list(res), [[_cell(v) for v in res.values()]]), args.out)
    else:
        _emit(_dumps(_report("pattern-count", {"p": int(p), "vectors": str(pattern), "sigma": list(sigma)}, res)), args.out)
    return 0


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ";".join(",".join(map(str, x)) if isinstance(x, list) else str(x) for x in v)
    return v


def cmd_perm_sweep(args) -> int:
    p = _prime(args.p)
    pattern = parse_pattern(args.vectors)
    reports = count_all_permutations(build_table(p), pattern, workers=args.threads)
    first = next(iter(reports.values()))
    if args.format == "csv":
        rows = [[" ".join(map(str, s)), r.count, repr(r.main_term), repr(r.ratio)] for s, r in reports.items()]
        rows.append(["ties", first.tie_count, "", ""])
        _emit(_csv_text(["sigma", "count", "main_term", "ratio"], rows), args.out)
    else:
        res = {
            "region_card": first.region_card,
            "tie_count": first.tie_count,
            "counts": [{"sigma": list(s), "count": r.count, "ratio": r.ratio} for s, r in reports.items()],
        }
        _emit(_dumps(_report("perm-sweep", {"p": int(p), "vectors": str(pattern)}, res)), args.out)
    return 0


def cmd_line_mean(args) -> int:
    p = _prime(args.p)
    line = LineSpec(args.c, args.d)
    r = mean_line_distance(build_table(p), line)
    res = r.as_dict()
    res["slow_slope_regime"] = line.in_slow_slope_regime(p)
    res["positive_slope"] = line.positive_slope
    _emit(_dumps(_report("line-mean", {"p": int(p), "C": args.c, "D": args.d}, res)), args.out)
    return 0


def cmd_expsum(args) -> int:
    p = _prime(args.p)
    t = build_table(p)
    job = {"p": int(p)}
    if args.vectors:
        pattern = parse_pattern(args.vectors)
        h = _int_list(args.h)
        if len(h) != pattern.N:
            raise JobError(f"h has {len(h)} components, pattern has {pattern.N}")
        s0 = complete_exp_sum(t, pattern, h, workers=args.threads)
        s = pattern_exp_sum(t, pattern, h, workers=args.threads)
        job.update(vectors=str(pattern), h=h)
        res = {"complete": s0.as_dict(), "restricted": s.as_dict(),
               "difference": abs(s.value - s0.value), "difference_cap": 4 * pattern.M * int(p)}
    else:
        if args.m % p == 0:
            raise JobError("m must be coprime to p")
        y = args.y if args.y is not None else p - 1
        r = heath_brown_sum(t, args.m, args.x, y)
        job.update(m=args.m, X=args.x, Y=y)
        res = {"heath_brown": r.as_dict()}
    _emit(_dumps(_report("expsum", job, res)), args.out)
    return 0


def cmd_discrepancy(args) -> int:
    p = _prime(args.p)
    t = build_table(p)
    seq = fermat_row_sequence(t)
    job = {"p": int(p), "K": args.k}
    d = uniform_discrepancy(seq)
    et = erdos_turan_bound(seq, args.k)
    res = {
        "n": int(seq.size),
        "uniform_discrepancy": d,
        "star_discrepancy": star_discrepancy(seq),
        "erdos_turan_bound": et,
        "scaled_discrepancy": d * seq.size,
        "inequality_holds": d * seq.size <= et,
    }
    if args.vectors:
        pattern = parse_pattern(args.vectors)
        pts = np.concatenate(list(iter_spanned_residues(t, pattern)))
        job.update(vectors=str(pattern), H=args.H, L=args.L)
        box = box_count_discrepancy(pts, args.L, modulus=p)
        ks = koksma_szusz_bound(pts, args.H, modulus=p)
        res["spanned"] = {"points": int(len(pts)), "box_discrepancy": box, "koksma_szusz": ks,
                          "box_over_bound": box / ks}
    _emit(_dumps(_report("discrepancy", job, res)), args.out)
    return 0


def figure_ids() -> list[str]:
    fx = load_fixtures()
    ids = ["fig1"]
    for name in ("A11", "A12", "A2"):
        ids += [f"{fx[name]['figure']}-{i}" for i in range(1, len(fx[name]["rows"]) + 1)]
    return ids


def _figure_row(fig_id: str):
    fx = load_fixtures()
    by_fig = {fx[n]["figure"]: n for n in ("A11", "A12", "A2")}
    stem, _, idx = fig_id.partition("-")
    if stem not in by_fig or not idx.isdigit():
        raise JobError(f"unknown figure id {fig_id!r}; choose from {', '.join(figure_ids())}")
    table = fx[by_fig[stem]]
    i = int(idx)
    if not 1 <= i <= len(table["rows"]):
        raise JobError(f"unknown figure id {fig_id!r}")
    return stem, table["p"], table["rows"][i - 1]


def cmd_figures(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.id == "fig1":
        if not args.line:
            raise JobError("fig1 needs at least one --line C,D (no default lines are defined)")
        rows = []
        for k, spec in enumerate(args.line, start=1):
            c, d = (float(x) for x in spec.split(","))
            line = LineSpec(c, d)
            for i in range(args.samples):
                x = i / args.samples
                rows.append([k, repr(x), repr(line_value(line, x))])
        (out / "fig1_lines.csv").write_text(_csv_text(["line", "x", "y"], rows), encoding="utf-8")
        written = ["fig1_lines.csv"]
        if args.p:
            p = _prime(args.p)
            t = build_table(p)
            pts = [[_coord(b, p), _coord(q, p)] for b, q in enumerate(t.base_row, start=1)]
            (out / "fig1_point.csv").write_text(_csv_text(["x", "y"], pts), encoding="utf-8")
            written.append("fig1_point.csv")
    else:
        stem, p, row = _figure_row(args.id)
        pattern = make_pattern(row["vectors"])
        sets = emit_point_sets(build_table(p), pattern, row["sigma"], workers=args.threads)
        name = args.id.replace("-", "_")
        d_rows = sets.origins.tolist()
        (out / f"{name}_D.csv").write_text(_csv_text(["a", "b"], d_rows), encoding="utf-8")
        header = [f"x{j}" for j in range(1, pattern.N + 1)]
        x_rows = [[_coord(k, p) for k in r] for r in sets.residues.tolist()]
        (out / f"{name}_X.csv").write_text(_csv_text(header, x_rows), encoding="utf-8")
        written = [f"{name}_D.csv", f"{name}_X.csv"]
        print(f"{args.id}: {len(sets)} points", file=sys.stderr)
    for w in written:
        print(out / w)
    return 0


def wieferich_zeros(pmin: int, pmax: int, bmax: int) -> list[dict]:
    primes = [q for q in primes_up_to(pmax) if q >= max(3, pmin)]
    if len(primes) > ZERO_SCAN_LIMIT:
        raise JobError(f"{len(primes)} primes exceeds the scan limit {ZERO_SCAN_LIMIT}")
    out = []
    for p in primes:
        p2 = p * p
        zeros = [b for b in range(2, min(bmax, p2 - 1) + 1) if b % p and pow(b, p - 1, p2) == 1]
        if zeros:
            out.append({"p": p, "zeros": zeros, "wieferich": 2 in zeros})
    return out


def cmd_zeros(args) -> int:
    res = wieferich_zeros(args.pmin, args.pmax, args.bmax)
    job = {"pmin": args.pmin, "pmax": args.pmax, "bmax": args.bmax}
    if args.format == "csv":
        rows = [[r["p"], b, int(r["wieferich"])] for r in res for b in r["zeros"]]
        _emit(_csv_text(["p", "b", "wieferich"], rows), args.out)
    else:
        _emit(_dumps(_report("zeros", job, res)), args.out)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $FQ_THREADS or all cores)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="fq", description="Fermat quotient matrix experiments.")
    parser.add_argument("--version", action="version", version=f"fq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("matrix", parents=[common], help="dump FQM(p)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--force", action="store_true", help=f"allow p > {MATRIX_DUMP_LIMIT}")
    s.set_defaults(func=cmd_matrix)

    s = sub.add_parser("repro", parents=[common], help="reproduce a reference table")
    s.add_argument("--table", choices=TABLE_IDS + ("all",), required=True)
    s.set_defaults(func=cmd_repro)

    s = sub.add_parser("pattern-count", parents=[common], help="count one order pattern")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--sigma", required=True, help="e.g. 2,3,1")
    s.add_argument("--vectors", required=True, help='e.g. "10,6;1,6;2,6"')
    s.add_argument("--format", choices=("csv", "json"), default="json")
    s.set_defaults(func=cmd_pattern_count)

    s = sub.add_parser("perm-sweep", parents=[common], help="counts for every permutation")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--vectors", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="json")
    s.set_defaults(func=cmd_perm_sweep)

    s = sub.add_parser("line-mean", parents=[common], help="mean distance to a line mod 1")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--d", type=float, default=0.0)
    s.set_defaults(func=cmd_line_mean)

    s = sub.add_parser("expsum", parents=[common], help="exponential sums of Fermat quotients")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--vectors", default=None, help="pattern for the complete/restricted sums")
    s.add_argument("--h", default=None, help="frequency vector, e.g. 1,0,2")
    s.add_argument("--m", type=int, default=1, help="multiplier for the interval sum")
    s.add_argument("--x", type=int, default=0)
    s.add_argument("--y", type=int, default=None)
    s.set_defaults(func=cmd_expsum)

    s = sub.add_parser("discrepancy", parents=[common], help="discrepancy of the first row")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int, default=10, help="truncation for the 1-D bound")
    s.add_argument("--vectors", default=None, help="also measure the spanned point set")
    s.add_argument("--H", type=int, default=10)
    s.add_argument("--L", type=int, default=6)
    s.set_defaults(func=cmd_discrepancy)

    s = sub.add_parser("figures", parents=[common], help="write plot-ready CSV files")
    s.add_argument("--id", required=True, help="fig1, fig2-1..3, fig3-1..3, fig4-1..6")
    s.add_argument("--line", action="append", default=[], help="C,D for fig1 (repeatable)")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--p", type=int, default=None, help="fig1: also write the first row of FQM(p)")
    s.set_defaults(func=cmd_figures)

    s = sub.add_parser("zeros", parents=[common], help="scan for vanishing Fermat quotients")
    s.add_argument("--pmin", type=int, default=3)
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--bmax", type=int, default=100)
    s.add_argument("--format", choices=("csv", "json"), default="json")
    s.set_defaults(func=cmd_zeros)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = default_workers()
    elif args.threads < 1:
        parser.error("--threads must be positive")
    if args.command == "expsum" and args.vectors and args.h is None:
        parser.error("--vectors needs --h")
    try:
        return args.func(args)
    except (JobError, ValueError) as exc:
        print(f"fq {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
