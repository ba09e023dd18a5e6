"""Command-line front end: build, query, verify, bench, stats.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
disagreement.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

from . import storage
from .baseline import mt_search, naive_search
from .engine import QueryStats, substructure_search, warm_up
from .errors import BadQuery, JxbwError
from .ingest import build_symbol_table, count_nodes, iter_jsonl, normalize, parse_jsonl_line, parse_query, read_jsonl
from .merge import merge_all, merge_stream
from .querygen import random_queries
from .xbw import build_xbw

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DISAGREE = 0, 1, 2, 3
ALGORITHMS = ("xbw", "mt", "naive")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_index_from_file(path, timings: dict | None = None):
    """Parse, merge (streaming), normalize and index a JSONL file."""
    timings = {} if timings is None else timings
    counters = {"lines": 0, "tree_nodes": 0}
    parse_time = 0.0

    def trees():
        nonlocal parse_time
        with open(path, encoding="utf-8") as fh:
            for no, text in iter_jsonl(fh):
                t0 = time.perf_counter()
                tree = parse_jsonl_line(text, no)
                counters["tree_nodes"] += count_nodes(tree)
                parse_time += time.perf_counter() - t0
                counters["lines"] += 1
                yield tree

    t0 = time.perf_counter()
    mt = merge_stream(trees())
    t1 = time.perf_counter()
    timings["tree_structures"] = parse_time
    timings["merging"] = (t1 - t0) - parse_time
    counters["mt_nodes"] = count_nodes(mt)
    symtab = build_symbol_table([mt])
    index = build_xbw(normalize(mt, symtab), symtab)
    t2 = time.perf_counter()
    timings["xbw"] = t2 - t1
    return index, counters


def _read_lines(path) -> dict[int, str]:
    with open(path, encoding="utf-8") as fh:
        return dict(iter_jsonl(fh))


def _load_queries(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [text for _, text in iter_jsonl(fh)]


def _parse_query_or_fail(text: str):
    try:
        return parse_query(text)
    except JxbwError as exc:
        raise BadQuery(str(exc)) from None


class _Searchers:
    """Lazily prepared search functions for each algorithm."""

    def __init__(self, index, jsonl):
        self.index = index
        self.jsonl = jsonl
        self._trees = None
        self._mt = None

    def trees(self):
        if self._trees is None:
            if self.jsonl is None:
                raise UsageError("MISSING_JSONL_FOR_BASELINE: --jsonl is required for mt/naive")
            self._trees = read_jsonl(self.jsonl)
        return self._trees

    def mt(self):
        if self._mt is None:
            self._mt = merge_all(self.trees())
        return self._mt

    def prepare(self, algorithm: str) -> None:
        if algorithm == "mt":
            self.mt()
        elif algorithm == "naive":
            self.trees()

    def run(self, algorithm: str, query, stats: QueryStats | None = None) -> list[int]:
        if algorithm == "xbw":
            return substructure_search(self.index, query, stats)
        if algorithm == "mt":
            return mt_search(self.mt(), query)
        if algorithm == "naive":
            return naive_search(self.trees(), query)
        raise UsageError(f"unknown algorithm {algorithm}")


def cmd_build(args) -> int:
    timings: dict = {}
    t0 = time.perf_counter()
    index, counters = build_index_from_file(args.input, timings)
    t1 = time.perf_counter()
    storage.save(index, args.output)
    timings["save"] = time.perf_counter() - t1
    timings["total"] = time.perf_counter() - t0
    print(f"lines (N): {counters['lines']}")
    print(f"input tree nodes (sum |Ti|): {counters['tree_nodes']}")
    print(f"merged tree nodes (|MT|): {counters['mt_nodes']}")
    print(f"labels (sigma): {index.sigma}")
    print(f"index positions (n): {index.n}")
    print(f"time tree structures: {timings['tree_structures']:.3f} s")
    print(f"time merging tree: {timings['merging']:.3f} s")
    print(f"time xbw construction: {timings['xbw']:.3f} s")
    print(f"time total: {timings['total']:.3f} s")
    return EXIT_OK


def cmd_query(args) -> int:
    query = _parse_query_or_fail(args.query)
    if args.format == "lines" and args.jsonl is None:
        raise UsageError("MISSING_JSONL_FOR_BASELINE: --format lines needs --jsonl")
    index = storage.load(args.index)
    searchers = _Searchers(index, args.jsonl)
    searchers.prepare(args.algorithm)
    if args.algorithm == "xbw":
        warm_up()
    t0 = time.perf_counter()
    ids = searchers.run(args.algorithm, query)
    elapsed = (time.perf_counter() - t0) * 1e6
    if args.format == "ids":
        for i in ids:
            print(i)
    elif args.format == "count":
        print(len(ids))
    elif args.format == "lines":
        lines = _read_lines(args.jsonl)
        for i in ids:
            print(lines[i])
    else:
        out = {"query": json.loads(args.query), "algorithm": args.algorithm,
               "count": len(ids), "ids": ids, "elapsed_micros": round(elapsed, 3)}
        print(json.dumps(out, ensure_ascii=False))
    return EXIT_OK


def _queries_from_args(args) -> list[str]:
    if args.queries is not None:
        return _load_queries(args.queries)
    trees = read_jsonl(args.jsonl)
    return random_queries(trees, args.random, seed=args.seed)


def cmd_verify(args) -> int:
    if (args.queries is None) == (args.random is None):
        raise UsageError("give exactly one of --queries or --random")
    index = storage.load(args.index)
    searchers = _Searchers(index, args.jsonl)
    queries = _queries_from_args(args)
    if not queries:
        print("warning: no queries to verify", file=sys.stderr)
        print("PASS 0/0")
        return EXIT_OK
    pairs = [("xbw", "mt"), ("xbw", "naive"), ("mt", "naive")]
    agree = {p: 0 for p in pairs}
    bad = []
    for text in queries:
        q = _parse_query_or_fail(text)
        res = {a: searchers.run(a, q) for a in ALGORITHMS}
        for a, b in pairs:
            agree[(a, b)] += res[a] == res[b]
        if not res["xbw"] == res["mt"] == res["naive"]:
            bad.append((text, res))
    total = len(queries)
    for (a, b), k in agree.items():
        print(f"{a}={b}: {k}/{total}")
    for text, res in bad:
        print(f"DISAGREEMENT {text} " + " ".join(f"{a}={res[a]}" for a in ALGORITHMS))
    if bad:
        print(f"FAIL {total - len(bad)}/{total}")
        return EXIT_DISAGREE
    print(f"PASS {total}/{total}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise UsageError("--repeat must be at least 1")
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a}")
    index = storage.load(args.index)
    searchers = _Searchers(index, args.jsonl)
    queries = [_parse_query_or_fail(t) for t in _load_queries(args.queries)]
    report: dict = {"queries": len(queries), "repeat": args.repeat, "algorithms": {}}
    stats_rows = []
    hits = []
    for a in algorithms:
        searchers.prepare(a)
        if a == "xbw":
            warm_up()
        per_query = []
        for q in queries:
            samples = []
            for _ in range(args.repeat):
                st = QueryStats()
                t0 = time.perf_counter()
                ids = searchers.run(a, q, st)
                samples.append(time.perf_counter() - t0)
            per_query.append(statistics.fmean(samples) * 1e3)
            if a == algorithms[0]:
                hits.append(len(ids))
            if a == "xbw":
                stats_rows.append(st)
        report["algorithms"][a] = {
            "mean_ms": statistics.fmean(per_query) if per_query else 0.0,
            "std_ms": statistics.pstdev(per_query) if per_query else 0.0,
            "median_ms": statistics.median(per_query) if per_query else 0.0,
        }
    report["avg_hits"] = statistics.fmean(hits) if hits else 0.0
    if "xbw" in report["algorithms"]:
        base = report["algorithms"]["xbw"]["mean_ms"]
        report["speedup"] = {a: (v["mean_ms"] / base if base else None)
                             for a, v in report["algorithms"].items() if a != "xbw"}
    if stats_rows:
        report["query_stats"] = {
            k: statistics.fmean(getattr(s, k) for s in stats_rows)
            for k in ("p", "r", "c", "d_avg", "b_est")
        }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_stats(args) -> int:
    index, sizes, total = storage.read_with_layout(args.index)
    succinct_bytes = sum(sizes[k] for k in ("last", "leaf", "diff", "label", "pf", "F"))
    label_text = sum(len(lab.text.encode("utf-8", "surrogatepass")) for lab in index.symtab)
    report = {
        "n": index.n,
        "sigma": index.sigma,
        "leaf_count": index.leaf_count,
        "id_entries": int(index.id_values.size),
        "file_bytes": total,
        "section_bytes": sizes,
        "symbol_table_bytes": sizes["symtab"],
        "label_text_bytes": label_text,
        "succinct_bytes": succinct_bytes,
        "id_bytes": sizes["ids"],
        "directory_overhead": {
            "last": index.last.overhead,
            "leaf": index.leaf.overhead,
            "diff": index.diff.overhead,
            "label": index.label.overhead,
            "pf": index.pf.overhead,
        },
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jxbw", description="Substructure search over JSON lines.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build an index from a JSONL file")
    b.add_argument("input")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run one query")
    q.add_argument("index")
    q.add_argument("-q", "--query", required=True, help="query as JSON text")
    q.add_argument("--jsonl", help="original JSONL (needed for mt, naive and --format lines)")
    q.add_argument("--algorithm", choices=ALGORITHMS, default="xbw")
    q.add_argument("--format", choices=("ids", "count", "lines", "json"), default="ids")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="check that all algorithms agree")
    v.add_argument("index")
    v.add_argument("--jsonl", required=True)
    v.add_argument("--queries")
    v.add_argument("--random", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("bench", help="time the algorithms on a query file")
    m.add_argument("index")
    m.add_argument("--jsonl", required=True)
    m.add_argument("--queries", required=True)
    m.add_argument("--repeat", type=int, default=3)
    m.add_argument("--algorithms", default="xbw,mt,naive")
    m.set_defaults(func=cmd_bench)

    s = sub.add_parser("stats", help="report index sizes")
    s.add_argument("index")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"jxbw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except JxbwError as exc:
        print(f"jxbw: error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"jxbw: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
