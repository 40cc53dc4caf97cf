"""``ctc`` command line: index, query, gen-queries, eval.

Exit codes: 0 success, 1 configuration error, 2 data error.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import json
import os
import sys
import time

from .errors import CTCError, EdgeListParseError, IndexFormatError
from .evaluate import WorkloadParams, gen_queries, load_ground_truth, read_workload, summarize, write_workload
from .graph import read_edge_list
from .oracle import MAX_DECOMPOSE_NODES
from .pipeline import ALGORITHMS, make_spec, run_query
from .search import DEFAULT_BUDGET_SECS, DEFAULT_ETA, DEFAULT_GAMMA
from .truss import build_index, dump_index, index_matches, load_index


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _existing(path, what):
    if path is None:
        raise ConfigError(f"--{what} is required")
    if not os.path.isfile(path):
        raise ConfigError(f"{what} file not found: {path}")
    return path


def _load_graph(path):
    try:
        return read_edge_list(_existing(path, "graph"))
    except (EdgeListParseError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def _load_graph_and_index(args):
    g = _load_graph(args.graph)
    if args.index is None:
        return g, build_index(g)
    with open(_existing(args.index, "index"), "rb") as fh:
        try:
            idx = load_index(fh)
        except IndexFormatError as exc:
            raise DataError(f"{args.index}: {exc}") from None
    if not index_matches(idx, g):
        raise DataError(f"{args.index} was not built from {args.graph}")
    return g, idx


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="\n") if path else sys.stdout


def cmd_index(args):
    g = _load_graph(args.graph)
    if not args.out:
        raise ConfigError("--out is required")
    started = time.perf_counter()
    idx = build_index(g)
    data = dump_index(idx)
    secs = time.perf_counter() - started
    with open(args.out, "wb") as fh:
        fh.write(data)
    with open(args.out + ".ids", "w", encoding="utf-8") as fh:
        g.write_id_map(fh)
    print(f"n={g.n} m={g.m} tau_bar={idx.tau_bar_empty} build_secs={secs:.3f} bytes={len(data)}")


def _queries(args):
    if (args.query is None) == (args.queries is None):
        raise ConfigError("give exactly one of --query or --queries")
    if args.query is not None:
        try:
            return [[int(x) for x in args.query.split()]]
        except ValueError:
            raise ConfigError(f"--query must be whitespace-separated integers: {args.query!r}") from None
    with open(_existing(args.queries, "queries"), encoding="utf-8") as fh:
        try:
            return read_workload(fh)[0]
        except ValueError as exc:
            raise DataError(f"{args.queries}: {exc}") from None


def _threads():
    raw = os.environ.get("CTC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CTC_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("CTC_THREADS must be >= 1")
    return n


def cmd_query(args):
    if args.eta < 1 or args.gamma < 0 or args.budget_secs <= 0:
        raise ConfigError("--eta must be >= 1, --gamma >= 0 and --budget-secs > 0")
    queries = _queries(args)
    workers = _threads()
    g, idx = _load_graph_and_index(args)
    if args.algo == "oracle" and g.n > MAX_DECOMPOSE_NODES:
        raise ConfigError(f"oracle refuses graphs above {MAX_DECOMPOSE_NODES} nodes (got {g.n})")
    specs = [make_spec(q, args.eta, args.gamma, args.budget_secs, args.seed) for q in queries]

    def one(spec):
        return run_query(g, idx, spec, args.algo, timing=not args.omit_timing)

    out = _open_out(args.out)
    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map yields in submission order, whatever order the workers finish in
            for rec in pool.map(one, specs):
                out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_gen_queries(args):
    try:
        params = WorkloadParams(size=args.size, degree_rank=args.degree_rank,
                                inter_distance=args.distance, count=args.count,
                                seed=args.seed, unique_truth=args.unique)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g = _load_graph(args.graph)
    truth = None
    if args.truth:
        with open(_existing(args.truth, "truth"), encoding="utf-8") as fh:
            truth = load_ground_truth(fh, known=g.has_external)
    elif args.unique:
        raise ConfigError("--unique needs --truth")
    queries = gen_queries(g, params, truth)
    out = _open_out(args.out)
    try:
        write_workload(out, queries, params)
    finally:
        if out is not sys.stdout:
            out.close()


def _read_results(path):
    records = []
    with open(_existing(path, "results"), encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not records:
        raise DataError(f"{path}: no results")
    return records


def cmd_eval(args):
    records = _read_results(args.results)
    truth = None
    if args.truth:
        known = None
        if args.graph:
            known = _load_graph(args.graph).has_external
        with open(_existing(args.truth, "truth"), encoding="utf-8") as fh:
            truth = load_ground_truth(fh, known=known)
        if truth.dropped:
            print(f"warning: dropped {truth.dropped} unresolvable ground-truth ids", file=sys.stderr)
    s = summarize(records, truth)
    summary = {
        "count": s.count, "ok": s.ok, "timeouts": s.partial, "no_community": s.no_community,
        "mean_diameter": s.mean_diameter, "mean_density": s.mean_density,
        "mean_size_ratio": s.mean_size_ratio,
    }
    if truth is not None:
        summary.update(mean_precision=s.mean_precision, mean_recall=s.mean_recall,
                       mean_f1=s.mean_f1, unmatched=s.unmatched)
    out = _open_out(args.out)
    try:
        out.write(json.dumps(summary, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_oracle_fixture(args):
    """Oracle answer for one query, printed as JSON; used to build test fixtures."""
    args.algo = "oracle"
    args.queries = None
    args.omit_timing = True
    cmd_query(args)


def build_parser():
    p = _Parser(prog="ctc", description="Closest truss community search.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser,
                           metavar="{index,query,gen-queries,eval}")

    def graph_args(sp, index=True):
        sp.add_argument("--graph", required=True, help="edge list file")
        if index:
            sp.add_argument("--index", help="truss index file (built in memory if omitted)")

    def search_args(sp):
        sp.add_argument("--eta", type=int, default=DEFAULT_ETA)
        sp.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS)
        sp.add_argument("--out")

    sp = sub.add_parser("index", help="build and save a truss index")
    graph_args(sp, index=False)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("query", help="run community queries")
    graph_args(sp)
    sp.add_argument("--algo", choices=ALGORITHMS, default="basic")
    sp.add_argument("--query", help='query node ids, e.g. "1 2 3"')
    sp.add_argument("--queries", help="workload file, one query per line")
    sp.add_argument("--omit-timing", action="store_true",
                    help="report elapsed_ms as 0 so output is byte-reproducible")
    search_args(sp)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("gen-queries", help="generate a seeded query workload")
    graph_args(sp, index=False)
    sp.add_argument("--size", type=int, default=3)
    sp.add_argument("--degree-rank", type=float, default=0.8)
    sp.add_argument("--distance", type=int, default=2)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--truth")
    sp.add_argument("--unique", action="store_true",
                    help="keep only queries inside exactly one ground-truth community")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen_queries)

    sp = sub.add_parser("eval", help="summarize a result stream")
    sp.add_argument("--results", required=True)
    sp.add_argument("--truth")
    sp.add_argument("--graph")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("oracle-fixture")  # no help= keeps it out of the listing
    graph_args(sp)
    sp.add_argument("--query", required=True)
    search_args(sp)
    sp.set_defaults(func=cmd_oracle_fixture)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"ctc: {exc}", file=sys.stderr)
        return 1
    except (DataError, CTCError, ValueError, OSError) as exc:
        print(f"ctc: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
