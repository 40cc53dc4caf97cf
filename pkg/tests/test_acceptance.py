"""Acceptance criteria 1-11. Each test records one PASS/FAIL line, shown in
the "acceptance criteria" section at the end of the pytest run."""
import io
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from closest_truss.evaluate import f1
from closest_truss.graph import Graph, connected_component, diameter, is_connected, read_edge_list
from closest_truss.local import lctc_search
from closest_truss.oracle import (check_community, oracle_ctc, oracle_max_k, oracle_min_query_distance,
                                  oracle_query_independent, oracle_truss_decompose)
from closest_truss.pipeline import make_spec, run_query
from closest_truss.search import basic_search, bulk_delete_search, find_g0
from closest_truss.truss import build_index, dump_index, load_index, truss_decompose

from conftest import FIXTURES, fixture_graph, planted_cliques, random_graph, report


def random_query(g, rng, size):
    live = [v for v in g.nodes() if g.degree(v) > 0]
    if not live:
        return None
    comp = sorted(connected_component(g, live[int(rng.integers(len(live)))]))
    return sorted({comp[int(rng.integers(len(comp)))] for _ in range(size)})


def instances(count, n_range, probs, seed, q_sizes=(1, 2, 3)):
    """Seeded (graph, Q) pairs; graphs without edges are redrawn."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        g = random_graph(n, float(rng.choice(probs)), int(rng.integers(2**32)))
        Q = random_query(g, rng, int(rng.choice(q_sizes)))
        if Q is not None:
            out.append((g, Q))
    return out


class Emitted:
    """Every community produced by any search across the suites."""

    def __init__(self):
        self.items = []

    def add(self, suite, g, Q, res):
        self.items.append((suite, g, Q, res))


@pytest.fixture(scope="module")
def emitted():
    return Emitted()


@pytest.fixture(scope="module")
def suite_maxk(emitted):
    started = time.perf_counter()
    rows = []
    for g, Q in instances(300, (5, 30), (0.15, 0.3, 0.5), seed=2):
        idx = build_index(g)
        k, _ = find_g0(g, idx, Q)
        rows.append((k, oracle_max_k(g, Q)))
        for search in (basic_search, bulk_delete_search, lctc_search):
            emitted.add("max-k", g, Q, search(g, idx, Q))
    return rows, time.perf_counter() - started


@pytest.fixture(scope="module")
def suite_approx(emitted):
    started = time.perf_counter()
    rows = []
    for g, Q in instances(200, (5, 14), (0.2, 0.35, 0.5, 0.7), seed=3):
        idx = build_index(g)
        answer = oracle_ctc(g, Q)
        basic = basic_search(g, idx, Q)
        bd = bulk_delete_search(g, idx, Q)
        lctc = lctc_search(g, idx, Q)
        for res in (basic, bd, lctc):
            emitted.add("approx", g, Q, res)
        rows.append(dict(g=g, Q=Q, opt=answer.diam_opt, min_qd=oracle_min_query_distance(g, Q, answer.k_opt),
                         basic=basic, bd=bd, lctc=lctc))
    return rows, time.perf_counter() - started


@pytest.fixture(scope="module")
def planted(emitted):
    g, blocks = planted_cliques([8, 8, 8], 20, seed=7)
    idx = build_index(g)
    rng = np.random.default_rng(7)
    rows = []
    for _ in range(50):
        block = blocks[int(rng.integers(3))]
        Q = sorted(int(x) for x in rng.choice(block, size=2, replace=False))
        res = lctc_search(g, idx, Q)
        emitted.add("planted", g, Q, res)
        rows.append((res, block))
    return rows


@pytest.fixture(scope="module")
def fixture_runs(emitted):
    """Persistence problems on every fixture; also feeds the emitted pool."""
    problems = []
    for name in sorted(FIXTURES):
        g = fixture_graph(name)
        idx = build_index(g)
        data = dump_index(idx)
        loaded = load_index(io.BytesIO(data))
        if dump_index(loaded) != data:
            problems.append(f"{name}: round trip differs")
        for q in g.nodes():
            if g.degree(q) == 0:
                continue
            for algo in ("basic", "bd", "lctc", "oracle"):
                spec = make_spec([q], 1000, 3, 3600, 0)
                if run_query(g, idx, spec, algo, timing=False) != run_query(g, loaded, spec, algo, timing=False):
                    problems.append(f"{name} q={q} {algo}: outputs differ")
            for search in (basic_search, bulk_delete_search, lctc_search):
                emitted.add("fixtures", g, [q], search(g, loaded, [q]))
    return problems


def test_01_decomposition_matches_oracle():
    rng = np.random.default_rng(1)
    started = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(5, 61))
        g = random_graph(n, float(rng.choice([0.1, 0.3, 0.6])), int(rng.integers(2**32)))
        mismatches += truss_decompose(g) != oracle_truss_decompose(g)
    secs = time.perf_counter() - started
    ok = mismatches == 0 and secs < 120
    assert report(1, ok, f"truss_decompose == oracle on 500 graphs, {mismatches} mismatches, {secs:.1f}s (limit 120s)")


def test_02_max_k_matches_oracle(suite_maxk):
    rows, secs = suite_maxk
    bad = sum(a != b for a, b in rows)
    ok = bad == 0 and secs < 120
    assert report(2, ok, f"find_g0 k == oracle_max_k on {len(rows)} instances, {bad} mismatches, {secs:.1f}s (limit 120s)")


def test_03_basic_two_approximation(suite_approx):
    rows, secs = suite_approx
    diam_bad = sum(r["basic"].diameter > 2 * r["opt"] for r in rows)
    qd_bad = sum(r["basic"].query_distance != r["min_qd"] for r in rows)
    ok = diam_bad == qd_bad == 0 and secs < 600
    assert report(3, ok, f"basic diam <= 2*opt: {diam_bad} violations; query distance == oracle min: "
                         f"{qd_bad} violations; {len(rows)} instances, {secs:.1f}s (limit 600s)")


def test_04_bulk_delete_bound(suite_approx):
    rows, _ = suite_approx
    bad = sum(r["bd"].diameter > 2 * r["opt"] + 2 for r in rows)
    assert report(4, bad == 0, f"bd diam <= 2*opt+2: {bad} violations on {len(rows)} instances")


def _structural_problems(g, Q, res):
    # results carry external ids; lctc's compact region copy keeps g's labels
    nodes = [g.internal(x) for x in res.nodes]
    edges = [(g.internal(a), g.internal(b)) for a, b in res.edges]
    problems = check_community(g, nodes, edges, res.k, Q)
    n = len(nodes)
    if not res.query_distance <= res.diameter <= 2 * res.query_distance:
        problems.append(f"dist {res.query_distance} / diam {res.diameter} sandwich broken")
    if res.diameter > (2 * n - 2) // res.k:
        problems.append(f"diam {res.diameter} > floor((2n-2)/k) with n={n}, k={res.k}")
    return problems


def test_05_structural_invariants(emitted, suite_maxk, suite_approx, planted, fixture_runs):
    bad = []
    for suite, g, Q, res in emitted.items:
        for p in _structural_problems(g, Q, res):
            bad.append((suite, res.algorithm, p))
    assert report(5, not bad, f"{len(emitted.items)} emitted communities checked, {len(bad)} violations"
                             + (f" (first: {bad[0]})" if bad else ""))


def _union_status(g, h, other):
    nodes = set(h.nodes) | set(other.nodes)
    edges = set(h.edges) | set(other.edges)
    if nodes == set(h.nodes) and edges == set(h.edges):
        return "equal"
    union = Graph(g.n, edges)
    sub, _ = union.subgraph(union.edge_keys)
    if not is_connected(sub):
        return "disconnected"
    return "larger" if diameter(sub) > h.diameter else "violation"


def test_06_free_rider():
    started = time.perf_counter()
    checked = violations = 0
    for g, Q in instances(100, (4, 12), (0.3, 0.5, 0.7), seed=6):
        h = oracle_ctc(g, Q, exhaustive=True).maximal_optimal()
        _, independents = oracle_query_independent(g)
        for other in independents:
            checked += 1
            violations += _union_status(g, h, other) == "violation"
    secs = time.perf_counter() - started
    assert report(6, violations == 0, f"H ∪ H* is H, disconnected or wider: {violations} violations "
                                      f"over {checked} pairs on 100 instances, {secs:.1f}s")


def test_07_planted_recovery(planted):
    scores = [f1(res.nodes, block)[2] for res, block in planted]
    mean = sum(scores) / len(scores)
    ks = {res.k for res, _ in planted}
    ok = mean == 1.0 and ks == {8}
    assert report(7, ok, f"lctc on 3xK8 + 20 bridges: mean F1 {mean} over {len(scores)} queries, k values {sorted(ks)}")


def test_08_bulk_delete_iterations(suite_approx):
    rows, _ = suite_approx
    bad = [r for r in rows if r["bd"].iterations > math.ceil(r["bd"].g0_nodes / r["bd"].k) + 1]
    assert report(8, not bad, f"bd iterations <= ceil(|V(G0)|/k)+1: {len(bad)} violations on {len(rows)} instances")


def test_09_index_persistence(fixture_runs):
    problems = fixture_runs
    assert report(9, not problems, f"{len(FIXTURES)} fixtures: byte-identical round trip and identical "
                                   f"query output, {len(problems)} problems")


DBLP = os.environ.get("CTC_DBLP_GRAPH")


@pytest.mark.skipif(not DBLP or not os.path.isfile(DBLP), reason="set CTC_DBLP_GRAPH to the com-DBLP edge list")
def test_10_dblp_index():
    started = time.perf_counter()
    g = read_edge_list(DBLP)
    idx = build_index(g)
    data = dump_index(idx)
    secs = time.perf_counter() - started
    ratio = len(data) / os.path.getsize(DBLP)
    ok = secs < 120 and 1.2 <= ratio <= 2.5 and idx.tau_bar_empty == 114
    assert report(10, ok, f"DBLP: build {secs:.1f}s (limit 120s), size ratio {ratio:.2f} (want 1.2-2.5), "
                          f"tau_bar {idx.tau_bar_empty} (want 114)")


def test_10_dblp_skip_line():
    if DBLP and os.path.isfile(DBLP):
        return
    report(10, True, "com-DBLP not present (set CTC_DBLP_GRAPH to run)", status="SKIP")


def _pipeline(workdir, graph_edges, truth_lines, threads):
    env = dict(os.environ, CTC_THREADS=str(threads))
    graph = workdir / "graph.txt"
    graph.write_text("".join(f"{u}\t{v}\n" for u, v in graph_edges))
    truth = workdir / "truth.txt"
    truth.write_text(truth_lines)

    def ctc(*args):
        subprocess.run([sys.executable, "-m", "closest_truss", *args], check=True, env=env,
                       capture_output=True, text=True)

    ctc("gen-queries", "--graph", str(graph), "--size", "2", "--distance", "2", "--degree-rank", "0.8",
        "--count", "12", "--seed", "42", "--out", str(workdir / "wl.txt"))
    ctc("index", "--graph", str(graph), "--out", str(workdir / "g.idx"))
    streams = []
    for algo in ("basic", "bd", "lctc", "oracle"):
        out = workdir / f"{algo}.jsonl"
        ctc("query", "--graph", str(graph), "--index", str(workdir / "g.idx"), "--algo", algo,
            "--queries", str(workdir / "wl.txt"), "--seed", "42", "--omit-timing", "--out", str(out))
        ctc("eval", "--results", str(out), "--truth", str(truth), "--out", str(workdir / f"{algo}.eval"))
        streams += [out.read_bytes(), (workdir / f"{algo}.eval").read_bytes()]
    return [(workdir / "wl.txt").read_bytes(), (workdir / "g.idx").read_bytes()] + streams


def test_11_cli_determinism(tmp_path):
    g, blocks = planted_cliques([6, 6, 6], 10, seed=11)
    edges = [(u * 3 + 1, v * 3 + 1) for u, v in g.edges()]
    truth = "".join(" ".join(str(x * 3 + 1) for x in b) + "\n" for b in blocks)
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first = _pipeline(tmp_path / "a", edges, truth, threads=1)
    second = _pipeline(tmp_path / "b", edges, truth, threads=4)
    same = first == second
    n_lines = first[2].count(b"\n")
    assert report(11, same and n_lines == 12, f"two full CLI runs (1 vs 4 threads): "
                                             f"{'byte-identical' if same else 'DIFFERENT'} streams, {n_lines} results per algorithm")
