import itertools

import networkx as nx
import numpy as np
import pytest

from closest_truss.graph import Graph


def clique(nodes):
    return list(itertools.combinations(nodes, 2))


FIXTURES = {
    "tri": [(0, 1), (1, 2), (0, 2)],
    "bowtie": [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
    "k4": clique(range(4)),
    "2k4": clique(range(4)) + clique(range(3, 7)),
    "k4path": clique(range(4)) + [(3, 4), (4, 5)],
    "shortcut": clique(range(4)) + [(0, 4), (4, 1)],
    "c5": [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
}


def fixture_graph(name):
    return Graph.from_edges(FIXTURES[name])


def random_graph(n, p, seed):
    """Seeded G(n, p) with identity ids (isolated nodes kept)."""
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


def planted_cliques(sizes, bridges, seed):
    rng = np.random.default_rng(seed)
    edges, blocks, start = [], [], 0
    for s in sizes:
        block = list(range(start, start + s))
        blocks.append(block)
        edges += clique(block)
        start += s
    added = 0
    while added < bridges:
        a, b = rng.choice(len(blocks), size=2, replace=False)
        u = int(rng.choice(blocks[a]))
        v = int(rng.choice(blocks[b]))
        if (min(u, v), max(u, v)) not in edges:
            edges.append((min(u, v), max(u, v)))
            added += 1
    return Graph(start, edges), blocks


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.nodes())
    h.add_edges_from(g.edges())
    return h


@pytest.fixture
def G_tri():
    return fixture_graph("tri")


@pytest.fixture
def G_bowtie():
    return fixture_graph("bowtie")


@pytest.fixture
def G_k4():
    return fixture_graph("k4")


@pytest.fixture
def G_2k4():
    return fixture_graph("2k4")


@pytest.fixture
def G_k4path():
    return fixture_graph("k4path")


@pytest.fixture
def G_shortcut():
    return fixture_graph("shortcut")


@pytest.fixture
def G_c5():
    return fixture_graph("c5")


def graphs(min_n=2, max_n=12, max_p=1.0):
    """Hypothesis strategy for small graphs with identity node ids."""
    from hypothesis import strategies as st

    @st.composite
    def build(draw):
        n = draw(st.integers(min_n, max_n))
        pairs = list(itertools.combinations(range(n), 2))
        p = draw(st.floats(0.1, max_p))
        seed = draw(st.integers(0, 2**32 - 1))
        rng = np.random.default_rng(seed)
        return Graph(n, [e for e in pairs if rng.random() < p])
    return build()


def feasibility_problems(g, nodes, edges, k, Q):
    """check_community over external ids mapped back to g's internal ids."""
    from closest_truss.oracle import check_community
    nodes = [g.internal(x) for x in nodes]
    edges = [(g.internal(a), g.internal(b)) for a, b in edges]
    return check_community(g, nodes, edges, k, [g.internal(x) for x in Q])


def component_query(g, pick, size):
    """Query of up to ``size`` nodes from one component; ``pick(seq)`` chooses
    an element. Returns None when the graph has no edges."""
    from closest_truss.graph import connected_component
    live = [v for v in g.nodes() if g.degree(v) > 0]
    if not live:
        return None
    comp = sorted(connected_component(g, pick(live)))
    Q = set()
    for _ in range(size):
        Q.add(pick(comp))
    return sorted(Q)


def snapshot_problems(res, Q):
    """Feasibility problems across every logged snapshot of a search run."""
    from closest_truss.graph import edge_pair, multi_source_bfs, snapshot_restore
    from closest_truss.oracle import check_community
    log = res.removal_log
    base = log.base
    problems = []
    prev_nodes = prev_dist = None
    for i in range(len(log.entries)):
        snap = snapshot_restore(log, i)
        nodes = set(snap.nodes())
        edges = [edge_pair(k) for k in snap.edge_keys()]
        problems += [f"snapshot {i}: {p}" for p in check_community(base, nodes, edges, res.k, Q)]
        dist = {v: max(multi_source_bfs(snap, [q])[v] for q in Q) for v in nodes}
        if prev_nodes is not None:
            if not nodes < prev_nodes:
                problems.append(f"snapshot {i}: node set did not shrink")
            if any(dist[v] < prev_dist[v] for v in nodes):
                problems.append(f"snapshot {i}: a query distance decreased")
        prev_nodes, prev_dist = nodes, dist
    return problems


ACCEPTANCE = {}


def report(criterion, ok, detail, status=None):
    """Record and print one acceptance line; returns ``ok`` for asserting."""
    status = status or ("PASS" if ok else "FAIL")
    line = f"acceptance {criterion:>2}: {status}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[criterion])
