"""Local exploration heuristic (LCTC).

A Steiner tree under truss distance links the query nodes. Growing it over
strong edges up to a node cap gives a small neighbourhood, whose best
connected k-truss is then peeled like in the global search.
"""
from collections import deque
from dataclasses import dataclass
import time

from .errors import NoCommunityError
from .graph import INF, GraphOverlay, edge_key, edge_pair
from .search import DEFAULT_BUDGET_SECS, DEFAULT_ETA, DEFAULT_GAMMA, _heaviest_far_nodes, find_g0, peel
from .truss import build_index


def _path(parent, v):
    out = []
    while v is not None:
        out.append(v)
        v = parent[v]
    return out[::-1]


def _sweep(idx, src, targets, gamma):
    """Truss distance from ``src`` to each target.

    For each trussness level t (high to low) a BFS over edges with trussness
    >= t gives the shortest length L_t; the truss distance is the minimum of
    L_t + gamma * (tau_bar - t). Stops once no lower level can improve any
    target. Returns ``{target: (value, path)}``.
    """
    tau_bar = idx.tau_bar_empty
    best = {t: (INF, None) for t in targets}
    if src in best:
        best[src] = (0, [src])
    for level in idx.levels():
        if level > idx.vertex_trussness[src]:
            continue
        penalty = gamma * (tau_bar - level)
        if all(value <= penalty + 1 for value, _ in best.values()):
            break
        dist = {src: 0}
        parent = {src: None}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for u in idx.neighbors_at_least(v, level):
                if u not in dist:
                    dist[u] = dist[v] + 1
                    parent[u] = v
                    queue.append(u)
        for t in targets:
            if t in dist and dist[t] + penalty < best[t][0]:
                best[t] = (dist[t] + penalty, _path(parent, t))
    return best


def truss_distance(g, idx, u, v, gamma=DEFAULT_GAMMA):
    """Minimum over u-v paths of length + gamma * (tau_bar - min edge trussness).

    Returns ``(value, path)``; ``(INF, None)`` when v is unreachable.
    """
    return _sweep(idx, u, [v], gamma)[v]


def path_truss_distance(idx, path, gamma):
    if len(path) < 2:
        return 0
    low = min(idx.trussness(a, b) for a, b in zip(path, path[1:]))
    return len(path) - 1 + gamma * (idx.tau_bar_empty - low)


def edge_weight(idx, key, gamma):
    """Truss distance of a single edge."""
    return 1 + gamma * (idx.tau_bar_empty - idx.edge_trussness[key])


@dataclass
class SteinerTree:
    nodes: tuple
    edges: tuple
    k_t: int
    distance_graph_weight: float = 0


def _kruskal(n_items, weighted):
    """Minimum spanning forest; ``weighted`` is a list of (weight, tiebreak, a, b)."""
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    chosen = []
    for item in sorted(weighted):
        a, b = item[2], item[3]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            chosen.append(item)
    return chosen


def steiner_tree(g, idx, Q, gamma=DEFAULT_GAMMA):
    """KMB Steiner tree over ``Q`` with truss distance as the path metric."""
    Q = sorted(set(Q))
    if len(Q) == 1:
        return SteinerTree((Q[0],), (), idx.vertex_trussness[Q[0]], 0)
    closure = []
    paths = {}
    for i, a in enumerate(Q):
        reach = _sweep(idx, a, Q[i + 1:], gamma)
        for b in Q[i + 1:]:
            value, path = reach[b]
            if value == INF:
                raise NoCommunityError(f"query nodes {g.external(a)} and {g.external(b)} are disconnected")
            closure.append((value, (a, b), a, b))
            paths[(a, b)] = path
    mst = _kruskal(len(Q), closure)
    union = set()
    for _, pair, _, _ in mst:
        path = paths[pair]
        union.update(edge_key(x, y) for x, y in zip(path, path[1:]))
    tree = _kruskal(len(union), [(edge_weight(idx, key, gamma), key, *edge_pair(key)) for key in union])
    keys = {item[1] for item in tree}
    _prune_leaves(keys, set(Q))
    nodes = tuple(sorted({x for key in keys for x in edge_pair(key)}))
    k_t = min(idx.edge_trussness[key] for key in keys)
    return SteinerTree(nodes, tuple(sorted(keys)), k_t, sum(item[0] for item in mst))


def _prune_leaves(keys, terminals):
    degree = {}
    for key in keys:
        for x in edge_pair(key):
            degree[x] = degree.get(x, 0) + 1
    leaves = [v for v, d in degree.items() if d == 1 and v not in terminals]
    while leaves:
        v = leaves.pop()
        key = next(k for k in keys if v in edge_pair(k))
        keys.discard(key)
        degree[v] = 0
        for x in edge_pair(key):
            if x != v:
                degree[x] -= 1
                if degree[x] == 1 and x not in terminals:
                    leaves.append(x)


def expand_tree(g, idx, tree, k_t, eta=DEFAULT_ETA):
    """Grow ``tree`` breadth-first over edges with trussness >= k_t.

    Nodes are admitted in FIFO order until there are ``eta`` of them; every
    qualifying edge between admitted nodes is kept.
    """
    if eta < len(tree.nodes):
        raise ValueError(f"eta={eta} is smaller than the Steiner tree ({len(tree.nodes)} nodes)")
    admitted = set(tree.nodes)
    queue = deque(tree.nodes)
    keys = set(tree.edges)
    while queue:
        v = queue.popleft()
        for u in idx.neighbors_at_least(v, k_t):
            if u in admitted:
                keys.add(edge_key(u, v))
            elif len(admitted) < eta:
                admitted.add(u)
                queue.append(u)
                keys.add(edge_key(u, v))
    return GraphOverlay(g, keys)


def extract_max_truss(region, Q, k_t):
    """Best connected k-truss (k <= k_t) containing Q inside ``region``.

    Decomposes the region on its own and reuses the index walk of
    :func:`find_g0` there. Returns ``(k, overlay, local_Q)`` where the overlay
    lives on a compact copy of the region whose labels are the original
    external ids.
    """
    sub, local_to_base = region.base.subgraph(region.edge_keys())
    pos = {v: i for i, v in enumerate(local_to_base)}
    if any(q not in pos for q in Q):
        raise NoCommunityError("query node outside the explored region")
    local_q = sorted(pos[q] for q in Q)
    k, ov = find_g0(sub, build_index(sub), local_q, max_k=k_t)
    return k, ov, local_q


def lctc_search(g, idx, Q, eta=DEFAULT_ETA, gamma=DEFAULT_GAMMA, time_budget=DEFAULT_BUDGET_SECS):
    started = time.perf_counter()
    Q = sorted(set(Q))
    for q in Q:
        if idx.vertex_trussness[q] < 2:
            raise NoCommunityError(f"query node {g.external(q)} has no edges")
    tree = steiner_tree(g, idx, Q, gamma)
    notes = []
    cap = max(eta, len(tree.nodes))
    limit = 4 * cap
    while True:
        region = expand_tree(g, idx, tree, tree.k_t, cap)
        k, ov, local_q = extract_max_truss(region, Q, tree.k_t)
        # a cap that truncated the region can leave the tree's edges short of triangles
        if k == tree.k_t or region.node_count < cap or cap >= limit:
            break
        cap = min(2 * cap, limit)
        notes.append(f"eta_fallback={cap}")
    return peel(ov, k, local_q, _heaviest_far_nodes(), "lctc", started, time_budget, notes=notes)
