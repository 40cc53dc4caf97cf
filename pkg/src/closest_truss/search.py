"""Global closest-truss-community search.

Both searches start from G0, the largest-k connected truss around the query,
and peel it while keeping it a k-truss.

All functions here take and return internal node ids; only
:class:`CommunityResult` reports external ids.
"""
from collections import deque
from dataclasses import dataclass, field
import time

from .errors import NoCommunityError
from .graph import INF, GraphOverlay, diameter, edge_key, edge_pair, multi_source_bfs, snapshot_restore

DEFAULT_ETA = 1000
DEFAULT_GAMMA = 3
DEFAULT_BUDGET_SECS = 3600.0


@dataclass
class QuerySpec:
    query_nodes: tuple
    eta: int = DEFAULT_ETA
    gamma: float = DEFAULT_GAMMA
    time_budget: float = DEFAULT_BUDGET_SECS
    rng_seed: int = 0

    def resolve(self, g):
        """Internal ids of the query nodes; raises NoCommunityError if invalid."""
        if not self.query_nodes:
            raise NoCommunityError("empty query")
        if len(set(self.query_nodes)) != len(self.query_nodes):
            raise NoCommunityError("duplicate query nodes")
        missing = [x for x in self.query_nodes if not g.has_external(x)]
        if missing:
            raise NoCommunityError(f"unknown node ids {missing}")
        return sorted(g.internal(x) for x in self.query_nodes)


@dataclass
class CommunityResult:
    algorithm: str
    k: int
    nodes: tuple
    edges: tuple
    query_distance: int
    diameter: int
    iterations: int
    elapsed: float
    log: list = field(default_factory=list)
    status: str = "ok"
    g0_nodes: int = 0
    notes: tuple = ()
    removal_log: object = field(default=None, repr=False, compare=False)

    @property
    def partial(self):
        return self.status == "partial"


def _union_find():
    parent = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while x != root:
            parent[x], x = root, parent.get(x, x)
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    return find, union


def find_g0(g, idx, Q, max_k=None):
    """Maximal connected k-truss containing ``Q`` with the largest k.

    Walks the truss index level by level from ``min tau(q)`` downwards,
    touching only edges that end up in the answer plus one level probe per
    visited node. ``max_k`` caps the starting level.
    Returns ``(k, overlay)`` with supports computed inside G0.
    """
    Q = sorted(set(Q))
    if not Q:
        raise ValueError("query must not be empty")
    for q in Q:
        if idx.vertex_trussness[q] < 2:
            raise NoCommunityError(f"query node {g.external(q)} has no edges")
    k = min(idx.vertex_trussness[q] for q in Q)
    if max_k is not None:
        k = min(k, max_k)
    find, union = _union_find()
    in_g0 = set()
    keys = set()
    pending = {k: dict.fromkeys(Q)}
    while True:
        level = pending.pop(k, {})
        queue = list(level)
        i = 0
        while i < len(queue):
            v = queue[i]
            i += 1
            hi = k + 1 if v in in_g0 else None
            in_g0.add(v)
            for u in idx.neighbors_in_range(v, k, hi):
                key = edge_key(u, v)
                if key not in keys:
                    keys.add(key)
                    union(u, v)
                if u not in level:
                    level[u] = None
                    queue.append(u)
            lower = idx.next_level_below(v, k)
            if lower >= 2:
                pending.setdefault(lower, {})[v] = None
        root = find(Q[0])
        if keys and all(find(q) == root for q in Q):
            break
        if not pending:
            raise NoCommunityError(f"query {[g.external(q) for q in Q]} spans several components")
        k = max(pending)
    return k, GraphOverlay(g, keys)


def truss_maintain(ov, removed, k, Q):
    """Delete ``removed`` from ``ov`` and restore the connected k-truss.

    Edges whose support falls below k-2 are cascaded out, decrementing the two
    other edges of each broken triangle; isolated nodes drop automatically.
    If all of Q survives in one component, everything outside that component
    is removed too. Otherwise the overlay is left as is, and
    :func:`query_connected` reports the terminal state.
    """
    threshold = k - 2
    queued = set()
    queue = deque()
    for v in sorted(removed):
        for u in sorted(ov.neighbors(v)):
            key = edge_key(u, v)
            if key not in queued:
                queued.add(key)
                queue.append(key)
    support = ov.support
    while queue:
        key = queue.popleft()
        u, v = edge_pair(key)
        for w in sorted(ov.neighbor_set(u) & ov.neighbor_set(v)):
            for other in (edge_key(u, w), edge_key(v, w)):
                support[other] -= 1
                if support[other] < threshold and other not in queued:
                    queued.add(other)
                    queue.append(other)
        ov.remove_edge(key)
    if all(ov.has_node(q) for q in Q):
        comp = multi_source_bfs(ov, [Q[0]])
        if all(q in comp for q in Q):
            for v in sorted(v for v in ov.nodes() if v not in comp):
                ov.remove_node(v)
    return ov


def query_connected(ov, Q):
    if not all(ov.has_node(q) for q in Q):
        return False
    comp = multi_source_bfs(ov, [Q[0]])
    return all(q in comp for q in Q)


def _query_distances(ov, Q):
    """Per-node max and sum of hop distances to the query nodes."""
    worst = {}
    total = {}
    for q in Q:
        dist = multi_source_bfs(ov, [q])
        for v in ov.nodes():
            d = dist[v]
            if d > worst.get(v, -1):
                worst[v] = d
            total[v] = total.get(v, 0) + d
    return worst, total


def query_distance_all(ov, Q):
    """``(field, gmax)``: dist(v, Q) for every live node and its maximum."""
    worst, _ = _query_distances(ov, Q)
    return worst, max(worst.values(), default=INF)


def _pick_farthest(g):
    def select(dist, sums, gmax):
        return {min((v for v, d in dist.items() if d == gmax), key=g.external)}
    return select


def _bulk_shell(offset):
    """Removal rule keeping the smallest graph query distance seen so far, d,
    and deleting every node with dist >= d - offset."""
    state = {"d": INF}

    def select(dist, sums, gmax):
        if gmax < state["d"]:
            state["d"] = gmax
        cut = state["d"] - offset
        return {v for v, x in dist.items() if x >= cut}
    return select


def _heaviest_far_nodes():
    """Remove, among nodes with dist >= d, all of those whose summed distance
    to the query nodes is largest."""
    state = {"d": INF}

    def select(dist, sums, gmax):
        if gmax < state["d"]:
            state["d"] = gmax
        far = [v for v, x in dist.items() if x >= state["d"]]
        top = max(sums[v] for v in far)
        return {v for v in far if sums[v] == top}
    return select


def peel(ov, k, Q, select, algorithm, started, time_budget=DEFAULT_BUDGET_SECS, g0_nodes=None, notes=()):
    """Shared deletion loop: remove ``select(...)`` and restore the k-truss
    until Q is cut, then return the logged snapshot with the smallest graph
    query distance (latest one on ties)."""
    g = ov.base
    g0_nodes = ov.node_count if g0_nodes is None else g0_nodes
    history = []
    status = "ok"
    iteration = 0
    while query_connected(ov, Q):
        if time.perf_counter() - started > time_budget:
            status = "partial"
            break
        dist, sums = _query_distances(ov, Q)
        gmax = max(dist.values())
        before = ov.node_count
        truss_maintain(ov, select(dist, sums, gmax), k, Q)
        ov.commit(iteration)
        history.append((gmax, before - ov.node_count))
        iteration += 1
    best = min(range(len(history)), key=lambda i: (history[i][0], -i)) if history else 0
    R = snapshot_restore(ov.removal_log, best)
    _, qd = query_distance_all(R, Q)
    label = g.external
    nodes = tuple(sorted(label(v) for v in R.nodes()))
    edges = tuple(sorted(tuple(sorted((label(u), label(v)))) for u, v in map(edge_pair, R.edge_keys())))
    return CommunityResult(
        algorithm=algorithm, k=k, nodes=nodes, edges=edges, query_distance=qd,
        diameter=diameter(R), iterations=len(history),
        elapsed=time.perf_counter() - started, log=history, status=status,
        g0_nodes=g0_nodes, notes=tuple(notes), removal_log=ov.removal_log,
    )


def basic_search(g, idx, Q, time_budget=DEFAULT_BUDGET_SECS):
    """Greedy 2-approximation: repeatedly drop one farthest node."""
    started = time.perf_counter()
    Q = sorted(set(Q))
    k, ov = find_g0(g, idx, Q)
    return peel(ov, k, Q, _pick_farthest(g), "basic", started, time_budget)


def bulk_delete_search(g, idx, Q, time_budget=DEFAULT_BUDGET_SECS):
    """(2+eps)-approximation removing the whole ``dist >= d-1`` shell at once."""
    started = time.perf_counter()
    Q = sorted(set(Q))
    k, ov = find_g0(g, idx, Q)
    return peel(ov, k, Q, _bulk_shell(1), "bd", started, time_budget)
