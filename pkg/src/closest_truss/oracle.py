"""Brute-force ground truth for small graphs.

Everything here works on per-node neighbour bitmasks and recomputes supports
from scratch, so it shares no code path with the peeling decomposition or the
overlay-based searches it is used to check.
"""
from dataclasses import dataclass, field
from itertools import combinations

from .errors import NoCommunityError, OracleSizeError

MAX_DECOMPOSE_NODES = 200
MAX_ENUM_FREE_NODES = 20


def _masks(g):
    masks = [0] * g.n
    for u, v in g.edges():
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _fixpoint(adj, k, within=None):
    """Largest subgraph of ``adj`` (optionally induced on ``within``) whose
    edges all lie in >= k-2 triangles. Returns new adjacency masks."""
    if within is None:
        adj = list(adj)
    else:
        adj = [a & within if (within >> v) & 1 else 0 for v, a in enumerate(adj)]
    need = k - 2
    changed = True
    while changed:
        changed = False
        for u in range(len(adj)):
            for v in _bits(adj[u] >> (u + 1)):
                v += u + 1
                if (adj[u] & adj[v]).bit_count() < need:
                    adj[u] &= ~(1 << v)
                    adj[v] &= ~(1 << u)
                    changed = True
    return adj


def _edges_of(adj):
    return [(u, v) for u in range(len(adj)) for v in _bits(adj[u]) if u < v]


def _component(adj, start):
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= adj[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def _ecc_all(adj, nodes_mask):
    """Map node -> {node: distance} restricted to ``nodes_mask``."""
    out = {}
    for s in _bits(nodes_mask):
        dist = {s: 0}
        frontier, seen, d = 1 << s, 1 << s, 0
        while frontier:
            d += 1
            nxt = 0
            for v in _bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~seen & nodes_mask
            seen |= frontier
            for v in _bits(frontier):
                dist[v] = d
        out[s] = dist
    return out


def _q_connected(adj, qmask):
    """Component mask holding all of Q, or 0. Every q needs an edge."""
    qs = list(_bits(qmask))
    if any(adj[q] == 0 for q in qs):
        return 0
    comp = _component(adj, qs[0])
    return comp if comp & qmask == qmask else 0


def oracle_truss_decompose(g):
    """Trussness per edge key: the largest k whose k-truss fixpoint keeps it."""
    if g.n > MAX_DECOMPOSE_NODES:
        raise OracleSizeError(f"oracle decomposition limited to {MAX_DECOMPOSE_NODES} nodes")
    adj = _masks(g)
    tau = {}
    k = 2
    while any(adj):
        for u, v in _edges_of(adj):
            tau[(u << 32) | v] = k
        k += 1
        # the level-k fixpoint lies inside the level-(k-1) one
        adj = _fixpoint(adj, k)
    return tau


def _qmask(Q):
    mask = 0
    for q in Q:
        mask |= 1 << q
    return mask


def _max_k_levels(g, Q):
    qmask = _qmask(Q)
    adj = _masks(g)
    best = None
    k = 2
    while True:
        comp = _q_connected(adj, qmask) if qmask else (1 if any(adj) else 0)
        if not comp:
            break
        best = (k, adj, comp)
        k += 1
        adj = _fixpoint(adj, k)
    return best


def oracle_max_k(g, Q):
    """Largest k whose k-truss fixpoint has all of Q in one component."""
    if g.n > MAX_DECOMPOSE_NODES:
        raise OracleSizeError(f"oracle limited to {MAX_DECOMPOSE_NODES} nodes")
    best = _max_k_levels(g, Q)
    if best is None:
        raise NoCommunityError(f"query {sorted(Q)} is not connected in any k-truss")
    return best[0]


@dataclass
class Community:
    nodes: tuple
    edges: tuple
    diameter: int
    query_distance: int


@dataclass
class OracleAnswer:
    k_opt: int
    diam_opt: int
    min_query_distance: int
    witness: Community
    distance_witness: Community
    optimal: list = field(default_factory=list)

    def maximal_optimal(self):
        """An optimal community not contained in any other optimal one."""
        return max(self.optimal, key=lambda c: (len(c.nodes), len(c.edges), [-x for x in c.nodes]))


def _candidates(g, Q, k):
    """All distinct Q-components of k-truss fixpoints of node subsets S ⊇ Q,
    enumerated by increasing |S|. Yields ``(comp_mask, adj)``."""
    best = _max_k_levels(g, Q)
    qmask = _qmask(Q)
    if best is None or best[0] < k:
        raise NoCommunityError(f"no connected {k}-truss contains {sorted(Q)}")
    adj = _masks(g)
    for level in range(3, k + 1):
        adj = _fixpoint(adj, level)
    region = _q_connected(adj, qmask)
    free = [v for v in _bits(region & ~qmask)]
    if len(free) > MAX_ENUM_FREE_NODES:
        raise OracleSizeError(f"{len(free)} free nodes exceeds oracle limit {MAX_ENUM_FREE_NODES}")
    seen = set()
    for size in range(len(free) + 1):
        for extra in combinations(free, size):
            within = qmask
            for v in extra:
                within |= 1 << v
            sub = _fixpoint(adj, k, within)
            comp = _q_connected(sub, qmask)
            if not comp or comp in seen:
                continue
            seen.add(comp)
            yield comp, [a & comp if (comp >> v) & 1 else 0 for v, a in enumerate(sub)]


def _measure(comp, adj, Q):
    dists = _ecc_all(adj, comp)
    diam = max(max(d.values()) for d in dists.values())
    qd = max(max(dists[q].values()) for q in Q)
    return Community(tuple(_bits(comp)), tuple(_edges_of(adj)), diam, qd)


def _pair_bound(g, Q, k):
    """max(1, max pairwise query distance inside the level-k region)."""
    qmask = _qmask(Q)
    adj = _masks(g)
    for level in range(3, k + 1):
        adj = _fixpoint(adj, level)
    region = _q_connected(adj, qmask)
    dists = _ecc_all(adj, region)
    return max([1] + [dists[a][b] for a in Q for b in Q])


def _key(c, metric):
    return (metric(c), len(c.nodes), c.nodes)


def oracle_ctc(g, Q, exhaustive=False):
    """Exact closest truss community by subset enumeration.

    With ``exhaustive`` the enumeration never stops early and ``optimal`` lists
    every minimum-diameter candidate.
    """
    Q = sorted(set(Q))
    k = oracle_max_k(g, Q)
    bound = _pair_bound(g, Q, k)
    best = best_qd = None
    found = []
    for comp, adj in _candidates(g, Q, k):
        c = _measure(comp, adj, Q)
        found.append(c)
        if best is None or _key(c, _diam) < _key(best, _diam):
            best = c
        if best_qd is None or _key(c, _qd) < _key(best_qd, _qd):
            best_qd = c
        if not exhaustive and best.diameter <= bound and best_qd.query_distance <= bound:
            break
    optimal = [c for c in found if c.diameter == best.diameter] if exhaustive else [best]
    return OracleAnswer(k, best.diameter, best_qd.query_distance, best, best_qd, optimal)


def _diam(c):
    return c.diameter


def _qd(c):
    return c.query_distance


def oracle_min_query_distance(g, Q, k=None):
    """Minimum graph query distance over connected k-trusses containing Q."""
    Q = sorted(set(Q))
    if k is None:
        k = oracle_max_k(g, Q)
    bound = _pair_bound(g, Q, k)
    best = None
    for comp, adj in _candidates(g, Q, k):
        qd = _measure(comp, adj, Q).query_distance
        best = qd if best is None else min(best, qd)
        if best <= bound:
            break
    return best


def oracle_query_independent(g):
    """Every minimum-diameter connected k-truss at the graph's top trussness.

    Only edge-maximal candidates (k-truss fixpoints of induced subgraphs) are
    returned; any other optimum shares its node set with one of them.
    """
    levels = _max_k_levels(g, [])
    if levels is None:
        return 0, []
    k, adj, _ = levels
    region = 0
    for a in adj:
        region |= a
    nodes = list(_bits(region))
    if len(nodes) > MAX_ENUM_FREE_NODES:
        raise OracleSizeError(f"{len(nodes)} nodes exceeds oracle limit {MAX_ENUM_FREE_NODES}")
    comps = {}
    for size in range(k, len(nodes) + 1):
        for chosen in combinations(nodes, size):
            within = 0
            for v in chosen:
                within |= 1 << v
            sub = _fixpoint(adj, k, within)
            remaining = 0
            for a in sub:
                remaining |= a
            while remaining:
                start = (remaining & -remaining).bit_length() - 1
                comp = _component(sub, start)
                remaining &= ~comp
                if comp not in comps:
                    part = [a & comp if (comp >> v) & 1 else 0 for v, a in enumerate(sub)]
                    comps[comp] = _measure(comp, part, [start])
    best = min(c.diameter for c in comps.values())
    return k, sorted((c for c in comps.values() if c.diameter == best), key=lambda c: c.nodes)


def check_community(g, nodes, edges, k, Q):
    """List of violated feasibility conditions for a claimed connected k-truss
    containing Q (empty list when feasible). Recounts everything naively."""
    problems = []
    nodes = set(nodes)
    eset = {(min(u, v), max(u, v)) for u, v in edges}
    for u, v in eset:
        if not g.has_edge(u, v):
            problems.append(f"edge {(u, v)} not in graph")
        if u not in nodes or v not in nodes:
            problems.append(f"edge {(u, v)} leaves the node set")
    if not set(Q) <= nodes:
        problems.append("query nodes missing")
    adj = {v: set() for v in nodes}
    for u, v in eset:
        if u in adj and v in adj:
            adj[u].add(v)
            adj[v].add(u)
    for u, v in eset:
        sup = sum(1 for w in nodes if w in adj[u] and w in adj[v])
        if sup < k - 2:
            problems.append(f"edge {(u, v)} support {sup} < {k - 2}")
    if nodes:
        start = next(iter(nodes))
        seen, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != nodes:
            problems.append("not connected")
    if len(nodes) > 1 and not eset:
        problems.append("no edges")
    return problems
