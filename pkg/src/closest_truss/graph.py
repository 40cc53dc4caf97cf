"""Graph storage and traversal shared by every search.

Nodes are dense internal ids ``0..n-1``. The external ids read from an edge
list are kept in ``Graph.labels`` and only used at I/O boundaries. An edge is
addressed by a single packed integer key, ``(min << 32) | max``.
"""
from collections import deque
from dataclasses import dataclass, field
import math

from .errors import DisconnectedGraphError, EdgeListParseError

INF = math.inf
_SHIFT = 32
_MASK = (1 << _SHIFT) - 1


def edge_key(u, v):
    if u > v:
        u, v = v, u
    return (u << _SHIFT) | v


def edge_pair(key):
    return key >> _SHIFT, key & _MASK


class Graph:
    """Immutable undirected simple graph with sorted adjacency lists.

    Self-loops and duplicate edges passed to the constructor are dropped.
    ``labels[i]`` is the external id of internal node ``i``.
    """

    def __init__(self, n, edges, labels=None):
        keys = set()
        for u, v in edges:
            if u == v:
                continue
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            keys.add(edge_key(u, v))
        self.n = n
        self.edge_keys = sorted(keys)
        self.m = len(self.edge_keys)
        adj = [[] for _ in range(n)]
        for key in self.edge_keys:
            u, v = edge_pair(key)
            adj[u].append(v)
            adj[v].append(u)
        self.adj = [tuple(sorted(a)) for a in adj]
        self._adjset = [frozenset(a) for a in self.adj]
        if labels is None:
            labels = list(range(n))
        elif len(labels) != n:
            raise ValueError("labels must have one entry per node")
        self.labels = list(labels)
        self._index = {x: i for i, x in enumerate(self.labels)}
        if len(self._index) != n:
            raise ValueError("labels must be distinct")

    @classmethod
    def from_edges(cls, edges):
        """Build a graph whose internal ids equal the given integer ids."""
        edges = list(edges)
        n = 1 + max((max(e) for e in edges), default=-1)
        return cls(n, edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def nodes(self):
        return range(self.n)

    def neighbors(self, v):
        return self.adj[v]

    def neighbor_set(self, v):
        return self._adjset[v]

    def degree(self, v):
        return len(self.adj[v])

    def has_edge(self, u, v):
        return v in self._adjset[u]

    def edges(self):
        return [edge_pair(k) for k in self.edge_keys]

    def external(self, v):
        return self.labels[v]

    def internal(self, x):
        """Internal id of external id ``x``; KeyError if unknown."""
        return self._index[x]

    def has_external(self, x):
        return x in self._index

    def subgraph(self, keys):
        """Graph on the endpoints of ``keys`` with compact ids.

        Returns ``(sub, local_to_base)``. External labels carry over, so results
        computed on ``sub`` report the same external ids as ``self``.
        """
        nodes = sorted({x for k in keys for x in edge_pair(k)})
        pos = {v: i for i, v in enumerate(nodes)}
        edges = [(pos[u], pos[v]) for u, v in map(edge_pair, keys)]
        sub = Graph(len(nodes), edges, labels=[self.labels[v] for v in nodes])
        return sub, nodes

    def write_id_map(self, stream):
        for i, x in enumerate(self.labels):
            stream.write(f"{x} {i}\n")


def load_edge_list(stream):
    """Parse a whitespace-separated edge list into a :class:`Graph`.

    ``stream`` is any iterable of lines (text or bytes). Lines starting with
    ``#`` and blank lines are skipped. External ids are compacted in ascending
    order, so the same input always yields the same graph and id map.
    """
    raw = []
    for lineno, line in enumerate(stream, 1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, f"expected 2 tokens, got {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer token in {line!r}") from None
        if a != b:
            raw.append((a, b))
    labels = sorted({x for e in raw for x in e})
    pos = {x: i for i, x in enumerate(labels)}
    return Graph(len(labels), [(pos[a], pos[b]) for a, b in raw], labels=labels)


def read_edge_list(path):
    with open(path, "rb") as fh:
        return load_edge_list(fh)


def read_id_map(stream):
    """Read an ``external internal`` two-column file into a list of labels."""
    pairs = []
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if line.strip():
            ext, internal = line.split()
            pairs.append((int(internal), int(ext)))
    pairs.sort()
    if [i for i, _ in pairs] != list(range(len(pairs))):
        raise ValueError("id map is not a dense 0..n-1 range")
    return [x for _, x in pairs]


def common_neighbors(g, u, v):
    """Sorted common live neighbours of ``u`` and ``v``; its length is sup(u, v)."""
    return sorted(g.neighbor_set(u) & g.neighbor_set(v))


def edge_support_all(g):
    """Triangle count of every edge, keyed by packed edge key."""
    keys = g.edge_keys if isinstance(g, Graph) else g.edge_keys()
    return _supports(g, keys)


def _supports(g, keys):
    sup = {}
    for key in keys:
        u, v = edge_pair(key)
        a, b = g.neighbor_set(u), g.neighbor_set(v)
        if len(a) > len(b):
            a, b = b, a
        sup[key] = sum(1 for w in a if w in b)
    return sup


class DistanceField(dict):
    """Hop distances keyed by node; missing nodes are unreachable (``INF``)."""

    def __missing__(self, key):
        return INF


def multi_source_bfs(g, sources):
    dist = DistanceField()
    queue = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for u in g.neighbors(v):
            if u not in dist:
                dist[u] = dv
                queue.append(u)
    return dist


def bfs_tree(g, source):
    """Distances and BFS parents from a single source."""
    dist = {source: 0}
    parent = {source: None}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                parent[u] = v
                queue.append(u)
    return dist, parent


def connected_component(g, start):
    return set(multi_source_bfs(g, [start]))


def is_connected(g):
    nodes = list(g.nodes())
    if not nodes:
        return True
    return len(multi_source_bfs(g, [nodes[0]])) == len(nodes)


def diameter(g):
    """Exact diameter. Raises on disconnected input.

    Eccentricity bounding: each BFS from ``v`` bounds every other node's
    eccentricity by ``max(d, ecc(v) - d) <= ecc(w) <= ecc(v) + d``; nodes whose
    upper bound cannot beat the best eccentricity found are dropped. Sources
    alternate between the largest upper and the smallest lower bound.
    """
    nodes = list(g.nodes())
    if not nodes:
        raise ValueError("diameter of an empty graph is undefined")
    lower = dict.fromkeys(nodes, 0)
    upper = dict.fromkeys(nodes, INF)
    candidates = set(nodes)
    best = 0
    high = True
    while candidates:
        if high:
            v = max(candidates, key=lambda x: (upper[x], len(g.neighbors(x)), -x))
        else:
            v = min(candidates, key=lambda x: (lower[x], -len(g.neighbors(x)), x))
        high = not high
        dist = multi_source_bfs(g, [v])
        if len(dist) != len(nodes):
            raise DisconnectedGraphError("graph is not connected")
        ecc = max(dist.values())
        best = max(best, ecc)
        candidates.discard(v)
        for w in list(candidates):
            d = dist[w]
            lower[w] = max(lower[w], d, ecc - d)
            upper[w] = min(upper[w], ecc + d)
            if upper[w] <= best or lower[w] == upper[w]:
                best = max(best, lower[w])
                candidates.discard(w)
    return best


@dataclass
class LogEntry:
    iteration: int
    nodes: tuple
    edges: tuple


@dataclass
class RemovalLog:
    """Initial edge set of an overlay plus the removals of each iteration."""

    base: Graph
    initial_edges: tuple
    entries: list = field(default_factory=list)

    def live_edges(self, i):
        removed = set()
        for entry in self.entries[:i]:
            removed.update(entry.edges)
        return [k for k in self.initial_edges if k not in removed]


class GraphOverlay:
    """Mutable live view over a subset of a base graph's edges.

    Liveness of nodes is a bitset over the base ids; live adjacency sets are
    kept only for live nodes, so memory is proportional to the overlay, not to
    the base graph. ``support`` maps every live edge to its live triangle
    count. Nodes without live edges are not live.
    """

    def __init__(self, base, keys, support=None):
        self.base = base
        self.node_alive = bytearray(base.n)
        self._adj = {}
        keys = sorted(set(keys))
        for key in keys:
            u, v = edge_pair(key)
            if not base.has_edge(u, v):
                raise ValueError(f"edge ({u}, {v}) not in base graph")
            self._adj.setdefault(u, set()).add(v)
            self._adj.setdefault(v, set()).add(u)
        for v in self._adj:
            self.node_alive[v] = 1
        self.support = dict(support) if support is not None else _supports(self, keys)
        self.removal_log = RemovalLog(base, tuple(keys))
        self._pending_nodes = []
        self._pending_edges = []

    @classmethod
    def of(cls, g):
        return cls(g, g.edge_keys)

    def __repr__(self):
        return f"GraphOverlay(nodes={self.node_count}, edges={self.edge_count})"

    @property
    def node_count(self):
        return len(self._adj)

    @property
    def edge_count(self):
        return len(self.support)

    def nodes(self):
        return self._adj.keys()

    def neighbors(self, v):
        return self._adj.get(v, ())

    def neighbor_set(self, v):
        return self._adj.get(v, frozenset())

    def has_node(self, v):
        return bool(self.node_alive[v])

    def has_edge(self, u, v):
        return v in self._adj.get(u, ())

    def edge_keys(self):
        return sorted(self.support)

    def remove_edge(self, key):
        """Drop a live edge; endpoints left without edges stop being live."""
        u, v = edge_pair(key)
        del self.support[key]
        self._pending_edges.append(key)
        for a, b in ((u, v), (v, u)):
            nbrs = self._adj[a]
            nbrs.discard(b)
            if not nbrs:
                self._drop_node(a)

    def remove_node(self, v):
        """Drop ``v`` and its edges without touching other supports."""
        for u in list(self._adj.get(v, ())):
            self.remove_edge(edge_key(u, v))

    def _drop_node(self, v):
        del self._adj[v]
        self.node_alive[v] = 0
        self._pending_nodes.append(v)

    def commit(self, iteration):
        """Close the current iteration's removals into the log."""
        entry = LogEntry(iteration, tuple(sorted(self._pending_nodes)),
                         tuple(sorted(self._pending_edges)))
        self.removal_log.entries.append(entry)
        self._pending_nodes = []
        self._pending_edges = []
        return entry


def snapshot_restore(log, i):
    """Rebuild the overlay state ``G_i`` seen at the start of iteration ``i``.

    Snapshot 0 is always available, even for a run stopped before its first
    iteration completed.
    """
    if not 0 <= i < max(1, len(log.entries)):
        raise IndexError(f"snapshot {i} out of range for {len(log.entries)} iterations")
    return GraphOverlay(log.base, log.live_edges(i))
