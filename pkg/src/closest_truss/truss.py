"""Truss decomposition and the compact truss index.

The index keeps, for every node, its neighbours ordered by descending edge
trussness (ties by neighbour id) together with ``(k, offset)`` markers giving
where each trussness level starts. All edges with trussness in a range
``[lo, hi)`` incident to a node are therefore one contiguous slice.
"""
import heapq
import struct

from .errors import IndexFormatError
from .graph import Graph, edge_key, edge_pair, edge_support_all

MAGIC = b"CTCX"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
_RECORD = struct.Struct("<III")
_CHECKSUM = struct.Struct("<Q")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def fnv1a64(data):
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def truss_decompose(g):
    """Trussness of every edge of ``g`` by support peeling.

    Edges are peeled in nondecreasing support order with ties broken by edge
    key. An edge in no triangle gets trussness 2.
    """
    sup = edge_support_all(g)
    adj = [set(g.neighbors(v)) for v in g.nodes()]
    heap = [(s, key) for key, s in sup.items()]
    heapq.heapify(heap)
    tau = {}
    k = 2
    while heap:
        s, key = heapq.heappop(heap)
        if key in tau or sup[key] != s:
            continue
        if s > k - 2:
            k = s + 2
        tau[key] = k
        u, v = edge_pair(key)
        a, b = adj[u], adj[v]
        if len(a) > len(b):
            a, b = b, a
        for w in [w for w in a if w in b]:
            for other in (edge_key(u, w), edge_key(v, w)):
                # already-peeled edges are gone from adj, so both are live here
                if sup[other] > k - 2:
                    sup[other] -= 1
                    heapq.heappush(heap, (sup[other], other))
        adj[u].discard(v)
        adj[v].discard(u)
    return tau


class TrussIndex:
    """Per-edge trussness plus trussness-sorted adjacency for one graph."""

    def __init__(self, n, edge_trussness):
        self.n = n
        self.edge_trussness = dict(edge_trussness)
        nbrs = [[] for _ in range(n)]
        for key, t in self.edge_trussness.items():
            u, v = edge_pair(key)
            nbrs[u].append((-t, v))
            nbrs[v].append((-t, u))
        self.sorted_adjacency = []
        self.adjacency_trussness = []
        self.level_markers = []
        self.vertex_trussness = []
        for entries in nbrs:
            entries.sort()
            self.sorted_adjacency.append(tuple(u for _, u in entries))
            levels = tuple(-t for t, _ in entries)
            self.adjacency_trussness.append(levels)
            markers = []
            for i, t in enumerate(levels):
                if i == 0 or levels[i - 1] != t:
                    markers.append((t, i))
            self.level_markers.append(tuple(markers))
            self.vertex_trussness.append(levels[0] if levels else 0)
        self.tau_bar_empty = max(self.edge_trussness.values(), default=0)

    @property
    def m(self):
        return len(self.edge_trussness)

    def trussness(self, u, v):
        return self.edge_trussness[edge_key(u, v)]

    def levels(self):
        """Distinct edge trussness values, descending."""
        return sorted(set(self.edge_trussness.values()), reverse=True)

    def neighbors_in_range(self, v, lo, hi=None):
        """Neighbours ``u`` of ``v`` with ``lo <= tau(v, u) < hi``."""
        adj = self.sorted_adjacency[v]
        start, end = None, len(adj)
        for t, offset in self.level_markers[v]:
            if start is None and (hi is None or t < hi):
                start = offset
            if t < lo:
                end = offset
                break
        if start is None or start >= end:
            return ()
        return adj[start:end]

    def neighbors_at_least(self, v, lo):
        return self.neighbors_in_range(v, lo)

    def next_level_below(self, v, k):
        """Largest incident trussness strictly below ``k``, or 0."""
        for t, _ in self.level_markers[v]:
            if t < k:
                return t
        return 0

    def records(self):
        return [(*edge_pair(key), self.edge_trussness[key]) for key in sorted(self.edge_trussness)]

    def __eq__(self, other):
        return (isinstance(other, TrussIndex) and self.n == other.n
                and self.edge_trussness == other.edge_trussness)


def build_index(g):
    return TrussIndex(g.n, truss_decompose(g))


def dump_index(idx):
    body = b"".join(_RECORD.pack(u, v, t) for u, v, t in idx.records())
    return (_HEADER.pack(MAGIC, VERSION, idx.n, idx.m) + body
            + _CHECKSUM.pack(fnv1a64(body)))


def parse_index(data):
    if len(data) < _HEADER.size:
        raise IndexFormatError("truncated header")
    magic, version, n, m = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise IndexFormatError(f"unsupported version {version}")
    end = _HEADER.size + m * _RECORD.size
    if len(data) != end + _CHECKSUM.size:
        raise IndexFormatError(f"expected {end + _CHECKSUM.size} bytes, got {len(data)}")
    body = data[_HEADER.size:end]
    (checksum,) = _CHECKSUM.unpack_from(data, end)
    if checksum != fnv1a64(body):
        raise IndexFormatError("checksum mismatch")
    trussness = {}
    prev = -1
    for u, v, t in _RECORD.iter_unpack(body):
        key = edge_key(u, v)
        if u >= v or v >= n or key <= prev or t < 2:
            raise IndexFormatError(f"invalid record ({u}, {v}, {t})")
        trussness[key] = t
        prev = key
    return TrussIndex(n, trussness)


def save_index(idx, sink):
    sink.write(dump_index(idx))


def load_index(source):
    return parse_index(source.read())


def index_matches(idx, g):
    """True if ``idx`` was built for exactly the edge set of ``g``."""
    return idx.n == g.n and idx.m == g.m and all(k in idx.edge_trussness for k in g.edge_keys)


def level_graph(g, idx, k):
    """Subgraph of ``g`` made of edges with trussness >= ``k``."""
    keys = [key for key in g.edge_keys if idx.edge_trussness[key] >= k]
    return Graph(g.n, map(edge_pair, keys), labels=g.labels)
