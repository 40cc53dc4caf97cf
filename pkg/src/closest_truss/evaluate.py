"""Community quality metrics and seeded query-workload generation."""
from collections import deque
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import WorkloadInfeasibleError

MAX_REJECTIONS = 10_000


def f1(found, truth):
    """``(precision, recall, f1)`` of a found node set against a reference."""
    found, truth = set(found), set(truth)
    if not found or not truth:
        raise ValueError("f1 needs two non-empty node sets")
    hit = len(found & truth)
    if not hit:
        return 0.0, 0.0, 0.0
    prec = hit / len(found)
    recall = hit / len(truth)
    return prec, recall, 2 * prec * recall / (prec + recall)


def edge_density(nodes, edges):
    n = nodes if isinstance(nodes, int) else len(nodes)
    m = edges if isinstance(edges, int) else len(edges)
    if n < 2:
        raise ValueError("edge density needs at least 2 nodes")
    return 2 * m / (n * (n - 1))


def size_ratio(result, g0_nodes):
    return len(result.nodes) / g0_nodes


@dataclass
class GroundTruth:
    communities: list
    dropped: int = 0

    def containing(self, nodes):
        nodes = set(nodes)
        return [c for c in self.communities if nodes <= c]

    def best_f1(self, found, query):
        """Best ``(prec, recall, f1)`` over communities holding every query node,
        or None if no community does."""
        scores = [f1(found, c) for c in self.containing(query)]
        return max(scores, key=lambda s: s[2]) if scores else None


def load_ground_truth(stream, known=None):
    """Read SNAP ``cmty`` lines. Ids failing ``known`` are dropped and counted."""
    communities = []
    dropped = 0
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        ids = [int(tok) for tok in line.split()]
        if known is not None:
            kept = [x for x in ids if known(x)]
            dropped += len(ids) - len(kept)
            ids = kept
        if ids:
            communities.append(frozenset(ids))
    return GroundTruth(communities, dropped)


@dataclass
class WorkloadParams:
    size: int = 3
    degree_rank: float = 0.8
    inter_distance: int = 2
    count: int = 100
    seed: int = 0
    unique_truth: bool = False

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("query size must be >= 1")
        if not 0 < self.degree_rank <= 1:
            raise ValueError("degree rank must be in (0, 1]")
        if self.inter_distance < 1:
            raise ValueError("inter-distance must be >= 1")


def rank_candidates(g, fraction):
    """Nodes inside the top ``fraction`` by degree; ties at the cut are kept."""
    degrees = sorted((g.degree(v) for v in g.nodes()), reverse=True)
    degrees = [d for d in degrees if d > 0]
    if not degrees:
        return []
    cut = degrees[max(1, math.ceil(fraction * len(degrees))) - 1]
    return [v for v in g.nodes() if g.degree(v) >= cut and g.degree(v) > 0]


def bounded_bfs(g, src, depth):
    dist = {src: 0}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if dist[v] == depth:
            continue
        for u in g.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def within_distance(g, nodes, limit):
    nodes = list(nodes)
    for i, a in enumerate(nodes[:-1]):
        reach = bounded_bfs(g, a, limit)
        if any(b not in reach for b in nodes[i + 1:]):
            return False
    return True


def gen_queries(g, params, truth=None):
    """Seeded query sets (external ids) honouring size, degree rank and
    inter-distance.

    An anchor is drawn from the degree-rank candidates, the rest from
    candidates within ``inter_distance`` hops of it; the draw is kept only if
    every pair is within ``inter_distance`` (so the set is connected).
    """
    rng = np.random.default_rng(params.seed)
    candidates = rank_candidates(g, params.degree_rank)
    in_rank = set(candidates)
    if params.unique_truth and truth is None:
        raise ValueError("unique_truth needs a ground truth")
    out = []
    rejections = 0
    while len(out) < params.count:
        if rejections >= MAX_REJECTIONS or not candidates:
            raise WorkloadInfeasibleError(
                f"{MAX_REJECTIONS} consecutive rejections for {params}")
        anchor = candidates[int(rng.integers(len(candidates)))]
        chosen = [anchor]
        if params.size > 1:
            ball = sorted(v for v in bounded_bfs(g, anchor, params.inter_distance)
                          if v != anchor and v in in_rank)
            if len(ball) < params.size - 1:
                rejections += 1
                continue
            picks = rng.choice(len(ball), size=params.size - 1, replace=False)
            chosen += [ball[int(i)] for i in picks]
        query = sorted(g.external(v) for v in chosen)
        ok = within_distance(g, chosen, params.inter_distance)
        if ok and params.unique_truth:
            ok = len(truth.containing(query)) == 1
        if not ok:
            rejections += 1
            continue
        rejections = 0
        out.append(query)
    return out


def write_workload(stream, queries, params):
    stream.write(f"#seed {params.seed}\n")
    stream.write(f"#params size={params.size} degree_rank={params.degree_rank} "
                 f"inter_distance={params.inter_distance} count={params.count} "
                 f"unique_truth={int(params.unique_truth)}\n")
    for q in queries:
        stream.write(" ".join(map(str, q)) + "\n")


def read_workload(stream):
    """Return ``(queries, meta)``; ``meta`` holds header fields as strings."""
    queries = []
    meta = {}
    for line in stream:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            tag, _, rest = line[1:].partition(" ")
            if tag == "seed":
                meta["seed"] = rest.strip()
            elif tag == "params":
                meta.update(tok.split("=", 1) for tok in rest.split())
            continue
        queries.append([int(tok) for tok in line.split()])
    return queries, meta


@dataclass
class EvalSummary:
    count: int = 0
    ok: int = 0
    partial: int = 0
    no_community: int = 0
    unmatched: int = 0
    mean_precision: float = 0.0
    mean_recall: float = 0.0
    mean_f1: float = 0.0
    mean_diameter: float = 0.0
    mean_density: float = 0.0
    mean_size_ratio: float = 0.0
    per_query: list = field(default_factory=list, repr=False)


def summarize(records, truth=None):
    """Aggregate CLI result records (dicts) into an :class:`EvalSummary`."""
    records = list(records)
    if not records:
        raise ValueError("no results to evaluate")
    s = EvalSummary(count=len(records))
    answered = [r for r in records if r["status"] in ("ok", "partial")]
    s.ok = sum(r["status"] == "ok" for r in records)
    s.partial = sum(r["status"] == "partial" for r in records)
    s.no_community = len(records) - len(answered)
    scores = []
    for r in answered:
        score = truth.best_f1(r["nodes"], r["query"]) if truth is not None else None
        if truth is not None and score is None:
            s.unmatched += 1
            score = (0.0, 0.0, 0.0)
        scores.append(score)
        s.per_query.append(score)
    if answered:
        s.mean_diameter = float(np.mean([r["diameter"] for r in answered]))
        s.mean_density = float(np.mean([r["density"] for r in answered]))
        ratios = [len(r["nodes"]) / r["g0_nodes"] for r in answered if r.get("g0_nodes")]
        s.mean_size_ratio = float(np.mean(ratios)) if ratios else 0.0
    if truth is not None and scores:
        s.mean_precision, s.mean_recall, s.mean_f1 = (float(x) for x in np.mean(scores, axis=0))
    return s
