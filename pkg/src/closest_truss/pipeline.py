"""One query in, one JSON-ready result record out, for every algorithm."""
import time

from .errors import CTCError, NoCommunityError, OracleSizeError
from .evaluate import edge_density
from .local import lctc_search
from .oracle import MAX_DECOMPOSE_NODES, oracle_ctc
from .search import QuerySpec, basic_search, bulk_delete_search, find_g0

ALGORITHMS = ("basic", "bd", "lctc", "oracle")

FIELDS = ("query", "algo", "k", "nodes", "edge_count", "diameter", "query_distance",
          "density", "iterations", "elapsed_ms", "status", "g0_nodes")


def _record(spec, algo, **values):
    rec = dict.fromkeys(FIELDS, 0)
    rec.update(query=list(spec.query_nodes), algo=algo, nodes=[], density=0.0,
               status="no_community")
    rec.update(values)
    return rec


def _oracle(g, Q):
    if g.n > MAX_DECOMPOSE_NODES:
        raise OracleSizeError(f"graph has {g.n} nodes, oracle limit is {MAX_DECOMPOSE_NODES}")
    answer = oracle_ctc(g, Q)
    c = answer.witness
    label = g.external
    return dict(
        k=answer.k_opt,
        nodes=sorted(label(v) for v in c.nodes),
        edge_count=len(c.edges),
        diameter=c.diameter,
        query_distance=c.query_distance,
        iterations=0,
    )


def run_query(g, idx, spec, algo, timing=True):
    """Run ``algo`` for ``spec`` and return a result record (a plain dict).

    Failures specific to this query become ``status="no_community"`` with a
    ``reason``; they never propagate.
    """
    started = time.perf_counter()
    try:
        Q = spec.resolve(g)
        if algo == "oracle":
            values = _oracle(g, Q)
            values["g0_nodes"] = find_g0(g, idx, Q)[1].node_count
            values["status"] = "ok"
        else:
            if algo == "basic":
                res = basic_search(g, idx, Q, spec.time_budget)
            elif algo == "bd":
                res = bulk_delete_search(g, idx, Q, spec.time_budget)
            elif algo == "lctc":
                res = lctc_search(g, idx, Q, spec.eta, spec.gamma, spec.time_budget)
            else:
                raise ValueError(f"unknown algorithm {algo!r}")
            g0 = res.g0_nodes
            if algo == "lctc":
                # size ratio is against the global G0, computed outside the timed search
                g0 = find_g0(g, idx, Q)[1].node_count
            values = dict(k=res.k, nodes=list(res.nodes), edge_count=len(res.edges),
                          diameter=res.diameter, query_distance=res.query_distance,
                          iterations=res.iterations, status=res.status, g0_nodes=g0)
            if res.notes:
                values["notes"] = list(res.notes)
    except (NoCommunityError, OracleSizeError) as exc:
        rec = _record(spec, algo, reason=str(exc))
    except CTCError as exc:
        rec = _record(spec, algo, reason=f"{type(exc).__name__}: {exc}")
    else:
        n = len(values["nodes"])
        values["density"] = edge_density(n, values["edge_count"]) if n >= 2 else 0.0
        rec = _record(spec, algo, **values)
    rec["elapsed_ms"] = int((time.perf_counter() - started) * 1000) if timing else 0
    return rec


def make_spec(query, eta, gamma, budget, seed):
    return QuerySpec(tuple(query), eta=eta, gamma=gamma, time_budget=budget, rng_seed=seed)
