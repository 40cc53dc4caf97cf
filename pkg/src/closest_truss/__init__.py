"""Closest truss community search over undirected graphs."""
from .errors import (CTCError, DisconnectedGraphError, EdgeListParseError, IndexFormatError,
                     IndexMismatchError, NoCommunityError, OracleSizeError, WorkloadInfeasibleError)
from .graph import Graph, GraphOverlay, load_edge_list, read_edge_list, snapshot_restore
from .local import lctc_search, steiner_tree, truss_distance
from .search import CommunityResult, QuerySpec, basic_search, bulk_delete_search, find_g0, truss_maintain
from .truss import TrussIndex, build_index, load_index, save_index, truss_decompose

__all__ = [
    "CTCError", "DisconnectedGraphError", "EdgeListParseError", "IndexFormatError",
    "IndexMismatchError", "NoCommunityError", "OracleSizeError", "WorkloadInfeasibleError",
    "Graph", "GraphOverlay", "load_edge_list", "read_edge_list", "snapshot_restore",
    "lctc_search", "steiner_tree", "truss_distance",
    "CommunityResult", "QuerySpec", "basic_search", "bulk_delete_search", "find_g0", "truss_maintain",
    "TrussIndex", "build_index", "load_index", "save_index", "truss_decompose",
]
