"""Continuous multi-query subgraph matching over graph edge streams.

The package provides several observationally equivalent engines (a
trie-clustered incremental matcher, inverted-index baselines, a brute-force
reference), a synthetic workload generator, a benchmarking harness, and a
FastAPI service with a thin CLI on top.
"""

from .core import (
    ANON_VAR,
    EdgePattern,
    EdgeTriple,
    GraphState,
    StreamFormatError,
    StreamOrderError,
    Update,
    generic_keys,
    matches,
    parse_update,
)
from .engines import ENGINE_NAMES, EngineError, make_engine
from .planner import Notification
from .queries import (
    CoveringPath,
    PathDecomposition,
    QueryFormatError,
    QueryGraphPattern,
    covering_paths,
    intersections_of,
    parse_query,
    parse_query_file,
)
from .views import JoinCache, JoinKey, MaterializedView, delta_join, hash_join
from .workload import WorkloadError, WorkloadParams, gen_queries, gen_stream

__version__ = "0.1.0"

__all__ = [
    "ANON_VAR",
    "EdgePattern",
    "EdgeTriple",
    "GraphState",
    "StreamFormatError",
    "StreamOrderError",
    "Update",
    "generic_keys",
    "matches",
    "parse_update",
    "ENGINE_NAMES",
    "EngineError",
    "make_engine",
    "Notification",
    "CoveringPath",
    "PathDecomposition",
    "QueryFormatError",
    "QueryGraphPattern",
    "covering_paths",
    "intersections_of",
    "parse_query",
    "parse_query_file",
    "JoinCache",
    "JoinKey",
    "MaterializedView",
    "delta_join",
    "hash_join",
    "WorkloadError",
    "WorkloadParams",
    "gen_queries",
    "gen_stream",
    "__version__",
]
