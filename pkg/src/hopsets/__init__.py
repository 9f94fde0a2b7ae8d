"""Deterministic hopsets for weighted undirected graphs.

Build a hopset once, then answer approximate distance queries with
hop-bounded Bellman-Ford over the graph plus the hopset, or extract
approximate shortest-path trees that use only graph edges.
"""
from .builder import Hopset, build_hopset
from .graph import (DistanceVector, Graph, GraphError, bounded_bellman_ford, dijkstra_oracle,
                    load_graph, read_graph)
from .paths import SptResult, extract_spt
from .query import HopsetIndex, mssd, sssd
from .reduction import build_reduced_hopset
from .schedule import ConfigError, ParameterSchedule, compute_schedule
from .serialize import dump_hopset, load_hopset

__all__ = [
    "ConfigError", "DistanceVector", "Graph", "GraphError", "Hopset", "HopsetIndex",
    "ParameterSchedule", "SptResult", "bounded_bellman_ford", "build_hopset",
    "build_reduced_hopset", "compute_schedule", "dijkstra_oracle", "dump_hopset",
    "extract_spt", "load_graph", "load_hopset", "mssd", "read_graph", "sssd",
]
