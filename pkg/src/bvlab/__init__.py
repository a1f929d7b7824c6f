"""Finite-depth ordered Bratteli diagrams and their Vershik (adic) maps."""
from .diagram import (
    MAX,
    MIN,
    ROOT,
    Edge,
    FinitePath,
    OrderedDiagram,
    Vertex,
    count_paths,
    iter_paths,
    rank_at_depth,
    restrict,
    telescope,
    tower_height,
    validate,
)
from .vershik import count_extreme_paths, orbit, predecessor, successor
from .array import array_window, expand_symbol, render_symbol, render_window, words
from .transform import merge_vertices, split_vertex, verify_certificate
from .analysis import (
    compatible_pair_search,
    expansiveness_witness,
    minimal_closed_subdiagrams,
    minimal_set_bound_check,
    odometer_test,
)
from .corpus import load, load_fixture, save

__version__ = "0.1.0"

__all__ = [
    "MAX",
    "MIN",
    "ROOT",
    "Edge",
    "FinitePath",
    "OrderedDiagram",
    "Vertex",
    "count_paths",
    "iter_paths",
    "rank_at_depth",
    "restrict",
    "telescope",
    "tower_height",
    "validate",
    "count_extreme_paths",
    "orbit",
    "predecessor",
    "successor",
    "array_window",
    "expand_symbol",
    "render_symbol",
    "render_window",
    "words",
    "merge_vertices",
    "split_vertex",
    "verify_certificate",
    "compatible_pair_search",
    "expansiveness_witness",
    "minimal_closed_subdiagrams",
    "minimal_set_bound_check",
    "odometer_test",
    "load",
    "load_fixture",
    "save",
]
