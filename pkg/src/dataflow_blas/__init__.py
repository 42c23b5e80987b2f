"""Spec-driven BLAS dataflow designs for a tile-grid spatial accelerator model.

Pipeline: parse a JSON routine spec, lower it to a typed dataflow graph,
place kernels on the tile grid, emit deterministic source artifacts,
simulate functionally against the routine catalog, and estimate
performance with a bandwidth/compute roofline model.
"""

from ._version import __version__
from .design import (
    ConnectionDiagnostic,
    RoutineSpec,
    RoutineSpecSet,
    parse_spec,
    to_json_dict,
    to_json_text,
    validate_connections,
)
from .device import PlatformConfig, TileCoord, default_platform
from .graph import BudgetReport, Channel, DataflowGraph, Node, NodeKind, build_graph, interface_budget, to_dot
from .placement import Placement, memory_report, place
from .codegen import GeneratedDesign, emit_design, write_design
from .simulate import SimTrace, check_against_oracle, reference_outputs, simulate
from .perf import DesignVariant, PerfEstimate, compare_variants, estimate, estimate_variant

__all__ = [
    "__version__",
    "BudgetReport",
    "Channel",
    "ConnectionDiagnostic",
    "DataflowGraph",
    "DesignVariant",
    "GeneratedDesign",
    "Node",
    "NodeKind",
    "PerfEstimate",
    "Placement",
    "PlatformConfig",
    "RoutineSpec",
    "RoutineSpecSet",
    "SimTrace",
    "TileCoord",
    "build_graph",
    "check_against_oracle",
    "compare_variants",
    "default_platform",
    "emit_design",
    "estimate",
    "estimate_variant",
    "interface_budget",
    "memory_report",
    "parse_spec",
    "place",
    "reference_outputs",
    "simulate",
    "to_dot",
    "to_json_dict",
    "to_json_text",
    "validate_connections",
    "write_design",
]
