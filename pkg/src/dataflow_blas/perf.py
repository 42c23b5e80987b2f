"""Roofline-style analytic time estimates for a design.

Per kernel node, at problem size n (vector length; matrices are n x n):

    compute_time  = ceil(work_elements / lanes) / aie_clock_hz
    transfer_time = bytes / axi_bandwidth, for each port served by a PL mover
    node_time     = max(compute_time, max transfer_time)

Ports fed on-chip (generator, or a channel from another kernel) move no
AXI traffic. End-to-end:

    pipelined  = max over kernels of node_time, plus a fill overhead of
                 one window's worth of time on the slowest kernel (capped
                 by the other stages' total so a one-window problem
                 degenerates to the stage sum, never beyond it; zero when
                 nothing is composed)
    sequential = sum over kernels of node_time, with every kernel-to-kernel
                 intermediate charged a full DRAM write (producer side)
                 plus read (consumer side) at AXI bandwidth

Only ratios and orderings are meaningful; absolute values are a model,
not a measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from . import routines
from .design import RoutineSpec, RoutineSpecSet
from .device import PlatformConfig
from .errors import NotAPipeline
from .graph import DataflowGraph, NodeKind, build_graph
from .placement import Placement, place
from .routines import Direction, PortKind


class DesignVariant(Enum):
    WITH_PL_MOVERS = "with_pl_movers"
    ON_CHIP_GENERATED = "on_chip_generated"
    DATAFLOW_COMPOSED = "dataflow_composed"
    DRAM_ROUNDTRIP = "dram_roundtrip"


@dataclass(frozen=True)
class PortTransfer:
    port: str
    bytes_moved: int
    seconds: float


@dataclass(frozen=True)
class NodeEstimate:
    kernel: str
    routine: str
    work_elements: int
    lanes: int
    compute_seconds: float
    transfers: tuple[PortTransfer, ...]  # AXI (PL mover) traffic only
    node_seconds: float

    @property
    def transfer_seconds(self) -> float:
        return max((t.seconds for t in self.transfers), default=0.0)

    @property
    def memory_bound(self) -> bool:
        return self.transfer_seconds >= self.compute_seconds


@dataclass(frozen=True)
class PerfEstimate:
    n: int
    nodes: tuple[NodeEstimate, ...]
    fill_seconds: float
    pipelined_seconds: float
    sequential_seconds: float


def _port_elements(kind: PortKind, n: int) -> int:
    if kind is PortKind.SCALAR_STREAM:
        return 1
    if kind is PortKind.VECTOR_WINDOW:
        return n
    return n * n


def _work_elements(routine: str, n: int) -> int:
    # elements the vector unit touches per logical invocation
    return n * n if routine == "gemv" else n


def _node_estimate(
    graph: DataflowGraph,
    spec: RoutineSpec,
    platform: PlatformConfig,
    n: int,
    dram_ports: set[str],
) -> NodeEstimate:
    """`dram_ports` adds DRAM round-trip legs for the sequential variant."""
    kname = spec.kernel_name
    work = _work_elements(spec.blas_routine, n)
    compute = math.ceil(work / spec.lanes) / platform.aie_clock_hz

    mover_ends = {
        node.name
        for node in graph.nodes
        if node.kind in (NodeKind.PL_MOVER_IN, NodeKind.PL_MOVER_OUT)
    }
    transfers = []
    for port in routines.signature(spec.blas_routine):
        if port.direction is Direction.INPUT:
            ch = graph.channel_into(kname, port.name)
            over_axi = ch.producer[0] in mover_ends
        else:
            chans = graph.channels_from(kname, port.name)
            over_axi = any(ch.consumer[0] in mover_ends for ch in chans)
        if not (over_axi or port.name in dram_ports):
            continue
        elems = _port_elements(port.kind, n)
        nbytes = elems * spec.element_bytes
        transfers.append(
            PortTransfer(
                port=port.name,
                bytes_moved=nbytes,
                seconds=nbytes / platform.axi_bandwidth_bytes_per_sec,
            )
        )

    node_seconds = max([compute] + [t.seconds for t in transfers])
    return NodeEstimate(
        kernel=kname,
        routine=spec.blas_routine,
        work_elements=work,
        lanes=spec.lanes,
        compute_seconds=compute,
        transfers=tuple(transfers),
        node_seconds=node_seconds,
    )


def estimate(
    graph: DataflowGraph,
    placement: Placement | None,
    platform: PlatformConfig,
    n: int,
) -> PerfEstimate:
    """Per-node and end-to-end estimates at problem size n (> 0)."""
    if n <= 0:
        raise ValueError(f"problem size must be positive, got {n}")

    kernel_specs = {node.name: node.spec for node in graph.kernels()}
    nodes = tuple(
        _node_estimate(graph, kernel_specs[kname], platform, n, dram_ports=set())
        for kname in graph.kernel_order
    )

    slowest = max(nodes, key=lambda e: e.node_seconds)
    fill = 0.0
    if len(nodes) > 1 and graph.kernel_channels():
        spec = kernel_specs[slowest.kernel]
        port_elems = max(
            _port_elements(p.kind, n)
            for p in routines.signature(spec.blas_routine)
            if p.kind.is_window
        )
        windows = max(1, math.ceil(port_elems / spec.window_elements))
        one_window = slowest.node_seconds / windows
        others = sum(e.node_seconds for e in nodes) - slowest.node_seconds
        fill = min(one_window, others)
    pipelined = slowest.node_seconds + fill

    # sequential: break each kernel-to-kernel channel into a DRAM store+load
    dram_ports: dict[str, set[str]] = {kname: set() for kname in kernel_specs}
    for ch in graph.kernel_channels():
        dram_ports[ch.producer[0]].add(ch.producer[1])
        dram_ports[ch.consumer[0]].add(ch.consumer[1])
    sequential = sum(
        _node_estimate(
            graph, kernel_specs[kname], platform, n, dram_ports=dram_ports[kname]
        ).node_seconds
        for kname in graph.kernel_order
    )

    return PerfEstimate(
        n=n,
        nodes=nodes,
        fill_seconds=fill,
        pipelined_seconds=pipelined,
        sequential_seconds=sequential,
    )


# --- design variants -----------------------------------------------------------


def _no_ports_generated(spec: RoutineSpec) -> RoutineSpec:
    return replace(spec, on_chip_generate=frozenset())


def variant_spec_set(spec_set: RoutineSpecSet, variant: DesignVariant) -> RoutineSpecSet:
    """Rewrite on_chip_generate per variant; composition is untouched."""
    if variant is DesignVariant.WITH_PL_MOVERS:
        specs = tuple(_no_ports_generated(s) for s in spec_set.routines)
    elif variant is DesignVariant.ON_CHIP_GENERATED:
        specs = tuple(_all_ports_generated_connected_aware(spec_set, s) for s in spec_set.routines)
    else:
        specs = spec_set.routines
    return RoutineSpecSet(platform=spec_set.platform, routines=specs)


def _all_ports_generated_connected_aware(
    spec_set: RoutineSpecSet, spec: RoutineSpec
) -> RoutineSpec:
    connected_outputs = {
        ref.split(".", 1)[1]
        for other in spec_set.routines
        for _, ref in other.connections
        if ref.split(".", 1)[0] == spec.kernel_name
    }
    generated = set()
    for p in routines.signature(spec.blas_routine):
        if p.direction is Direction.INPUT:
            if spec.connection_for(p.name) is None:
                generated.add(p.name)
        elif p.name not in connected_outputs:
            generated.add(p.name)
    return replace(spec, on_chip_generate=frozenset(generated))


def estimate_variant(
    spec_set: RoutineSpecSet,
    platform: PlatformConfig,
    n: int,
    variant: DesignVariant,
) -> tuple[PerfEstimate, float]:
    """Estimate for one variant; returns (estimate, design_seconds)."""
    rewritten = variant_spec_set(spec_set, variant)
    graph = build_graph(rewritten)
    placement = place(graph, platform)
    est = estimate(graph, placement, platform, n)
    seconds = (
        est.sequential_seconds
        if variant is DesignVariant.DRAM_ROUNDTRIP
        else est.pipelined_seconds
    )
    return est, seconds


# --- variant comparison -----------------------------------------------------------


@dataclass(frozen=True)
class VariantComparison:
    n: int
    pipelined_seconds: float
    sequential_seconds: float

    @property
    def ratio(self) -> float:
        return self.pipelined_seconds / self.sequential_seconds


def compare_variants(
    spec_set: RoutineSpecSet, platform: PlatformConfig, n: int
) -> VariantComparison:
    """Pipelined (dataflow) versus sequential (DRAM round-trip) time."""
    graph = build_graph(spec_set)
    if not graph.kernel_channels():
        raise NotAPipeline("design has no kernel-to-kernel channel to compare")
    placement = place(graph, platform)
    est = estimate(graph, placement, platform, n)
    return VariantComparison(
        n=n,
        pipelined_seconds=est.pipelined_seconds,
        sequential_seconds=est.sequential_seconds,
    )
