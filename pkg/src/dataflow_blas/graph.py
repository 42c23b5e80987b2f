"""Lowering a routine set into a typed dataflow graph.

Each routine becomes one compute node. Ports not wired to another kernel
get a programmable-logic mover (off-chip load/store) or, when listed in
``on_chip_generate``, an on-chip generator (ramp source for inputs, sink
for outputs). Construction is deterministic: kernels in declaration
order, ports in catalog order, so equal specs yield identical graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from . import routines
from .design import RoutineSpec, RoutineSpecSet
from .device import PlatformConfig
from .errors import ConflictingGenerator, CyclicComposition
from .routines import Direction, PortKind


class NodeKind(Enum):
    AIE_KERNEL = "aie_kernel"
    PL_MOVER_IN = "pl_mover_in"
    PL_MOVER_OUT = "pl_mover_out"
    ON_CHIP_GENERATOR = "on_chip_generator"


@dataclass(frozen=True)
class Node:
    name: str
    kind: NodeKind
    spec: RoutineSpec | None = None  # kernels only
    kernel: str | None = None  # movers/generators: the kernel they serve
    port: str | None = None  # movers/generators: the served port

    @property
    def routine(self) -> str | None:
        return self.spec.blas_routine if self.spec is not None else None


@dataclass(frozen=True)
class Channel:
    producer: tuple[str, str]  # (node name, port name)
    consumer: tuple[str, str]
    kind: PortKind
    element: str
    window_bytes: int | None  # None for scalar streams

    @property
    def is_window(self) -> bool:
        return self.kind.is_window


# Port name movers and generators expose on their single channel.
AUX_PORT = "data"


@dataclass(frozen=True)
class DataflowGraph:
    nodes: tuple[Node, ...]
    channels: tuple[Channel, ...]
    kernel_order: tuple[str, ...]  # topological over AIE-kernel nodes
    platform: PlatformConfig

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def kernels(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.AIE_KERNEL)

    def movers_in(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.PL_MOVER_IN)

    def movers_out(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.PL_MOVER_OUT)

    def generators(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.ON_CHIP_GENERATOR)

    def channel_into(self, node: str, port: str) -> Channel:
        for ch in self.channels:
            if ch.consumer == (node, port):
                return ch
        raise KeyError(f"{node}.{port} has no incoming channel")

    def channels_from(self, node: str, port: str | None = None) -> tuple[Channel, ...]:
        return tuple(
            ch
            for ch in self.channels
            if ch.producer[0] == node and (port is None or ch.producer[1] == port)
        )

    def kernel_channels(self) -> tuple[Channel, ...]:
        """Kernel-to-kernel channels only (the composition edges)."""
        kernel_names = {n.name for n in self.kernels()}
        return tuple(
            ch
            for ch in self.channels
            if ch.producer[0] in kernel_names and ch.consumer[0] in kernel_names
        )


def mover_in_name(kernel: str, port: str) -> str:
    return f"{kernel}_{port}_in"


def mover_out_name(kernel: str, port: str) -> str:
    return f"{kernel}_{port}_out"


def generator_name(kernel: str, port: str) -> str:
    return f"{kernel}_{port}_gen"


def _channel_for(spec: RoutineSpec, port: routines.PortSignature) -> tuple[PortKind, str, int | None]:
    window = spec.window_size_bytes if port.kind.is_window else None
    return port.kind, spec.data_type, window


def build_graph(spec_set: RoutineSpecSet) -> DataflowGraph:
    """Lower a validated spec set; assumes validate_connections was clean."""
    specs = spec_set.routines
    by_name = {s.kernel_name: s for s in specs}

    # Which ports are wired kernel-to-kernel, on both sides.
    connected_inputs: set[tuple[str, str]] = set()
    consumers_of: dict[tuple[str, str], list[tuple[str, str]]] = {}
    for spec in specs:
        for port_name, ref in spec.connections:
            producer_name, producer_port = ref.split(".", 1)
            connected_inputs.add((spec.kernel_name, port_name))
            consumers_of.setdefault((producer_name, producer_port), []).append(
                (spec.kernel_name, port_name)
            )

    for spec in specs:
        for port_name in sorted(spec.on_chip_generate):
            key = (spec.kernel_name, port_name)
            if key in connected_inputs or key in consumers_of:
                raise ConflictingGenerator(
                    f"{spec.kernel_name}.{port_name} is both connected and on_chip_generate"
                )

    kernel_order = _topological_kernel_order(specs)

    nodes: list[Node] = [
        Node(name=s.kernel_name, kind=NodeKind.AIE_KERNEL, spec=s) for s in specs
    ]
    channels: list[Channel] = []

    for spec in specs:
        kname = spec.kernel_name
        for port in routines.signature(spec.blas_routine):
            kind, element, window = _channel_for(spec, port)
            if port.direction is Direction.INPUT:
                if (kname, port.name) in connected_inputs:
                    ref = spec.connection_for(port.name)
                    producer_name, producer_port = ref.split(".", 1)
                    # window granularity is the consumer's
                    channels.append(
                        Channel(
                            producer=(producer_name, producer_port),
                            consumer=(kname, port.name),
                            kind=kind,
                            element=element,
                            window_bytes=window,
                        )
                    )
                elif port.name in spec.on_chip_generate:
                    gen = Node(
                        name=generator_name(kname, port.name),
                        kind=NodeKind.ON_CHIP_GENERATOR,
                        kernel=kname,
                        port=port.name,
                    )
                    nodes.append(gen)
                    channels.append(
                        Channel(
                            producer=(gen.name, AUX_PORT),
                            consumer=(kname, port.name),
                            kind=kind,
                            element=element,
                            window_bytes=window,
                        )
                    )
                else:
                    mover = Node(
                        name=mover_in_name(kname, port.name),
                        kind=NodeKind.PL_MOVER_IN,
                        kernel=kname,
                        port=port.name,
                    )
                    nodes.append(mover)
                    channels.append(
                        Channel(
                            producer=(mover.name, AUX_PORT),
                            consumer=(kname, port.name),
                            kind=kind,
                            element=element,
                            window_bytes=window,
                        )
                    )
            else:
                if port.name in spec.on_chip_generate:
                    sink = Node(
                        name=generator_name(kname, port.name),
                        kind=NodeKind.ON_CHIP_GENERATOR,
                        kernel=kname,
                        port=port.name,
                    )
                    nodes.append(sink)
                    channels.append(
                        Channel(
                            producer=(kname, port.name),
                            consumer=(sink.name, AUX_PORT),
                            kind=kind,
                            element=element,
                            window_bytes=window,
                        )
                    )
                elif (kname, port.name) not in consumers_of:
                    mover = Node(
                        name=mover_out_name(kname, port.name),
                        kind=NodeKind.PL_MOVER_OUT,
                        kernel=kname,
                        port=port.name,
                    )
                    nodes.append(mover)
                    channels.append(
                        Channel(
                            producer=(kname, port.name),
                            consumer=(mover.name, AUX_PORT),
                            kind=kind,
                            element=element,
                            window_bytes=window,
                        )
                    )
                # connected outputs got their channels on the consumer sweep

    return DataflowGraph(
        nodes=tuple(nodes),
        channels=tuple(channels),
        kernel_order=kernel_order,
        platform=spec_set.platform,
    )


def _topological_kernel_order(specs: tuple[RoutineSpec, ...]) -> tuple[str, ...]:
    index = {s.kernel_name: i for i, s in enumerate(specs)}
    indegree = {s.kernel_name: 0 for s in specs}
    succs: dict[str, list[str]] = {s.kernel_name: [] for s in specs}
    for spec in specs:
        for _, ref in spec.connections:
            producer = ref.split(".", 1)[0]
            if producer in indegree:
                succs[producer].append(spec.kernel_name)
                indegree[spec.kernel_name] += 1

    ready = deque(sorted((k for k, d in indegree.items() if d == 0), key=index.get))
    order: list[str] = []
    while ready:
        k = ready.popleft()
        order.append(k)
        advanced = []
        for s in succs[k]:
            indegree[s] -= 1
            if indegree[s] == 0:
                advanced.append(s)
        for s in sorted(advanced, key=index.get):
            ready.append(s)
    if len(order) != len(specs):
        stuck = sorted(k for k, d in indegree.items() if d > 0)
        raise CyclicComposition(f"kernel connections form a cycle through {stuck}")
    return tuple(order)


# --- interface budget ------------------------------------------------------------


@dataclass(frozen=True)
class BudgetReport:
    pl_to_aie: int
    aie_to_pl: int
    pl_to_aie_limit: int
    aie_to_pl_limit: int

    @property
    def violations(self) -> tuple[str, ...]:
        out = []
        if self.pl_to_aie > self.pl_to_aie_limit:
            out.append(
                f"PL->AIE channels {self.pl_to_aie} exceed limit {self.pl_to_aie_limit}"
            )
        if self.aie_to_pl > self.aie_to_pl_limit:
            out.append(
                f"AIE->PL channels {self.aie_to_pl} exceed limit {self.aie_to_pl_limit}"
            )
        return tuple(out)

    @property
    def ok(self) -> bool:
        return not self.violations


def interface_budget(graph: DataflowGraph, platform: PlatformConfig) -> BudgetReport:
    movers_in = {n.name for n in graph.movers_in()}
    movers_out = {n.name for n in graph.movers_out()}
    pl_to_aie = sum(1 for ch in graph.channels if ch.producer[0] in movers_in)
    aie_to_pl = sum(1 for ch in graph.channels if ch.consumer[0] in movers_out)
    return BudgetReport(
        pl_to_aie=pl_to_aie,
        aie_to_pl=aie_to_pl,
        pl_to_aie_limit=platform.pl_to_aie_streams,
        aie_to_pl_limit=platform.aie_to_pl_streams,
    )


# --- visualization -----------------------------------------------------------------


_DOT_SHAPES = {
    NodeKind.AIE_KERNEL: "box",
    NodeKind.PL_MOVER_IN: "ellipse",
    NodeKind.PL_MOVER_OUT: "ellipse",
    NodeKind.ON_CHIP_GENERATOR: "diamond",
}


def to_dot(graph: DataflowGraph) -> str:
    """Deterministic GraphViz rendering of the dataflow graph."""
    lines = ["digraph dataflow {", "  rankdir=LR;"]
    for node in graph.nodes:
        label = node.name
        if node.kind is NodeKind.AIE_KERNEL:
            label = f"{node.name}\\n{node.routine}<{node.spec.data_type}>"
        lines.append(f'  "{node.name}" [shape={_DOT_SHAPES[node.kind]}, label="{label}"];')
    for ch in graph.channels:
        attrs = []
        if ch.is_window:
            attrs.append(f'label="{ch.window_bytes}B"')
        else:
            attrs.append("style=dashed")
        lines.append(
            f'  "{ch.producer[0]}" -> "{ch.consumer[0]}" [{", ".join(attrs)}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
