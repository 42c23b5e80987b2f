"""Greedy kernel placement onto the tile grid.

Hinted kernels are pinned first. Remaining kernels are placed one at a
time: any kernel with an already-placed connection partner goes to the
first free 4-neighbor tile of that partner, otherwise to the first free
tile in row-major order. Tie-breaking is row-major over tiles and
declaration order over kernels, so placement is a pure function of
(graph, platform).

Memory accounting charges every window port 2x its window size (ping-pong
double buffering); scalar stream ports are free. One kernel per tile.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import routines
from .design import RoutineSpec
from .device import PlatformConfig, TileCoord
from .errors import GridFull, HintConflict, HintOutOfBounds, MemoryBudgetExceeded
from .graph import Channel, DataflowGraph

DOUBLE_BUFFER_FACTOR = 2


class ChannelClass(Enum):
    NEIGHBOR = "neighbor"
    NOC_STREAM = "noc_stream"


@dataclass(frozen=True)
class Placement:
    assignment: dict[str, TileCoord]  # kernel name -> tile
    channel_class: dict[Channel, ChannelClass]  # kernel-to-kernel channels

    def tile_of(self, kernel: str) -> TileCoord:
        return self.assignment[kernel]

    def to_json_dict(self) -> dict:
        return {
            name: {"row": tile.row, "col": tile.col}
            for name, tile in sorted(self.assignment.items())
        }


def window_port_count(spec: RoutineSpec) -> int:
    return sum(1 for p in routines.signature(spec.blas_routine) if p.kind.is_window)


def kernel_footprint_bytes(spec: RoutineSpec) -> int:
    """Local-memory bytes for one kernel's window buffers, double buffered."""
    return window_port_count(spec) * DOUBLE_BUFFER_FACTOR * spec.window_size_bytes


def place(graph: DataflowGraph, platform: PlatformConfig) -> Placement:
    kernels = graph.kernels()

    for node in kernels:
        footprint = kernel_footprint_bytes(node.spec)
        if footprint > platform.local_memory_bytes_per_tile:
            raise MemoryBudgetExceeded(
                f"kernel {node.name!r} needs {footprint} B of window buffers, "
                f"tile memory is {platform.local_memory_bytes_per_tile} B"
            )

    assignment: dict[str, TileCoord] = {}
    occupied: set[TileCoord] = set()

    for node in kernels:
        hint = node.spec.placement_hint
        if hint is None:
            continue
        if not platform.in_bounds(hint):
            raise HintOutOfBounds(
                f"kernel {node.name!r} hinted to {hint} outside "
                f"{platform.grid_rows}x{platform.grid_cols} grid"
            )
        if hint in occupied:
            other = next(k for k, t in assignment.items() if t == hint)
            raise HintConflict(f"kernels {other!r} and {node.name!r} both hinted to {hint}")
        assignment[node.name] = hint
        occupied.add(hint)

    # Undirected connection partners, declaration-ordered.
    order = [n.name for n in kernels]
    partners: dict[str, list[str]] = {name: [] for name in order}
    for ch in graph.kernel_channels():
        a, b = ch.producer[0], ch.consumer[0]
        if b not in partners[a]:
            partners[a].append(b)
        if a not in partners[b]:
            partners[b].append(a)
    decl_index = {name: i for i, name in enumerate(order)}
    for name in partners:
        partners[name].sort(key=decl_index.get)

    while len(assignment) < len(order):
        candidate = None
        for name in order:
            if name in assignment:
                continue
            if any(p in assignment for p in partners[name]):
                candidate = name
                break
        if candidate is None:
            candidate = next(name for name in order if name not in assignment)

        tile = _pick_tile(candidate, partners, assignment, occupied, platform)
        assignment[candidate] = tile
        occupied.add(tile)

    channel_class = {
        ch: (
            ChannelClass.NEIGHBOR
            if platform.are_neighbors(assignment[ch.producer[0]], assignment[ch.consumer[0]])
            else ChannelClass.NOC_STREAM
        )
        for ch in graph.kernel_channels()
    }
    return Placement(assignment=assignment, channel_class=channel_class)


def _pick_tile(
    kernel: str,
    partners: dict[str, list[str]],
    assignment: dict[str, TileCoord],
    occupied: set[TileCoord],
    platform: PlatformConfig,
) -> TileCoord:
    for partner in partners[kernel]:
        if partner not in assignment:
            continue
        base = assignment[partner]
        adjacent = [
            TileCoord(base.row + dr, base.col + dc)
            for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0))
        ]
        for tile in sorted(adjacent):
            if platform.in_bounds(tile) and tile not in occupied:
                return tile
    for row in range(platform.grid_rows):
        for col in range(platform.grid_cols):
            tile = TileCoord(row, col)
            if tile not in occupied:
                return tile
    raise GridFull(
        f"no free tile left on the {platform.grid_rows}x{platform.grid_cols} grid "
        f"for kernel {kernel!r}"
    )


# --- memory reporting ----------------------------------------------------------


@dataclass(frozen=True)
class TileMemoryRow:
    tile: TileCoord
    kernel: str
    window_ports: int
    bytes_used: int
    headroom: int


def memory_report(
    graph: DataflowGraph, placement: Placement, platform: PlatformConfig
) -> tuple[TileMemoryRow, ...]:
    """Per-occupied-tile window-buffer footprint, row-major order."""
    rows = []
    for node in graph.kernels():
        tile = placement.tile_of(node.name)
        used = kernel_footprint_bytes(node.spec)
        rows.append(
            TileMemoryRow(
                tile=tile,
                kernel=node.name,
                window_ports=window_port_count(node.spec),
                bytes_used=used,
                headroom=platform.local_memory_bytes_per_tile - used,
            )
        )
    return tuple(sorted(rows, key=lambda r: r.tile))
