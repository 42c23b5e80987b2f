"""Tile-grid device model: architectural constants and grid geometry.

The defaults describe a VCK5000-class part: an 8x50 array of vector tiles,
32KB of local memory each, 312 fabric-to-array and 234 array-to-fabric
stream interfaces at 4 GB/s apiece. Everything is overridable so tests can
run exhaustive checks on tiny grids.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True, order=True)
class TileCoord:
    """Zero-based (row, col) position in the tile grid."""

    row: int
    col: int


@dataclass(frozen=True)
class PlatformConfig:
    grid_rows: int = 8
    grid_cols: int = 50
    local_memory_bytes_per_tile: int = 32768
    pl_to_aie_streams: int = 312
    aie_to_pl_streams: int = 234
    axi_bandwidth_bytes_per_sec: float = 4e9
    aie_clock_hz: float = 1e9  # model parameter, not a device claim
    max_vector_width_bits: int = 512

    def __post_init__(self) -> None:
        counts = {
            "grid_rows": self.grid_rows,
            "grid_cols": self.grid_cols,
            "local_memory_bytes_per_tile": self.local_memory_bytes_per_tile,
            "pl_to_aie_streams": self.pl_to_aie_streams,
            "aie_to_pl_streams": self.aie_to_pl_streams,
            "max_vector_width_bits": self.max_vector_width_bits,
        }
        for name, value in counts.items():
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name, value in (
            ("axi_bandwidth_bytes_per_sec", self.axi_bandwidth_bytes_per_sec),
            ("aie_clock_hz", self.aie_clock_hz),
        ):
            if value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        w = self.max_vector_width_bits
        if w < 32 or (w & (w - 1)) != 0:
            raise ValueError(
                f"max_vector_width_bits must be a power of two >= 32, got {w}"
            )

    @property
    def tile_count(self) -> int:
        return self.grid_rows * self.grid_cols

    def in_bounds(self, tile: TileCoord) -> bool:
        return 0 <= tile.row < self.grid_rows and 0 <= tile.col < self.grid_cols

    def are_neighbors(self, a: TileCoord, b: TileCoord) -> bool:
        """True iff the two tiles share an edge (4-neighborhood).

        Diagonals do not count and a tile is never its own neighbor.
        Raises ValueError for out-of-bounds coordinates.
        """
        for t in (a, b):
            if not self.in_bounds(t):
                raise ValueError(f"tile {t} outside {self.grid_rows}x{self.grid_cols} grid")
        return abs(a.row - b.row) + abs(a.col - b.col) == 1

    def with_overrides(self, overrides: dict) -> "PlatformConfig":
        """Rebuild the config with any named field replaced by `overrides`."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown platform field(s): {sorted(unknown)}")
        merged = {f.name: getattr(self, f.name) for f in fields(self)}
        merged.update(overrides)
        return PlatformConfig(**merged)


def default_platform() -> PlatformConfig:
    """The VCK5000-shaped defaults."""
    return PlatformConfig()
