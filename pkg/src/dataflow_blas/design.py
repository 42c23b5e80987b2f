"""Parsing, defaulting, and validation of the JSON design specification.

Input format (authoritative): a top-level object with an optional
``platform`` override object and a required, non-empty ``routines`` array.
Each routine entry supports exactly these fields::

    blas_routine      required; one of the catalog routines
    kernel_name       required; unique identifier
    data_type         "f32" (default) or "i32"
    vector_width_bits default: platform max_vector_width_bits
    window_size_bytes default: 1024
    placement_hint    optional {"row": r, "col": c}
    connections       object: input port -> "producer_kernel.output_port"
    on_chip_generate  array of port names fed/drained on-chip instead of PL

Unknown fields are hard errors so generated designs stay deterministic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import routines
from .device import PlatformConfig, TileCoord, default_platform
from .errors import (
    BadConnectionRef,
    BadFieldValue,
    BadKernelName,
    BadVectorWidth,
    BadWindowSize,
    DuplicateName,
    MissingRoutines,
    SpecSyntaxError,
    UnknownField,
    UnknownRoutine,
)

_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_CONNECTION_REF = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)$")

DEFAULT_WINDOW_SIZE_BYTES = 1024

_ROUTINE_FIELDS = {
    "blas_routine",
    "kernel_name",
    "data_type",
    "vector_width_bits",
    "window_size_bytes",
    "placement_hint",
    "connections",
    "on_chip_generate",
}


@dataclass(frozen=True)
class RoutineSpec:
    blas_routine: str
    kernel_name: str
    data_type: str = "f32"
    vector_width_bits: int = 512
    window_size_bytes: int = DEFAULT_WINDOW_SIZE_BYTES
    placement_hint: TileCoord | None = None
    # (input_port, "producer.port") pairs in declaration order; a list so a
    # programmatically built spec can express the MultipleProducers fault.
    connections: tuple[tuple[str, str], ...] = ()
    on_chip_generate: frozenset[str] = frozenset()

    @property
    def element_bytes(self) -> int:
        return routines.ELEMENT_BYTES[self.data_type]

    @property
    def lanes(self) -> int:
        return self.vector_width_bits // (self.element_bytes * 8)

    @property
    def window_elements(self) -> int:
        return self.window_size_bytes // self.element_bytes

    def connection_for(self, input_port: str) -> str | None:
        for port_name, ref in self.connections:
            if port_name == input_port:
                return ref
        return None


@dataclass(frozen=True)
class RoutineSpecSet:
    platform: PlatformConfig
    routines: tuple[RoutineSpec, ...]

    def kernel(self, name: str) -> RoutineSpec:
        for spec in self.routines:
            if spec.kernel_name == name:
                return spec
        raise KeyError(name)

    def kernel_names(self) -> tuple[str, ...]:
        return tuple(spec.kernel_name for spec in self.routines)


@dataclass(frozen=True)
class ConnectionDiagnostic:
    kernel: str
    port: str
    code: str  # KindMismatch | TypeMismatch | MultipleProducers | UnresolvedRef
    message: str


# --- JSON plumbing -----------------------------------------------------------


def _reject_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise SpecSyntaxError(f"duplicate JSON key {key!r}")
        obj[key] = value
    return obj


def _require_object(value, what: str) -> dict:
    if not isinstance(value, dict):
        raise BadFieldValue(f"{what} must be a JSON object, got {type(value).__name__}")
    return value


def _require_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadFieldValue(f"{what} must be an integer, got {value!r}")
    return value


def _require_str(value, what: str) -> str:
    if not isinstance(value, str):
        raise BadFieldValue(f"{what} must be a string, got {value!r}")
    return value


# --- parsing -----------------------------------------------------------------


def parse_spec(json_text: str, base_platform: PlatformConfig | None = None) -> RoutineSpecSet:
    """Parse and validate a JSON design spec into a fully defaulted set.

    `base_platform` (e.g. from a platform-override file) replaces the
    built-in defaults; the spec's own ``platform`` object wins over both.
    """
    try:
        raw = json.loads(json_text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(f"malformed JSON: {exc}") from exc

    top = _require_object(raw, "design spec")
    unknown = set(top) - {"platform", "routines"}
    if unknown:
        raise UnknownField(f"unknown top-level field(s): {sorted(unknown)}")

    platform = base_platform if base_platform is not None else default_platform()
    if "platform" in top:
        overrides = _require_object(top["platform"], "platform")
        try:
            platform = platform.with_overrides(overrides)
        except ValueError as exc:
            if "unknown platform field" in str(exc):
                raise UnknownField(str(exc)) from exc
            raise BadFieldValue(str(exc)) from exc

    if "routines" not in top or top["routines"] == []:
        raise MissingRoutines("design must declare at least one routine")
    if not isinstance(top["routines"], list):
        raise BadFieldValue("routines must be an array")

    specs = [_parse_routine(entry, platform) for entry in top["routines"]]

    names = [s.kernel_name for s in specs]
    for name in names:
        if names.count(name) > 1:
            raise DuplicateName(f"kernel_name {name!r} declared more than once")

    spec_set = RoutineSpecSet(platform=platform, routines=tuple(specs))
    _resolve_connection_refs(spec_set)
    return spec_set


def _parse_routine(entry, platform: PlatformConfig) -> RoutineSpec:
    obj = _require_object(entry, "routine entry")
    unknown = set(obj) - _ROUTINE_FIELDS
    if unknown:
        raise UnknownField(f"unknown routine field(s): {sorted(unknown)}")

    if "blas_routine" not in obj:
        raise BadFieldValue("routine entry must set blas_routine")
    kind = _require_str(obj["blas_routine"], "blas_routine")
    if kind not in routines.ROUTINE_NAMES:
        raise UnknownRoutine(f"unknown routine {kind!r}; catalog has {routines.ROUTINE_NAMES}")

    if "kernel_name" not in obj:
        raise BadFieldValue("routine entry must set kernel_name")
    name = _require_str(obj["kernel_name"], "kernel_name")
    if not _IDENTIFIER.match(name):
        raise BadKernelName(f"kernel_name {name!r} is not a valid identifier")

    data_type = _require_str(obj.get("data_type", "f32"), "data_type")
    if data_type not in routines.ELEMENT_BYTES:
        raise BadFieldValue(f"data_type must be one of {sorted(routines.ELEMENT_BYTES)}, got {data_type!r}")
    element_bits = routines.ELEMENT_BYTES[data_type] * 8

    width = _require_int(obj.get("vector_width_bits", platform.max_vector_width_bits), "vector_width_bits")
    if width < element_bits or platform.max_vector_width_bits % width != 0:
        raise BadVectorWidth(
            f"vector_width_bits {width} must divide {platform.max_vector_width_bits} "
            f"and be >= the {element_bits}-bit element width"
        )

    window = _require_int(obj.get("window_size_bytes", DEFAULT_WINDOW_SIZE_BYTES), "window_size_bytes")
    vector_bytes = width // 8
    if window <= 0 or window % vector_bytes != 0:
        raise BadWindowSize(
            f"window_size_bytes {window} must be a positive multiple of {vector_bytes}"
        )

    hint = None
    if "placement_hint" in obj:
        hobj = _require_object(obj["placement_hint"], "placement_hint")
        if set(hobj) != {"row", "col"}:
            raise BadFieldValue("placement_hint must be an object with exactly row and col")
        row = _require_int(hobj["row"], "placement_hint.row")
        col = _require_int(hobj["col"], "placement_hint.col")
        if row < 0 or col < 0:
            raise BadFieldValue("placement_hint coordinates must be non-negative")
        hint = TileCoord(row, col)

    input_names = {p.name for p in routines.input_ports(kind)}
    all_names = {p.name for p in routines.signature(kind)}

    connections: list[tuple[str, str]] = []
    if "connections" in obj:
        cobj = _require_object(obj["connections"], "connections")
        for port_name, ref in cobj.items():
            if port_name not in input_names:
                raise BadConnectionRef(
                    f"kernel {name!r}: {port_name!r} is not an input port of {kind}"
                )
            ref = _require_str(ref, f"connection target for {name}.{port_name}")
            if not _CONNECTION_REF.match(ref):
                raise BadConnectionRef(
                    f"kernel {name!r}: connection target {ref!r} must look like kernel.port"
                )
            connections.append((port_name, ref))

    generate: set[str] = set()
    if "on_chip_generate" in obj:
        glist = obj["on_chip_generate"]
        if not isinstance(glist, list):
            raise BadFieldValue("on_chip_generate must be an array of port names")
        for port_name in glist:
            port_name = _require_str(port_name, "on_chip_generate entry")
            if port_name not in all_names:
                raise BadConnectionRef(
                    f"kernel {name!r}: on_chip_generate names unknown port {port_name!r}"
                )
            generate.add(port_name)

    return RoutineSpec(
        blas_routine=kind,
        kernel_name=name,
        data_type=data_type,
        vector_width_bits=width,
        window_size_bytes=window,
        placement_hint=hint,
        connections=tuple(connections),
        on_chip_generate=frozenset(generate),
    )


def _resolve_connection_refs(spec_set: RoutineSpecSet) -> None:
    by_name = {s.kernel_name: s for s in spec_set.routines}
    for spec in spec_set.routines:
        for port_name, ref in spec.connections:
            producer_name, producer_port = ref.split(".", 1)
            producer = by_name.get(producer_name)
            if producer is None:
                raise BadConnectionRef(
                    f"kernel {spec.kernel_name!r}: connection {port_name} <- {ref}: "
                    f"no kernel named {producer_name!r}"
                )
            out_names = {p.name for p in routines.output_ports(producer.blas_routine)}
            if producer_port not in out_names:
                raise BadConnectionRef(
                    f"kernel {spec.kernel_name!r}: connection {port_name} <- {ref}: "
                    f"{producer.blas_routine} has no output port {producer_port!r}"
                )


# --- connection validation ----------------------------------------------------


def validate_connections(spec_set: RoutineSpecSet) -> list[ConnectionDiagnostic]:
    """Check every declared connection; an empty list means all are wirable.

    Flags kind mismatches (stream vs. vector vs. matrix window), element
    type mismatches, unresolvable references (possible on programmatically
    built sets), and input ports with more than one producer.
    """
    by_name = {s.kernel_name: s for s in spec_set.routines}
    diagnostics: list[ConnectionDiagnostic] = []

    for spec in spec_set.routines:
        seen_ports: set[str] = set()
        for port_name, ref in spec.connections:
            if port_name in seen_ports:
                diagnostics.append(
                    ConnectionDiagnostic(
                        kernel=spec.kernel_name,
                        port=port_name,
                        code="MultipleProducers",
                        message=f"input port {port_name!r} has more than one producer",
                    )
                )
                continue
            seen_ports.add(port_name)

            try:
                consumer_port = routines.port(spec.blas_routine, port_name)
            except UnknownRoutine:
                diagnostics.append(
                    ConnectionDiagnostic(
                        kernel=spec.kernel_name,
                        port=port_name,
                        code="UnresolvedRef",
                        message=f"{spec.blas_routine} has no port {port_name!r}",
                    )
                )
                continue

            producer_name, _, producer_port_name = ref.partition(".")
            producer = by_name.get(producer_name)
            producer_port = None
            if producer is not None:
                try:
                    producer_port = routines.port(producer.blas_routine, producer_port_name)
                except UnknownRoutine:
                    producer_port = None
            if (
                producer is None
                or producer_port is None
                or producer_port.direction is not routines.Direction.OUTPUT
            ):
                diagnostics.append(
                    ConnectionDiagnostic(
                        kernel=spec.kernel_name,
                        port=port_name,
                        code="UnresolvedRef",
                        message=f"connection target {ref!r} does not name an output port",
                    )
                )
                continue

            if producer_port.kind is not consumer_port.kind:
                diagnostics.append(
                    ConnectionDiagnostic(
                        kernel=spec.kernel_name,
                        port=port_name,
                        code="KindMismatch",
                        message=(
                            f"{ref} is a {producer_port.kind.value} but "
                            f"{spec.kernel_name}.{port_name} expects {consumer_port.kind.value}"
                        ),
                    )
                )
            if producer.data_type != spec.data_type:
                diagnostics.append(
                    ConnectionDiagnostic(
                        kernel=spec.kernel_name,
                        port=port_name,
                        code="TypeMismatch",
                        message=(
                            f"{ref} carries {producer.data_type} but "
                            f"{spec.kernel_name} computes in {spec.data_type}"
                        ),
                    )
                )
    return diagnostics


# --- serialization -------------------------------------------------------------


def to_json_dict(spec_set: RoutineSpecSet) -> dict:
    """Fully explicit dict form; parse(to_json_text(s)) == s for valid sets."""
    platform = spec_set.platform
    routines_out = []
    for spec in spec_set.routines:
        entry: dict = {
            "blas_routine": spec.blas_routine,
            "kernel_name": spec.kernel_name,
            "data_type": spec.data_type,
            "vector_width_bits": spec.vector_width_bits,
            "window_size_bytes": spec.window_size_bytes,
        }
        if spec.placement_hint is not None:
            entry["placement_hint"] = {
                "row": spec.placement_hint.row,
                "col": spec.placement_hint.col,
            }
        if spec.connections:
            entry["connections"] = {port: ref for port, ref in spec.connections}
        if spec.on_chip_generate:
            entry["on_chip_generate"] = sorted(spec.on_chip_generate)
        routines_out.append(entry)
    return {
        "platform": {
            "grid_rows": platform.grid_rows,
            "grid_cols": platform.grid_cols,
            "local_memory_bytes_per_tile": platform.local_memory_bytes_per_tile,
            "pl_to_aie_streams": platform.pl_to_aie_streams,
            "aie_to_pl_streams": platform.aie_to_pl_streams,
            "axi_bandwidth_bytes_per_sec": platform.axi_bandwidth_bytes_per_sec,
            "aie_clock_hz": platform.aie_clock_hz,
            "max_vector_width_bits": platform.max_vector_width_bits,
        },
        "routines": routines_out,
    }


def to_json_text(spec_set: RoutineSpecSet) -> str:
    return json.dumps(to_json_dict(spec_set), indent=2, sort_keys=True) + "\n"
