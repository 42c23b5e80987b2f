"""Template-driven emission of the design source tree.

Emits, per compute kernel, one source file in the documented ADF-style
dialect (vectorized window loops); per mover, one programmable-logic
load/store stub; per on-chip generator, a ramp source or sink; plus the
graph definition wiring everything with placement constraints, and a
JSON build manifest naming every artifact.

Output is a pure function of (graph, placement, platform): no
timestamps, no locale, no host paths. Regeneration is byte-identical,
which the golden-file tests rely on.

Tree layout::

    aie/<kernel>.src           compute kernels and on-chip generators
    pl/<mover>.src             programmable-logic data movers
    graph.def                  dataflow graph definition
    design.manifest.json       spec hash, generator version, placement, sources
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jinja2

from ._version import __version__
from .design import RoutineSpecSet, to_json_text
from .device import PlatformConfig
from .errors import IncompleteBinding, NonEmptyOutputDir
from .graph import AUX_PORT, Channel, DataflowGraph, Node, NodeKind
from .placement import Placement
from .routines import PortKind
from .simulate import RAMP_MODULUS

_CTYPE = {"f32": "float", "i32": "int32"}

_env = jinja2.Environment(
    loader=jinja2.FileSystemLoader(Path(__file__).parent / "templates"),
    undefined=jinja2.StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


@dataclass(frozen=True)
class GeneratedDesign:
    files: tuple[tuple[str, str], ...]  # (relative posix path, content)

    @property
    def file_map(self) -> dict[str, str]:
        return dict(self.files)

    @property
    def manifest(self) -> dict:
        return json.loads(self.file_map["design.manifest.json"])


def _render(template: str, **context) -> str:
    try:
        return _env.get_template(template).render(**context)
    except jinja2.UndefinedError as exc:
        raise IncompleteBinding(f"template {template}: {exc}") from exc


def _channel_type(ch: Channel) -> str:
    if ch.kind is PortKind.SCALAR_STREAM:
        return f"stream<{ch.element}>"
    return f"window<{ch.element}>[{ch.window_bytes}B]"


def _kernel_source(node: Node) -> str:
    spec = node.spec
    return _render(
        f"{spec.blas_routine}.src.j2",
        kernel_name=spec.kernel_name,
        ctype=_CTYPE[spec.data_type],
        lanes=spec.lanes,
        window_bytes=spec.window_size_bytes,
        window_elems=spec.window_elements,
    )


def _generator_source(graph: DataflowGraph, node: Node) -> str:
    outgoing = graph.channels_from(node.name)
    is_source = bool(outgoing)
    ch = outgoing[0] if is_source else graph.channel_into(node.name, AUX_PORT)
    ctype = _CTYPE[ch.element]
    if ch.kind is PortKind.SCALAR_STREAM:
        chan_word, loop_count = "stream", 1
        write_call, read_call = "stream_write", "stream_read"
    else:
        kernel_spec = graph.node(node.kernel).spec
        chan_word, loop_count = "window", kernel_spec.window_elements
        write_call, read_call = "window_write", "window_read"
    if is_source:
        return _render(
            "generator_source.src.j2",
            node_name=node.name,
            kernel_name=node.kernel,
            port_name=node.port,
            port_decl=f"output_{chan_word}<{ctype}>",
            ctype=ctype,
            loop_count=loop_count,
            write_call=write_call,
            ramp_modulus=RAMP_MODULUS,
        )
    return _render(
        "generator_sink.src.j2",
        node_name=node.name,
        kernel_name=node.kernel,
        port_name=node.port,
        port_decl=f"input_{chan_word}<{ctype}>",
        loop_count=loop_count,
        read_call=read_call,
    )


def _mover_source(graph: DataflowGraph, node: Node) -> str:
    if node.kind is NodeKind.PL_MOVER_IN:
        ch = graph.channels_from(node.name)[0]
        template = "pl_mover_in.src.j2"
    else:
        ch = graph.channel_into(node.name, AUX_PORT)
        template = "pl_mover_out.src.j2"
    ctype = _CTYPE[ch.element]
    if ch.kind is PortKind.SCALAR_STREAM:
        channel_type = f"stream_channel<{ctype}>"
    else:
        channel_type = f"window_channel<{ctype}, {ch.window_bytes}>"
    return _render(
        template,
        node_name=node.name,
        kernel_name=node.kernel,
        port_name=node.port,
        ctype=ctype,
        channel_type=channel_type,
    )


def _format_count(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(value)


def _endpoint(graph: DataflowGraph, end: tuple[str, str]) -> str:
    node = graph.node(end[0])
    if node.kind is NodeKind.AIE_KERNEL:
        return f"{end[0]}.{end[1]}"
    return end[0]


def _channel_line(graph: DataflowGraph, placement: Placement, ch: Channel) -> str:
    producer = graph.node(ch.producer[0])
    consumer = graph.node(ch.consumer[0])
    if producer.kind is NodeKind.PL_MOVER_IN:
        keyword = "pl_in"
    elif consumer.kind is NodeKind.PL_MOVER_OUT:
        keyword = "pl_out"
    elif producer.kind is NodeKind.ON_CHIP_GENERATOR:
        keyword = "source"
    elif consumer.kind is NodeKind.ON_CHIP_GENERATOR:
        keyword = "sink"
    else:
        keyword = "connect"
    line = (
        f"{keyword:<7} {_endpoint(graph, ch.producer)} -> "
        f"{_endpoint(graph, ch.consumer)} : {_channel_type(ch)}"
    )
    if keyword == "connect":
        line += f"  # {placement.channel_class[ch].value}"
    return line


def _graph_def(graph: DataflowGraph, placement: Placement, platform: PlatformConfig) -> str:
    kernels = [
        {
            "name": node.name,
            "routine": node.routine,
            "element": node.spec.data_type,
            "lanes": node.spec.lanes,
            "window_bytes": node.spec.window_size_bytes,
            "row": placement.tile_of(node.name).row,
            "col": placement.tile_of(node.name).col,
        }
        for node in graph.kernels()
    ]
    channel_lines = [_channel_line(graph, placement, ch) for ch in graph.channels]
    return _render(
        "graph_def.j2",
        platform=platform,
        axi_bandwidth=_format_count(platform.axi_bandwidth_bytes_per_sec),
        clock=_format_count(platform.aie_clock_hz),
        kernels=kernels,
        channel_lines=channel_lines,
    )


def spec_sha256(graph: DataflowGraph, platform: PlatformConfig) -> str:
    spec_set = RoutineSpecSet(
        platform=platform, routines=tuple(n.spec for n in graph.kernels())
    )
    return hashlib.sha256(to_json_text(spec_set).encode("utf-8")).hexdigest()


def emit_design(
    graph: DataflowGraph, placement: Placement, platform: PlatformConfig
) -> GeneratedDesign:
    """Render every artifact for the design; purely functional."""
    files: list[tuple[str, str]] = []
    aie_sources: list[str] = []
    pl_sources: list[str] = []

    for node in graph.nodes:
        if node.kind is NodeKind.AIE_KERNEL:
            path = f"aie/{node.name}.src"
            files.append((path, _kernel_source(node)))
            aie_sources.append(path)
        elif node.kind is NodeKind.ON_CHIP_GENERATOR:
            path = f"aie/{node.name}.src"
            files.append((path, _generator_source(graph, node)))
            aie_sources.append(path)
        else:
            path = f"pl/{node.name}.src"
            files.append((path, _mover_source(graph, node)))
            pl_sources.append(path)

    files.append(("graph.def", _graph_def(graph, placement, platform)))

    manifest = {
        "generator": {"name": "dataflow-blas", "version": __version__},
        "graph_definition": "graph.def",
        "placement": placement.to_json_dict(),
        "sources": {"aie": aie_sources, "pl": pl_sources},
        "spec_sha256": spec_sha256(graph, platform),
    }
    files.append(
        ("design.manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    )
    return GeneratedDesign(files=tuple(files))


def write_design(design: GeneratedDesign, out_dir, force: bool = False) -> int:
    """Materialize the design tree; refuses a non-empty target without force."""
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise NonEmptyOutputDir(
            f"output directory {out} is not empty (use --force to overwrite)"
        )
    count = 0
    for rel_path, content in design.files:
        target = out / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")
        count += 1
    return count
