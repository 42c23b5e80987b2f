"""Functional execution of a dataflow graph at window granularity.

Kernels run in topological order; window ports move data in chunks of
``window_size_bytes`` (the last chunk may be partial) with reduction
accumulators carried across chunks in the element type, so results are
bit-identical for any valid window size. Scalar ports move single stream
elements. Vector lengths are solved from the bound inputs; ports fed by
on-chip generators take the inferred length and fall back to
``default_length`` when nothing constrains them.

Generated data is a deterministic ramp: element i holds i mod 251 (a
scalar is ramp element 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import routines
from .errors import IntegerOverflow, LengthMismatch, ShapeMismatch, UnboundInput
from .graph import AUX_PORT, Channel, DataflowGraph
from .routines import PortKind

DEFAULT_GENERATOR_LENGTH = 256
RAMP_MODULUS = 251

DataBinding = dict  # mover/generator node name -> scalar, vector, or matrix


@dataclass(frozen=True)
class ChannelTraffic:
    channel: Channel
    elements_produced: int
    elements_consumed: int
    transactions: int  # window transactions, or stream elements


@dataclass(frozen=True)
class SimTrace:
    traffic: tuple[ChannelTraffic, ...]
    node_window_transactions: dict[str, int]
    node_stream_elements: dict[str, int]

    def conservation_ok(self) -> bool:
        return all(t.elements_produced == t.elements_consumed for t in self.traffic)


# --- shape inference ---------------------------------------------------------


class _LengthVars:
    """Union-find over per-port length variables with concrete pinning."""

    def __init__(self):
        self._parent: dict[tuple, tuple] = {}
        self._value: dict[tuple, int] = {}

    def _root(self, key: tuple) -> tuple:
        self._parent.setdefault(key, key)
        while self._parent[key] != key:
            self._parent[key] = self._parent[self._parent[key]]
            key = self._parent[key]
        return key

    def unify(self, a: tuple, b: tuple) -> None:
        ra, rb = self._root(a), self._root(b)
        if ra == rb:
            return
        va, vb = self._value.get(ra), self._value.get(rb)
        if va is not None and vb is not None and va != vb:
            raise ShapeMismatch(f"conflicting lengths {va} and {vb} for {a} / {b}")
        self._parent[rb] = ra
        if va is None and vb is not None:
            self._value[ra] = vb

    def pin(self, key: tuple, value: int) -> None:
        root = self._root(key)
        existing = self._value.get(root)
        if existing is not None and existing != value:
            raise ShapeMismatch(f"port {key} bound to length {value}, expected {existing}")
        self._value[root] = value

    def get(self, key: tuple, fallback: int) -> int:
        return self._value.get(self._root(key), fallback)


def _port_axes(kind: PortKind, kernel: str, port: str) -> tuple[tuple, ...]:
    if kind is PortKind.VECTOR_WINDOW:
        return ((kernel, port, "len"),)
    if kind is PortKind.MATRIX_WINDOW:
        return ((kernel, port, "rows"), (kernel, port, "cols"))
    return ()


_KERNEL_SHAPE_TIES = {
    # pairs of port axes that must agree, per routine
    "axpy": ((("x", "len"), ("y", "len")), (("x", "len"), ("z", "len"))),
    "dot": ((("x", "len"), ("y", "len")),),
    "gemv": (
        (("A", "rows"), ("y", "len")),
        (("A", "rows"), ("z", "len")),
        (("A", "cols"), ("x", "len")),
    ),
}


def _solve_lengths(graph: DataflowGraph, bindings: DataBinding) -> _LengthVars:
    vars_ = _LengthVars()
    for node in graph.kernels():
        for (pa, aa), (pb, ab) in _KERNEL_SHAPE_TIES[node.routine]:
            vars_.unify((node.name, pa, aa), (node.name, pb, ab))
    for ch in graph.kernel_channels():
        for axis_a, axis_b in zip(
            _port_axes(ch.kind, *ch.producer), _port_axes(ch.kind, *ch.consumer)
        ):
            vars_.unify(axis_a, axis_b)

    for node in graph.movers_in():
        if node.name not in bindings:
            continue
        ch = graph.channels_from(node.name)[0]
        kernel, port = ch.consumer
        value = np.asarray(bindings[node.name])
        if ch.kind is PortKind.VECTOR_WINDOW:
            if value.ndim != 1:
                raise ShapeMismatch(f"{node.name}: expected a vector, got shape {value.shape}")
            vars_.pin((kernel, port, "len"), value.shape[0])
        elif ch.kind is PortKind.MATRIX_WINDOW:
            if value.ndim != 2:
                raise ShapeMismatch(f"{node.name}: expected a matrix, got shape {value.shape}")
            vars_.pin((kernel, port, "rows"), value.shape[0])
            vars_.pin((kernel, port, "cols"), value.shape[1])
    return vars_


# --- ramp generation ------------------------------------------------------------


def ramp(count: int, data_type: str) -> np.ndarray:
    values = np.arange(count, dtype=np.int64) % RAMP_MODULUS
    if data_type == "f32":
        return values.astype(np.float32)
    return values


# --- traffic accounting ------------------------------------------------------------


class _Traffic:
    def __init__(self, graph: DataflowGraph):
        self.produced: dict[Channel, int] = {ch: 0 for ch in graph.channels}
        self.consumed: dict[Channel, int] = {ch: 0 for ch in graph.channels}

    def element_count(self, value) -> int:
        arr = np.asarray(value)
        return int(arr.size)

    def produce(self, ch: Channel, value) -> None:
        self.produced[ch] += self.element_count(value)

    def consume(self, ch: Channel, value) -> None:
        self.consumed[ch] += self.element_count(value)

    def finish(self, graph: DataflowGraph) -> SimTrace:
        records = []
        node_windows: dict[str, int] = {n.name: 0 for n in graph.nodes}
        node_streams: dict[str, int] = {n.name: 0 for n in graph.nodes}
        for ch in graph.channels:
            elems = self.produced[ch]
            if ch.is_window:
                epw = ch.window_bytes // routines.ELEMENT_BYTES[ch.element]
                txns = math.ceil(elems / epw) if elems else 0
                node_windows[ch.producer[0]] += txns
                node_windows[ch.consumer[0]] += txns
            else:
                txns = elems
                node_streams[ch.producer[0]] += txns
                node_streams[ch.consumer[0]] += txns
            records.append(
                ChannelTraffic(
                    channel=ch,
                    elements_produced=self.produced[ch],
                    elements_consumed=self.consumed[ch],
                    transactions=txns,
                )
            )
        return SimTrace(
            traffic=tuple(records),
            node_window_transactions=node_windows,
            node_stream_elements=node_streams,
        )


# --- windowed kernel arithmetic -----------------------------------------------------


def _window_chunks(arr: np.ndarray, elems_per_window: int):
    flat = arr.reshape(-1)
    for start in range(0, len(flat), elems_per_window):
        yield flat[start : start + elems_per_window]


def _checked_i32(value: int, context: str) -> int:
    if not (-(2**31) <= value <= 2**31 - 1):
        raise IntegerOverflow(f"i32 overflow in {context}: {value}")
    return value


def _run_axpy(spec, alpha, x, y):
    epw = spec.window_elements
    out_chunks = []
    if spec.data_type == "f32":
        a = np.float32(alpha)
        for xc, yc in zip(_window_chunks(x, epw), _window_chunks(y, epw)):
            out_chunks.append(a * xc + yc)
    else:
        a = int(alpha)
        for xc, yc in zip(_window_chunks(x, epw), _window_chunks(y, epw)):
            zc = np.empty(len(xc), dtype=np.int64)
            for i in range(len(xc)):
                t = _checked_i32(a * int(xc[i]), "axpy scale")
                zc[i] = _checked_i32(t + int(yc[i]), "axpy add")
            out_chunks.append(zc)
    dtype = np.float32 if spec.data_type == "f32" else np.int64
    return np.concatenate(out_chunks) if out_chunks else np.empty(0, dtype=dtype)


def _fold_chunk_f32(acc: np.float32, products: np.ndarray) -> np.float32:
    # left fold in float32, carrying acc across window boundaries
    seq = np.concatenate((np.asarray([acc], dtype=np.float32), products))
    return np.add.accumulate(seq)[-1]


def _run_dot(spec, x, y):
    epw = spec.window_elements
    if spec.data_type == "f32":
        acc = np.float32(0.0)
        for xc, yc in zip(_window_chunks(x, epw), _window_chunks(y, epw)):
            acc = _fold_chunk_f32(acc, xc * yc)
        return acc
    acc = 0
    for xc, yc in zip(_window_chunks(x, epw), _window_chunks(y, epw)):
        for i in range(len(xc)):
            p = _checked_i32(int(xc[i]) * int(yc[i]), "dot product term")
            acc = _checked_i32(acc + p, "dot accumulation")
    return acc


def _run_gemv(spec, alpha, a_mat, x, beta, y):
    m, n = a_mat.shape
    if len(x) != n or len(y) != m:
        raise ShapeMismatch(
            f"gemv kernel {spec.kernel_name!r}: A is {m}x{n} but |x|={len(x)}, |y|={len(y)}"
        )
    if spec.data_type == "f32":
        al, be = np.float32(alpha), np.float32(beta)
        row_accs = np.empty(m, dtype=np.float32)
        for i in range(m):
            row_accs[i] = _fold_chunk_f32(np.float32(0.0), a_mat[i] * x)
        return (al * row_accs + be * y).astype(np.float32)
    al, be = int(alpha), int(beta)
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        acc = 0
        for j in range(n):
            p = _checked_i32(int(a_mat[i, j]) * int(x[j]), "gemv product term")
            acc = _checked_i32(acc + p, "gemv accumulation")
        t = _checked_i32(al * acc, "gemv scale")
        u = _checked_i32(be * int(y[i]), "gemv beta term")
        out[i] = _checked_i32(t + u, "gemv add")
    return out


# --- the sweep ----------------------------------------------------------------------


def _coerce_for_port(value, kind: PortKind, data_type: str, where: str):
    try:
        if kind is PortKind.SCALAR_STREAM:
            return routines.as_scalar(value, data_type)
        if kind is PortKind.VECTOR_WINDOW:
            return routines.as_vector(value, data_type)
        return routines.as_matrix(value, data_type)
    except LengthMismatch as exc:
        raise ShapeMismatch(f"{where}: {exc}") from exc


def simulate(
    graph: DataflowGraph,
    placement=None,
    bindings: DataBinding | None = None,
    *,
    default_length: int = DEFAULT_GENERATOR_LENGTH,
) -> tuple[dict, SimTrace]:
    """Run the graph on bound data; returns (outputs, trace).

    `bindings` maps input-mover node names to host data. `placement` is
    accepted for interface symmetry; functional results do not depend on
    tile assignment.
    """
    bindings = bindings or {}
    if placement is not None:
        for node in graph.kernels():
            if node.name not in placement.assignment:
                raise ShapeMismatch(f"placement does not cover kernel {node.name!r}")

    known = {n.name for n in graph.movers_in()} | {
        n.name for n in graph.generators()
    }
    unknown = set(bindings) - known
    if unknown:
        raise UnboundInput(f"bindings name unknown input node(s): {sorted(unknown)}")

    lengths = _solve_lengths(graph, bindings)
    traffic = _Traffic(graph)
    values: dict[tuple[str, str], object] = {}

    # sources: PL input movers and input-side generators
    for node in graph.movers_in():
        if node.name not in bindings:
            raise UnboundInput(f"input mover {node.name!r} has no bound data")
        ch = graph.channels_from(node.name)[0]
        value = _coerce_for_port(bindings[node.name], ch.kind, ch.element, node.name)
        values[(node.name, AUX_PORT)] = value
        traffic.produce(ch, value)

    for node in graph.generators():
        chans = graph.channels_from(node.name)
        if not chans:
            continue  # output-side sink; handled after kernels
        ch = chans[0]
        kernel, port = ch.consumer
        if ch.kind is PortKind.SCALAR_STREAM:
            value = routines.as_scalar(ramp(1, ch.element)[0], ch.element)
        elif ch.kind is PortKind.VECTOR_WINDOW:
            n = lengths.get((kernel, port, "len"), default_length)
            value = ramp(n, ch.element)
        else:
            rows = lengths.get((kernel, port, "rows"), default_length)
            cols = lengths.get((kernel, port, "cols"), default_length)
            value = ramp(rows * cols, ch.element).reshape(rows, cols)
        values[(node.name, AUX_PORT)] = value
        traffic.produce(ch, value)

    # kernels, topologically
    for kname in graph.kernel_order:
        node = graph.node(kname)
        spec = node.spec
        inputs = {}
        for port in routines.input_ports(spec.blas_routine):
            ch = graph.channel_into(kname, port.name)
            value = values[ch.producer]
            value = _coerce_for_port(value, port.kind, spec.data_type, f"{kname}.{port.name}")
            traffic.consume(ch, value)
            inputs[port.name] = value

        if spec.blas_routine == "axpy":
            if len(inputs["x"]) != len(inputs["y"]):
                raise ShapeMismatch(
                    f"axpy kernel {kname!r}: |x|={len(inputs['x'])} != |y|={len(inputs['y'])}"
                )
            outputs = {"z": _run_axpy(spec, inputs["alpha"], inputs["x"], inputs["y"])}
        elif spec.blas_routine == "dot":
            if len(inputs["x"]) != len(inputs["y"]):
                raise ShapeMismatch(
                    f"dot kernel {kname!r}: |x|={len(inputs['x'])} != |y|={len(inputs['y'])}"
                )
            outputs = {"result": _run_dot(spec, inputs["x"], inputs["y"])}
        else:
            outputs = {
                "z": _run_gemv(
                    spec, inputs["alpha"], inputs["A"], inputs["x"], inputs["beta"], inputs["y"]
                )
            }

        for port_name, value in outputs.items():
            values[(kname, port_name)] = value
            for ch in graph.channels_from(kname, port_name):
                traffic.produce(ch, value)

    # drains: PL output movers and output-side sinks
    results: dict[str, object] = {}
    for node in graph.movers_out():
        ch = graph.channel_into(node.name, AUX_PORT)
        value = values[ch.producer]
        traffic.consume(ch, value)
        results[node.name] = value
    for node in graph.generators():
        if graph.channels_from(node.name):
            continue  # input-side source
        ch = graph.channel_into(node.name, AUX_PORT)
        traffic.consume(ch, values[ch.producer])

    return results, traffic.finish(graph)


# --- oracle cross-checking --------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    cases: int
    passed: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.passed == self.cases


def reference_outputs(graph: DataflowGraph, bindings: DataBinding) -> dict:
    """Whole-array composition of the catalog reference over the kernel DAG.

    The independent check for simulate(): no windowing, reference
    semantics applied kernel by kernel in topological order.
    """
    values: dict[tuple[str, str], object] = {}
    lengths = _solve_lengths(graph, bindings)
    for node in graph.movers_in():
        if node.name not in bindings:
            raise UnboundInput(f"input mover {node.name!r} has no bound data")
        values[(node.name, AUX_PORT)] = bindings[node.name]
    for node in graph.generators():
        chans = graph.channels_from(node.name)
        if not chans:
            continue
        ch = chans[0]
        kernel, port = ch.consumer
        if ch.kind is PortKind.SCALAR_STREAM:
            value = ramp(1, ch.element)[0]
        elif ch.kind is PortKind.VECTOR_WINDOW:
            value = ramp(lengths.get((kernel, port, "len"), DEFAULT_GENERATOR_LENGTH), ch.element)
        else:
            rows = lengths.get((kernel, port, "rows"), DEFAULT_GENERATOR_LENGTH)
            cols = lengths.get((kernel, port, "cols"), DEFAULT_GENERATOR_LENGTH)
            value = ramp(rows * cols, ch.element).reshape(rows, cols)
        values[(node.name, AUX_PORT)] = value

    for kname in graph.kernel_order:
        spec = graph.node(kname).spec
        inputs = {
            port.name: values[graph.channel_into(kname, port.name).producer]
            for port in routines.input_ports(spec.blas_routine)
        }
        outputs = routines.apply_reference(spec.blas_routine, inputs, spec.data_type)
        for port_name, value in outputs.items():
            values[(kname, port_name)] = value

    return {
        node.name: values[graph.channel_into(node.name, AUX_PORT).producer]
        for node in graph.movers_out()
    }


def _random_binding_like(rng: np.random.Generator, value, data_type: str):
    arr = np.asarray(value)
    if data_type == "f32":
        if arr.ndim == 0:
            return float(rng.uniform(-1.0, 1.0))
        return rng.uniform(-1.0, 1.0, size=arr.shape).astype(np.float32)
    if arr.ndim == 0:
        return int(rng.integers(-100, 101))
    return rng.integers(-100, 101, size=arr.shape).astype(np.int64)


def check_against_oracle(
    graph: DataflowGraph,
    bindings: DataBinding,
    seed_count: int,
    placement=None,
    seed: int = 2024,
) -> OracleReport:
    """Rerandomize the given bindings N times; compare simulate() to the
    composed reference. f32 at relative tolerance 1e-5, i32 exact."""
    element_of = {}
    for node in graph.movers_in():
        element_of[node.name] = graph.channels_from(node.name)[0].element

    failures = []
    for case in range(seed_count):
        rng = np.random.default_rng(seed + case)
        case_bindings = {
            name: _random_binding_like(rng, value, element_of[name])
            for name, value in bindings.items()
        }
        outputs, trace = simulate(graph, placement, case_bindings)
        expected = reference_outputs(graph, case_bindings)
        if not trace.conservation_ok():
            failures.append(f"case {case}: channel conservation violated")
            continue
        for name in expected:
            got = np.asarray(outputs[name])
            want = np.asarray(expected[name])
            if element_of_output(graph, name) == "f32":
                ok = np.allclose(got, want, rtol=1e-5, atol=0.0)
            else:
                ok = np.array_equal(got, want)
            if not ok:
                failures.append(f"case {case}: output {name!r} mismatch")
    return OracleReport(
        cases=seed_count, passed=seed_count - len(failures), failures=tuple(failures)
    )


def element_of_output(graph: DataflowGraph, mover_name: str) -> str:
    return graph.channel_into(mover_name, AUX_PORT).element
