"""Routine catalog: port signatures and exact reference semantics.

This is the single source of truth consumed by the graph builder, the
functional simulator, and the code generator. Reference results use a
fixed accumulation order (sequential, ascending index) in the element
type itself, so they are bit-reproducible and can be compared exactly
against the windowed execution path.

Supported routines:
    axpy  z[i] = alpha * x[i] + y[i]
    dot   result = sum_i x[i] * y[i]
    gemv  z[i] = alpha * (A @ x)[i] + beta * y[i]   (A row-major, m x n)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import IntegerOverflow, LengthMismatch, UnknownRoutine


class PortKind(Enum):
    SCALAR_STREAM = "stream"
    VECTOR_WINDOW = "window_vector"
    MATRIX_WINDOW = "window_matrix"

    @property
    def is_window(self) -> bool:
        return self is not PortKind.SCALAR_STREAM


class Direction(Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class PortSignature:
    name: str
    direction: Direction
    kind: PortKind


def _sig(name: str, direction: Direction, kind: PortKind) -> PortSignature:
    return PortSignature(name, direction, kind)


_IN, _OUT = Direction.INPUT, Direction.OUTPUT
_S, _V, _M = PortKind.SCALAR_STREAM, PortKind.VECTOR_WINDOW, PortKind.MATRIX_WINDOW

# Canonical port order; mover synthesis and codegen follow it.
_SIGNATURES: dict[str, tuple[PortSignature, ...]] = {
    "axpy": (
        _sig("alpha", _IN, _S),
        _sig("x", _IN, _V),
        _sig("y", _IN, _V),
        _sig("z", _OUT, _V),
    ),
    "dot": (
        _sig("x", _IN, _V),
        _sig("y", _IN, _V),
        _sig("result", _OUT, _S),
    ),
    "gemv": (
        _sig("alpha", _IN, _S),
        _sig("A", _IN, _M),
        _sig("x", _IN, _V),
        _sig("beta", _IN, _S),
        _sig("y", _IN, _V),
        _sig("z", _OUT, _V),
    ),
}

ROUTINE_NAMES: tuple[str, ...] = tuple(_SIGNATURES)

# Element types supported by the catalog, with byte widths.
ELEMENT_BYTES: dict[str, int] = {"f32": 4, "i32": 4}

_I32_MIN, _I32_MAX = -(2**31), 2**31 - 1


def signature(kind: str) -> tuple[PortSignature, ...]:
    """Port signature of a catalog routine, in canonical order."""
    try:
        return _SIGNATURES[kind]
    except KeyError:
        raise UnknownRoutine(f"unknown routine {kind!r}; catalog has {ROUTINE_NAMES}") from None


def port(kind: str, name: str) -> PortSignature:
    for p in signature(kind):
        if p.name == name:
            return p
    raise UnknownRoutine(f"routine {kind!r} has no port {name!r}")


def input_ports(kind: str) -> tuple[PortSignature, ...]:
    return tuple(p for p in signature(kind) if p.direction is Direction.INPUT)


def output_ports(kind: str) -> tuple[PortSignature, ...]:
    return tuple(p for p in signature(kind) if p.direction is Direction.OUTPUT)


# --- value coercion ----------------------------------------------------------


def _checked_i32(value: int, context: str) -> int:
    if not (_I32_MIN <= value <= _I32_MAX):
        raise IntegerOverflow(f"i32 overflow in {context}: {value}")
    return value


def as_scalar(value, data_type: str):
    if data_type == "f32":
        return np.float32(value)
    return _checked_i32(int(value), "scalar input")


def as_vector(value, data_type: str) -> np.ndarray:
    arr = np.asarray(value)
    if arr.ndim != 1:
        raise LengthMismatch(f"expected a vector, got shape {arr.shape}")
    if data_type == "f32":
        return arr.astype(np.float32)
    out = arr.astype(np.int64)
    for v in out:
        _checked_i32(int(v), "vector input")
    return out


def as_matrix(value, data_type: str) -> np.ndarray:
    arr = np.asarray(value)
    if arr.ndim != 2:
        raise LengthMismatch(f"expected a matrix, got shape {arr.shape}")
    if data_type == "f32":
        return arr.astype(np.float32)
    out = arr.astype(np.int64)
    for v in out.ravel():
        _checked_i32(int(v), "matrix input")
    return out


# --- reference arithmetic ----------------------------------------------------


def _dot_fold_f32(x: np.ndarray, y: np.ndarray) -> np.float32:
    acc = np.float32(0.0)
    for xi, yi in zip(x, y):
        acc = np.float32(acc + np.float32(xi * yi))
    return acc


def _dot_fold_i32(x: np.ndarray, y: np.ndarray) -> int:
    acc = 0
    for xi, yi in zip(x, y):
        p = _checked_i32(int(xi) * int(yi), "dot product term")
        acc = _checked_i32(acc + p, "dot accumulation")
    return acc


def _axpy(alpha, x, y, data_type: str):
    if len(x) != len(y):
        raise LengthMismatch(f"axpy needs |x| == |y|, got {len(x)} and {len(y)}")
    if data_type == "f32":
        return (np.float32(alpha) * x + y).astype(np.float32)
    a = int(alpha)
    out = np.empty(len(x), dtype=np.int64)
    for i in range(len(x)):
        t = _checked_i32(a * int(x[i]), "axpy scale")
        out[i] = _checked_i32(t + int(y[i]), "axpy add")
    return out


def _dot(x, y, data_type: str):
    if len(x) != len(y):
        raise LengthMismatch(f"dot needs |x| == |y|, got {len(x)} and {len(y)}")
    if data_type == "f32":
        return _dot_fold_f32(x, y)
    return _dot_fold_i32(x, y)


def _gemv(alpha, a_mat, x, beta, y, data_type: str):
    m, n = a_mat.shape
    if len(x) != n or len(y) != m:
        raise LengthMismatch(
            f"gemv needs |x| == {n} and |y| == {m}, got {len(x)} and {len(y)}"
        )
    if data_type == "f32":
        al, be = np.float32(alpha), np.float32(beta)
        out = np.empty(m, dtype=np.float32)
        for i in range(m):
            acc = _dot_fold_f32(a_mat[i], x)
            out[i] = np.float32(np.float32(al * acc) + np.float32(be * y[i]))
        return out
    al, be = int(alpha), int(beta)
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        acc = _dot_fold_i32(a_mat[i], x)
        t = _checked_i32(al * acc, "gemv scale")
        u = _checked_i32(be * int(y[i]), "gemv beta term")
        out[i] = _checked_i32(t + u, "gemv add")
    return out


def apply_reference(kind: str, inputs: dict, data_type: str = "f32") -> dict:
    """Apply a routine's exact reference semantics to bound inputs.

    `inputs` maps input port names to scalars / 1-D vectors / 2-D
    row-major matrices; values are coerced to the element type. Returns
    a dict keyed by output port name.
    """
    sig_inputs = {p.name for p in input_ports(kind)}
    missing = sig_inputs - set(inputs)
    if missing:
        raise LengthMismatch(f"routine {kind!r} missing inputs: {sorted(missing)}")

    if kind == "axpy":
        z = _axpy(
            as_scalar(inputs["alpha"], data_type),
            as_vector(inputs["x"], data_type),
            as_vector(inputs["y"], data_type),
            data_type,
        )
        return {"z": z}
    if kind == "dot":
        r = _dot(
            as_vector(inputs["x"], data_type),
            as_vector(inputs["y"], data_type),
            data_type,
        )
        return {"result": r}
    if kind == "gemv":
        z = _gemv(
            as_scalar(inputs["alpha"], data_type),
            as_matrix(inputs["A"], data_type),
            as_vector(inputs["x"], data_type),
            as_scalar(inputs["beta"], data_type),
            as_vector(inputs["y"], data_type),
            data_type,
        )
        return {"z": z}
    raise UnknownRoutine(f"unknown routine {kind!r}")


def apply_axpydot(alpha, w, v, u, data_type: str = "f32"):
    """Oracle for the composed two-stage design: beta = (w - alpha*v)^T u.

    Defined as dot composed with axpy (feeding -alpha with x=v, y=w), so
    it exercises exactly the canonical forms the composed graph runs.
    """
    neg_alpha = -as_scalar(alpha, data_type)
    z = apply_reference("axpy", {"alpha": neg_alpha, "x": v, "y": w}, data_type)["z"]
    return apply_reference("dot", {"x": z, "y": u}, data_type)["result"]
