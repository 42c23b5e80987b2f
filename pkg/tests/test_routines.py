"""Routine catalog: signatures and reference semantics.

Frozen expected values come from hand-checked elementwise arithmetic
(e.g. [1,2,3].[4,5,6] = 4+10+18 = 32).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dataflow_blas import routines
from dataflow_blas.errors import IntegerOverflow, LengthMismatch, UnknownRoutine
from dataflow_blas.routines import Direction, PortKind


class TestSignatures:
    def test_axpy_ports(self):
        sig = routines.signature("axpy")
        assert len(routines.input_ports("axpy")) == 3
        assert len(routines.output_ports("axpy")) == 1
        assert [p.name for p in sig] == ["alpha", "x", "y", "z"]
        assert routines.port("axpy", "alpha").kind is PortKind.SCALAR_STREAM

    def test_dot_output_is_scalar_stream(self):
        out = routines.output_ports("dot")
        assert [p.name for p in out] == ["result"]
        assert out[0].kind is PortKind.SCALAR_STREAM

    def test_gemv_has_matrix_window_input(self):
        a_port = routines.port("gemv", "A")
        assert a_port.direction is Direction.INPUT
        assert a_port.kind is PortKind.MATRIX_WINDOW

    def test_unknown_routine(self):
        with pytest.raises(UnknownRoutine):
            routines.signature("gemm")


class TestApplyReference:
    def test_axpy_zero_alpha_leaves_y(self):
        out = routines.apply_reference("axpy", {"alpha": 0.0, "x": [7.0, 7.0], "y": [1.0, 2.0]})
        np.testing.assert_array_equal(out["z"], np.array([1.0, 2.0], dtype=np.float32))

    def test_dot_brute_force_value(self):
        out = routines.apply_reference("dot", {"x": [1.0, 2.0, 3.0], "y": [4.0, 5.0, 6.0]})
        assert out["result"] == np.float32(32.0)

    def test_gemv_identity_matrix(self):
        out = routines.apply_reference(
            "gemv",
            {
                "alpha": 1.0,
                "A": np.eye(3),
                "x": [2.0, 4.0, 6.0],
                "beta": 0.0,
                "y": [9.0, 9.0, 9.0],
            },
        )
        np.testing.assert_array_equal(out["z"], np.array([2.0, 4.0, 6.0], dtype=np.float32))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            routines.apply_reference("dot", {"x": [1.0], "y": [1.0, 2.0]})
        with pytest.raises(LengthMismatch):
            routines.apply_reference(
                "gemv",
                {"alpha": 1.0, "A": np.ones((2, 3)), "x": [1.0, 1.0], "beta": 0.0, "y": [0.0, 0.0]},
            )

    def test_i32_exact(self):
        out = routines.apply_reference(
            "axpy", {"alpha": 3, "x": [1, 2], "y": [10, 20]}, data_type="i32"
        )
        assert out["z"].tolist() == [13, 26]

    def test_i32_overflow_is_an_error(self):
        big = 2**30
        with pytest.raises(IntegerOverflow):
            routines.apply_reference(
                "dot", {"x": [big, big], "y": [4, 4]}, data_type="i32"
            )


class TestAxpydotOracle:
    def test_alpha_one_w_equals_v(self):
        assert routines.apply_axpydot(1.0, [3.0, 4.0], [3.0, 4.0], [5.0, 6.0]) == 0.0

    def test_alpha_zero_reduces_to_dot(self):
        # w^T u = 1*3 + 2*4 = 11
        assert routines.apply_axpydot(0.0, [1.0, 2.0], [9.0, 9.0], [3.0, 4.0]) == np.float32(11.0)

    def test_frozen_small_case(self):
        # z = w - 2v = [3,3]; z^T u = 6
        assert routines.apply_axpydot(2.0, [5.0, 5.0], [1.0, 1.0], [1.0, 1.0]) == np.float32(6.0)


finite_floats = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, width=32)


@st.composite
def same_length_vectors(draw, count=2, min_size=1, max_size=64):
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    return [
        np.array(draw(st.lists(finite_floats, min_size=n, max_size=n)), dtype=np.float32)
        for _ in range(count)
    ]


class TestProperties:
    @given(alpha=finite_floats, vectors=same_length_vectors(count=3))
    @settings(max_examples=60, deadline=None)
    def test_axpydot_equals_explicit_composition(self, alpha, vectors):
        w, v, u = vectors
        z = routines.apply_reference("axpy", {"alpha": -np.float32(alpha), "x": v, "y": w})["z"]
        expected = routines.apply_reference("dot", {"x": z, "y": u})["result"]
        assert routines.apply_axpydot(alpha, w, v, u) == expected

    @given(vectors=same_length_vectors(count=2))
    @settings(max_examples=60, deadline=None)
    def test_dot_symmetric(self, vectors):
        x, y = vectors
        a = routines.apply_reference("dot", {"x": x, "y": y})["result"]
        b = routines.apply_reference("dot", {"x": y, "y": x})["result"]
        assert a == b

    @given(alpha=finite_floats, vectors=same_length_vectors(count=3))
    @settings(max_examples=60, deadline=None)
    def test_axpy_linear_in_y(self, alpha, vectors):
        x, y1, y2 = vectors
        combined = routines.apply_reference("axpy", {"alpha": alpha, "x": x, "y": y1 + y2})["z"]
        split = (
            routines.apply_reference("axpy", {"alpha": alpha, "x": x, "y": y1})["z"]
            + routines.apply_reference("axpy", {"alpha": 0.0, "x": x, "y": y2})["z"]
        )
        # float32 reassociation allows tiny drift
        np.testing.assert_allclose(combined, split, rtol=1e-5, atol=1e-6)

    @given(
        alpha=st.integers(min_value=-8, max_value=8),
        n=st.integers(min_value=1, max_value=32),
        data=st.data(),
    )
    @settings(max_examples=40, deadline=None)
    def test_axpy_linear_exactly_for_i32(self, alpha, n, data):
        ints = st.integers(min_value=-100, max_value=100)
        x, y1, y2 = (
            np.array(data.draw(st.lists(ints, min_size=n, max_size=n)), dtype=np.int64)
            for _ in range(3)
        )
        combined = routines.apply_reference(
            "axpy", {"alpha": alpha, "x": x, "y": y1 + y2}, data_type="i32"
        )["z"]
        split = (
            routines.apply_reference("axpy", {"alpha": alpha, "x": x, "y": y1}, data_type="i32")["z"]
            + routines.apply_reference("axpy", {"alpha": 0, "x": x, "y": y2}, data_type="i32")["z"]
        )
        np.testing.assert_array_equal(combined, split)
