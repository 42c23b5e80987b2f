"""Design-spec parsing, defaulting, validation, and round-tripping."""

import json
import random

import pytest

from dataflow_blas import parse_spec, to_json_text, validate_connections
from dataflow_blas.design import RoutineSpec, RoutineSpecSet
from dataflow_blas.device import default_platform
from dataflow_blas.errors import (
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

import specgen


def spec_text(routines, platform=None):
    top = {"routines": routines}
    if platform is not None:
        top["platform"] = platform
    return json.dumps(top)


class TestParsing:
    def test_defaults_applied(self):
        s = parse_spec(spec_text([{"blas_routine": "axpy", "kernel_name": "k1"}]))
        (spec,) = s.routines
        assert spec.vector_width_bits == 512
        assert spec.window_size_bytes == 1024
        assert spec.data_type == "f32"
        assert spec.lanes == 16

    def test_empty_routines_rejected(self):
        with pytest.raises(MissingRoutines):
            parse_spec(spec_text([]))

    def test_missing_routines_key_rejected(self):
        with pytest.raises(MissingRoutines):
            parse_spec("{}")

    def test_duplicate_kernel_names_rejected(self):
        with pytest.raises(DuplicateName):
            parse_spec(
                spec_text(
                    [
                        {"blas_routine": "axpy", "kernel_name": "k1"},
                        {"blas_routine": "dot", "kernel_name": "k1"},
                    ]
                )
            )

    def test_malformed_json(self):
        with pytest.raises(SpecSyntaxError):
            parse_spec("{not json")

    def test_duplicate_json_keys_rejected(self):
        text = '{"routines": [{"blas_routine": "axpy", "kernel_name": "a", "kernel_name": "b"}]}'
        with pytest.raises(SpecSyntaxError):
            parse_spec(text)

    def test_unknown_routine(self):
        with pytest.raises(UnknownRoutine):
            parse_spec(spec_text([{"blas_routine": "trsm", "kernel_name": "k"}]))

    def test_unknown_top_level_field(self):
        with pytest.raises(UnknownField):
            parse_spec('{"routines": [], "version": 2}')

    def test_unknown_routine_field(self):
        with pytest.raises(UnknownField):
            parse_spec(spec_text([{"blas_routine": "axpy", "kernel_name": "k", "prio": 1}]))

    def test_bad_kernel_name(self):
        with pytest.raises(BadKernelName):
            parse_spec(spec_text([{"blas_routine": "axpy", "kernel_name": "1bad"}]))

    def test_bad_window_size_not_vector_multiple(self):
        with pytest.raises(BadWindowSize):
            parse_spec(
                spec_text(
                    [{"blas_routine": "axpy", "kernel_name": "k", "window_size_bytes": 100}]
                )
            )

    def test_bad_vector_width(self):
        with pytest.raises(BadVectorWidth):
            parse_spec(
                spec_text(
                    [{"blas_routine": "axpy", "kernel_name": "k", "vector_width_bits": 384}]
                )
            )
        with pytest.raises(BadVectorWidth):
            parse_spec(
                spec_text(
                    [{"blas_routine": "axpy", "kernel_name": "k", "vector_width_bits": 16}]
                )
            )

    def test_narrower_vector_width_shrinks_lanes(self):
        s = parse_spec(
            spec_text([{"blas_routine": "axpy", "kernel_name": "k", "vector_width_bits": 128}])
        )
        assert s.routines[0].lanes == 4

    def test_connection_to_missing_kernel(self):
        with pytest.raises(BadConnectionRef):
            parse_spec(
                spec_text(
                    [{"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "ghost.z"}}]
                )
            )

    def test_connection_to_missing_port(self):
        with pytest.raises(BadConnectionRef):
            parse_spec(
                spec_text(
                    [
                        {"blas_routine": "axpy", "kernel_name": "a"},
                        {"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "a.w"}},
                    ]
                )
            )

    def test_connection_key_must_be_input_port(self):
        with pytest.raises(BadConnectionRef):
            parse_spec(
                spec_text(
                    [
                        {"blas_routine": "axpy", "kernel_name": "a"},
                        {"blas_routine": "dot", "kernel_name": "d", "connections": {"result": "a.z"}},
                    ]
                )
            )

    def test_on_chip_generate_unknown_port(self):
        with pytest.raises(BadConnectionRef):
            parse_spec(
                spec_text(
                    [{"blas_routine": "axpy", "kernel_name": "a", "on_chip_generate": ["w"]}]
                )
            )

    def test_platform_override(self):
        s = parse_spec(
            spec_text(
                [{"blas_routine": "axpy", "kernel_name": "k"}],
                platform={"grid_rows": 2, "grid_cols": 3},
            )
        )
        assert s.platform.grid_rows == 2
        assert s.platform.grid_cols == 3
        assert s.platform.local_memory_bytes_per_tile == 32768

    def test_platform_unknown_field(self):
        with pytest.raises(UnknownField):
            parse_spec(
                spec_text([{"blas_routine": "axpy", "kernel_name": "k"}], platform={"rows": 2})
            )

    def test_platform_bad_value(self):
        with pytest.raises(BadFieldValue):
            parse_spec(
                spec_text(
                    [{"blas_routine": "axpy", "kernel_name": "k"}], platform={"grid_rows": 0}
                )
            )

    def test_negative_placement_hint(self):
        with pytest.raises(BadFieldValue):
            parse_spec(
                spec_text(
                    [
                        {
                            "blas_routine": "axpy",
                            "kernel_name": "k",
                            "placement_hint": {"row": -1, "col": 0},
                        }
                    ]
                )
            )


class TestValidateConnections:
    def test_clean_composition(self):
        s = parse_spec(
            spec_text(
                [
                    {"blas_routine": "axpy", "kernel_name": "a"},
                    {"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "a.z"}},
                ]
            )
        )
        assert validate_connections(s) == []

    def test_kind_mismatch_stream_into_matrix_window(self):
        s = parse_spec(
            spec_text(
                [
                    {"blas_routine": "dot", "kernel_name": "d"},
                    {"blas_routine": "gemv", "kernel_name": "g", "connections": {"A": "d.result"}},
                ]
            )
        )
        diags = validate_connections(s)
        assert [d.code for d in diags] == ["KindMismatch"]
        assert diags[0].kernel == "g"
        assert diags[0].port == "A"

    def test_scalar_stream_connection_is_fine(self):
        s = parse_spec(
            spec_text(
                [
                    {"blas_routine": "dot", "kernel_name": "d"},
                    {"blas_routine": "axpy", "kernel_name": "a", "connections": {"alpha": "d.result"}},
                ]
            )
        )
        assert validate_connections(s) == []

    def test_type_mismatch(self):
        s = parse_spec(
            spec_text(
                [
                    {"blas_routine": "axpy", "kernel_name": "a", "data_type": "i32"},
                    {"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "a.z"}},
                ]
            )
        )
        diags = validate_connections(s)
        assert [d.code for d in diags] == ["TypeMismatch"]

    def test_multiple_producers_flagged(self):
        # only expressible on a programmatically built set: JSON objects
        # cannot carry duplicate keys (the parser rejects them)
        a = RoutineSpec(blas_routine="axpy", kernel_name="a")
        b = RoutineSpec(blas_routine="axpy", kernel_name="b")
        d = RoutineSpec(
            blas_routine="dot",
            kernel_name="d",
            connections=(("x", "a.z"), ("x", "b.z")),
        )
        s = RoutineSpecSet(platform=default_platform(), routines=(a, b, d))
        diags = validate_connections(s)
        assert [d.code for d in diags] == ["MultipleProducers"]
        assert diags[0].kernel == "d" and diags[0].port == "x"

    def test_every_diagnostic_names_kernel_and_port(self):
        s = parse_spec(
            spec_text(
                [
                    {"blas_routine": "dot", "kernel_name": "d"},
                    {"blas_routine": "gemv", "kernel_name": "g", "connections": {"A": "d.result"}},
                ]
            )
        )
        for d in validate_connections(s):
            assert d.kernel and d.port


class TestRoundTrip:
    def test_parse_serialize_parse_is_identity(self):
        original = parse_spec(
            spec_text(
                [
                    {
                        "blas_routine": "axpy",
                        "kernel_name": "a",
                        "window_size_bytes": 2048,
                        "placement_hint": {"row": 1, "col": 2},
                        "on_chip_generate": ["alpha"],
                    },
                    {"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "a.z"}},
                ]
            )
        )
        assert parse_spec(to_json_text(original)) == original

    def test_round_trip_random_specs(self):
        rng = random.Random(7)
        for _ in range(30):
            spec_dict = specgen.random_spec_dict(rng, allow_hints=True)
            parsed = specgen.parse_dict(spec_dict)
            assert parse_spec(to_json_text(parsed)) == parsed

    def test_defaulting_idempotent(self):
        first = parse_spec(spec_text([{"blas_routine": "gemv", "kernel_name": "g"}]))
        second = parse_spec(to_json_text(first))
        assert to_json_text(second) == to_json_text(first)
