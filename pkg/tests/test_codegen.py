"""Code generation: golden-file equality, determinism, template completeness."""

import json
from pathlib import Path

import pytest

from dataflow_blas import build_graph, emit_design, parse_spec, place, write_design
from dataflow_blas.errors import NonEmptyOutputDir
from dataflow_blas.routines import signature

REPO = Path(__file__).resolve().parent.parent
DESIGNS = sorted((REPO / "designs").glob("*.json"))
GOLDEN = REPO / "tests" / "golden"


def emit(spec_path):
    spec_set = parse_spec(spec_path.read_text(encoding="utf-8"))
    graph = build_graph(spec_set)
    placement = place(graph, spec_set.platform)
    return graph, emit_design(graph, placement, spec_set.platform)


@pytest.mark.parametrize("spec_path", DESIGNS, ids=lambda p: p.stem)
def test_golden_equality(spec_path):
    _, design = emit(spec_path)
    golden_dir = GOLDEN / spec_path.stem
    golden_files = {
        str(p.relative_to(golden_dir)): p.read_text(encoding="utf-8")
        for p in golden_dir.rglob("*")
        if p.is_file()
    }
    assert design.file_map == golden_files


@pytest.mark.parametrize("spec_path", DESIGNS, ids=lambda p: p.stem)
def test_regeneration_byte_identical(spec_path):
    _, first = emit(spec_path)
    _, second = emit(spec_path)
    assert first.files == second.files


def test_axpy_512bit_loop_runs_16_lanes():
    _, design = emit(REPO / "designs" / "axpy.json")
    source = design.file_map["aie/axpy_0.src"]
    assert "i += 16" in source
    assert "vec<float, 16>" in source


def test_narrow_vector_width_changes_lanes(tmp_path):
    spec = tmp_path / "narrow.json"
    spec.write_text(
        json.dumps(
            {
                "routines": [
                    {
                        "blas_routine": "axpy",
                        "kernel_name": "k",
                        "vector_width_bits": 128,
                        "window_size_bytes": 512,
                    }
                ]
            }
        )
    )
    _, design = emit(spec)
    assert "i += 4" in design.file_map["aie/k.src"]


@pytest.mark.parametrize("spec_path", DESIGNS, ids=lambda p: p.stem)
def test_kernel_signature_mentions_each_port_once(spec_path):
    graph, design = emit(spec_path)
    for node in graph.kernels():
        source = design.file_map[f"aie/{node.name}.src"]
        signature_section = source.split(f"kernel void {node.name}(", 1)[1].split(") {", 1)[0]
        for port in signature(node.routine):
            matches = [
                line
                for line in signature_section.splitlines()
                if line.strip().endswith((f"> {port.name},", f"> {port.name}"))
            ]
            assert len(matches) == 1, (node.name, port.name)


@pytest.mark.parametrize("spec_path", DESIGNS, ids=lambda p: p.stem)
def test_manifest_source_bijection(spec_path):
    graph, design = emit(spec_path)
    manifest = design.manifest
    kernels = [n.name for n in graph.kernels()]
    generators = [n.name for n in graph.generators()]
    movers = [n.name for n in graph.movers_in() + graph.movers_out()]
    assert sorted(manifest["sources"]["aie"]) == sorted(
        f"aie/{name}.src" for name in kernels + generators
    )
    assert sorted(manifest["sources"]["pl"]) == sorted(f"pl/{name}.src" for name in movers)
    assert manifest["generator"]["version"]
    assert len(manifest["spec_sha256"]) == 64
    assert set(manifest["placement"]) == set(kernels)


def test_axpydot_file_count():
    _, design = emit(REPO / "designs" / "axpydot.json")
    assert len(design.files) == 9  # 7 sources + graph.def + manifest


class TestWriteDesign:
    def test_write_returns_count(self, tmp_path):
        _, design = emit(REPO / "designs" / "axpydot.json")
        assert write_design(design, tmp_path / "out") == 9

    def test_refuses_nonempty_without_force(self, tmp_path):
        _, design = emit(REPO / "designs" / "axpy.json")
        out = tmp_path / "out"
        write_design(design, out)
        with pytest.raises(NonEmptyOutputDir):
            write_design(design, out)

    def test_force_rewrites_identical_tree(self, tmp_path):
        _, design = emit(REPO / "designs" / "axpy.json")
        out = tmp_path / "out"
        write_design(design, out)
        before = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
        write_design(design, out, force=True)
        after = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
        assert before == after
