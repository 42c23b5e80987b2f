"""Command-line entry point.

Subcommands mirror the development flow: validate a design spec,
generate the source tree, simulate on host data, estimate performance,
or dump the dataflow graph. Results go to stdout (JSON with --json),
diagnostics to stderr. Exit codes: 0 success, 1 validation failure,
2 I/O error, 3 internal error.

The DBF_PLATFORM environment variable may point to a JSON file of
platform overrides; the spec's own "platform" object wins over it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import design
from .codegen import emit_design, write_design
from .device import default_platform
from .errors import DesignError, NonEmptyOutputDir
from .graph import build_graph, interface_budget, to_dot
from .perf import DesignVariant, estimate, estimate_variant
from .placement import memory_report, place
from .simulate import DEFAULT_GENERATOR_LENGTH, simulate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def _load_platform_from_env():
    path = os.environ.get("DBF_PLATFORM")
    if not path:
        return None
    with open(path, "r", encoding="utf-8") as f:
        overrides = json.load(f)
    try:
        return default_platform().with_overrides(overrides)
    except ValueError as exc:
        raise DesignError(f"DBF_PLATFORM file {path}: {exc}") from exc


def _read_spec(path: str) -> design.RoutineSpecSet:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return design.parse_spec(text, base_platform=_load_platform_from_env())


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# --- subcommands -------------------------------------------------------------


def _cmd_validate(args) -> int:
    try:
        spec_set = _read_spec(args.spec)
    except DesignError as exc:
        if args.json:
            _emit_json({"ok": False, "error": {"code": exc.code, "message": str(exc)}})
        else:
            print(f"error[{exc.code}]: {exc}", file=sys.stderr)
            print("INVALID")
        return EXIT_VALIDATION

    diagnostics = design.validate_connections(spec_set)
    if args.json:
        _emit_json(
            {
                "ok": not diagnostics,
                "kernels": list(spec_set.kernel_names()),
                "diagnostics": [
                    {"kernel": d.kernel, "port": d.port, "code": d.code, "message": d.message}
                    for d in diagnostics
                ],
            }
        )
    else:
        for d in diagnostics:
            print(f"{d.kernel}.{d.port} [{d.code}]: {d.message}", file=sys.stderr)
        print("OK" if not diagnostics else f"INVALID ({len(diagnostics)} diagnostics)")
    return EXIT_OK if not diagnostics else EXIT_VALIDATION


def _build_all(spec_set):
    diagnostics = design.validate_connections(spec_set)
    if diagnostics:
        lines = "; ".join(f"{d.kernel}.{d.port}: {d.message}" for d in diagnostics)
        raise DesignError(f"connection diagnostics: {lines}")
    graph = build_graph(spec_set)
    placement = place(graph, spec_set.platform)
    return graph, placement


def _cmd_generate(args) -> int:
    spec_set = _read_spec(args.spec)
    graph, placement = _build_all(spec_set)
    budget = interface_budget(graph, spec_set.platform)
    if not budget.ok:
        raise DesignError("; ".join(budget.violations))
    generated = emit_design(graph, placement, spec_set.platform)
    count = write_design(generated, args.out, force=args.force)
    if args.json:
        _emit_json({"files_written": count, "out": args.out})
    else:
        print(f"wrote {count} files to {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec_set = _read_spec(args.spec)
    graph, placement = _build_all(spec_set)
    bindings = {}
    if args.input:
        with open(args.input, "r", encoding="utf-8") as f:
            try:
                bindings = json.load(f)
            except json.JSONDecodeError as exc:
                raise DesignError(f"input file {args.input}: malformed JSON: {exc}") from exc
    outputs, trace = simulate(
        graph, placement, bindings, default_length=args.n
    )
    out_json = {name: _jsonable(value) for name, value in sorted(outputs.items())}
    if args.json:
        _emit_json(
            {
                "outputs": out_json,
                "trace": {
                    "window_transactions": trace.node_window_transactions,
                    "stream_elements": trace.node_stream_elements,
                },
            }
        )
    else:
        _emit_json(out_json)
    return EXIT_OK


def _format_seconds(s: float) -> str:
    return f"{s:.6e}"


def _cmd_estimate(args) -> int:
    spec_set = _read_spec(args.spec)
    graph, placement = _build_all(spec_set)

    if args.variant:
        variant = DesignVariant(args.variant)
        est, design_seconds = estimate_variant(
            spec_set, spec_set.platform, args.n, variant
        )
        design_rows = [(variant.value, design_seconds)]
    else:
        est = estimate(graph, placement, spec_set.platform, args.n)
        design_rows = [
            ("pipelined", est.pipelined_seconds),
            ("sequential", est.sequential_seconds),
        ]

    payload = {
        "n": est.n,
        "nodes": [
            {
                "kernel": e.kernel,
                "routine": e.routine,
                "compute_seconds": e.compute_seconds,
                "transfer_seconds": e.transfer_seconds,
                "node_seconds": e.node_seconds,
                "memory_bound": e.memory_bound,
            }
            for e in est.nodes
        ],
        "design": {name: seconds for name, seconds in design_rows},
    }
    if args.memory:
        payload["memory"] = [
            {
                "tile": {"row": row.tile.row, "col": row.tile.col},
                "kernel": row.kernel,
                "bytes_used": row.bytes_used,
                "headroom": row.headroom,
            }
            for row in memory_report(graph, placement, spec_set.platform)
        ]

    if args.json:
        _emit_json(payload)
        return EXIT_OK

    header = f"{'kernel':<16} {'routine':<8} {'compute_s':>13} {'transfer_s':>13} {'node_s':>13}  bound"
    print(header)
    for e in est.nodes:
        bound = "memory" if e.memory_bound else "compute"
        print(
            f"{e.kernel:<16} {e.routine:<8} {_format_seconds(e.compute_seconds):>13}"
            f" {_format_seconds(e.transfer_seconds):>13} {_format_seconds(e.node_seconds):>13}  {bound}"
        )
    for name, seconds in design_rows:
        print(f"design {name:<11} {_format_seconds(seconds)} s")
    if args.memory:
        print(f"\n{'tile':<10} {'kernel':<16} {'bytes':>8} {'headroom':>9}")
        for row in memory_report(graph, placement, spec_set.platform):
            tile = f"({row.tile.row},{row.tile.col})"
            print(f"{tile:<10} {row.kernel:<16} {row.bytes_used:>8} {row.headroom:>9}")
    return EXIT_OK


def _cmd_graph(args) -> int:
    spec_set = _read_spec(args.spec)
    graph, placement = _build_all(spec_set)
    if args.dot:
        sys.stdout.write(to_dot(graph))
        return EXIT_OK
    budget = interface_budget(graph, spec_set.platform)
    summary = {
        "nodes": len(graph.nodes),
        "channels": len(graph.channels),
        "kernels": len(graph.kernels()),
        "pl_to_aie": budget.pl_to_aie,
        "aie_to_pl": budget.aie_to_pl,
        "within_budget": budget.ok,
    }
    if args.json:
        _emit_json(summary)
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")
    return EXIT_OK


# --- argument parsing -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbf", description="BLAS dataflow design toolchain"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--spec", required=True, help="design spec JSON file")
        p.add_argument("--json", action="store_true", help="machine-parseable stdout")

    p = sub.add_parser("validate", help="parse the spec and check connections")
    add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("generate", help="emit the design source tree")
    add_common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--force", action="store_true", help="overwrite a non-empty directory")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("simulate", help="run the design on host data")
    add_common(p)
    p.add_argument("--input", help="JSON file mapping input mover names to data")
    p.add_argument(
        "--n",
        type=int,
        default=DEFAULT_GENERATOR_LENGTH,
        help="fallback length for on-chip generated data",
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="analytic performance estimate")
    add_common(p)
    p.add_argument("--n", type=int, default=1 << 20, help="problem size (vector length)")
    p.add_argument(
        "--variant",
        choices=[v.value for v in DesignVariant],
        help="estimate a specific design variant",
    )
    p.add_argument("--memory", action="store_true", help="include per-tile memory report")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("graph", help="dataflow graph summary or DOT")
    add_common(p)
    p.add_argument("--dot", action="store_true", help="emit GraphViz DOT")
    p.set_defaults(func=_cmd_graph)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonEmptyOutputDir as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_IO
    except DesignError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error[IoError]: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - safety net
        print(f"error[Internal]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
