#!/usr/bin/env python3
"""Regenerate the golden design trees in tests/golden/ from designs/*.json.

Run after intentionally changing the code generator, then review the diff:

    python3 scripts/regen_golden.py
    git diff tests/golden
"""

import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from dataflow_blas import build_graph, emit_design, parse_spec, place, write_design


def main() -> int:
    golden_root = REPO / "tests" / "golden"
    for spec_path in sorted((REPO / "designs").glob("*.json")):
        spec_set = parse_spec(spec_path.read_text(encoding="utf-8"))
        graph = build_graph(spec_set)
        placement = place(graph, spec_set.platform)
        design = emit_design(graph, placement, spec_set.platform)
        target = golden_root / spec_path.stem
        if target.exists():
            shutil.rmtree(target)
        count = write_design(design, target)
        print(f"{spec_path.name}: {count} files -> {target.relative_to(REPO)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
