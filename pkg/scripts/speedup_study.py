#!/usr/bin/env python3
"""Dataflow-composition speedup study.

Sweeps problem sizes for the composed two-stage design (vector add feeding
a dot product) and prints pipelined vs. sequential estimates with their
ratio. With on-chip composition the two memory-bound stages overlap, so
the ratio settles near 0.5 at large n.

    python3 scripts/speedup_study.py [--min-exp 14] [--max-exp 24]
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dataflow_blas import compare_variants, parse_spec

AXPYDOT = {
    "routines": [
        {"blas_routine": "axpy", "kernel_name": "a"},
        {"blas_routine": "dot", "kernel_name": "d", "connections": {"x": "a.z"}},
    ]
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--min-exp", type=int, default=14)
    parser.add_argument("--max-exp", type=int, default=24)
    args = parser.parse_args()

    spec = parse_spec(json.dumps(AXPYDOT))
    print(f"{'n':>10} {'pipelined_s':>14} {'sequential_s':>14} {'ratio':>8}")
    for exp in range(args.min_exp, args.max_exp + 1):
        n = 1 << exp
        cmp = compare_variants(spec, spec.platform, n)
        print(
            f"{n:>10} {cmp.pipelined_seconds:>14.6e} "
            f"{cmp.sequential_seconds:>14.6e} {cmp.ratio:>8.4f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
