#!/usr/bin/env python3
"""Off-chip access impact study.

For each single-routine design, compares the estimate with PL movers
reading DRAM against the variant generating all data on-chip. Memory-bound
routines are dominated by the 4 GB/s AXI term, so removing the movers
drops the node time to its compute floor.

    python3 scripts/no_pl_study.py [--routines axpy gemv] [--min-exp 16] [--max-exp 22]
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dataflow_blas import estimate_variant, parse_spec
from dataflow_blas.perf import DesignVariant


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--routines", nargs="+", default=["axpy", "gemv"])
    parser.add_argument("--min-exp", type=int, default=16)
    parser.add_argument("--max-exp", type=int, default=22)
    args = parser.parse_args()

    print(f"{'routine':<8} {'n':>10} {'with_movers_s':>14} {'on_chip_s':>14} {'speedup':>8}")
    for routine in args.routines:
        spec = parse_spec(
            json.dumps({"routines": [{"blas_routine": routine, "kernel_name": "k"}]})
        )
        for exp in range(args.min_exp, args.max_exp + 1):
            n = 1 << exp
            _, movers = estimate_variant(
                spec, spec.platform, n, DesignVariant.WITH_PL_MOVERS
            )
            _, on_chip = estimate_variant(
                spec, spec.platform, n, DesignVariant.ON_CHIP_GENERATED
            )
            print(
                f"{routine:<8} {n:>10} {movers:>14.6e} {on_chip:>14.6e} "
                f"{movers / on_chip:>8.2f}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
