#!/usr/bin/env python3
"""Compare the compiled and pure-Python assignment-scan kernels.

Times full 2^n scans of a representative feature-model formula for
growing n and prints a table plus the speedup.  Run after an editable
install:

    python benchmarks/bench_satscan.py [max_n]
"""

from __future__ import annotations

import sys
import time

from plift import _satscan_py
from plift import satscan
from plift import variability as v

try:
    from plift import _satscan
except ImportError:
    _satscan = None


def tree_formula(n: int) -> v.PropFormula:
    """Feature-model-shaped instance: a mandatory root, implication chains,
    and a sprinkling of exclusions."""
    clauses = [v.FeatVar("f0")]
    for i in range(1, n):
        clauses.append(v.Implies(v.FeatVar(f"f{i}"), v.FeatVar(f"f{i // 2}")))
    for i in range(3, n, 4):
        clauses.append(v.Implies(v.FeatVar(f"f{i}"),
                                 v.Not(v.FeatVar(f"f{i - 1}"))))
    return v.conjoin(clauses)


def bench(impl, code: bytes, n: int) -> tuple[float, int]:
    start = time.perf_counter()
    count = impl.count_all(code, n)
    return time.perf_counter() - start, count


def main() -> int:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 22
    print(f"active kernel: {satscan.IMPLEMENTATION}")
    if _satscan is None:
        print("compiled kernel unavailable; timing the fallback only")
    print(f"{'n':>4} {'assignments':>14} {'python [s]':>12} "
          f"{'compiled [s]':>13} {'speedup':>9} {'models':>10}")
    for n in range(10, max_n + 1, 2):
        features = [f"f{i}" for i in range(n)]
        code = v.compile_formula(tree_formula(n), features)
        py_time, py_count = bench(_satscan_py, code, n)
        if _satscan is not None:
            c_time, c_count = bench(_satscan, code, n)
            if c_count != py_count:
                raise AssertionError(
                    f"kernel disagreement at n={n}: {c_count} != {py_count}")
            speedup = f"{py_time / c_time:8.1f}x" if c_time else "inf"
            print(f"{n:>4} {1 << n:>14} {py_time:>12.4f} "
                  f"{c_time:>13.4f} {speedup:>9} {py_count:>10}")
        else:
            print(f"{n:>4} {1 << n:>14} {py_time:>12.4f} "
                  f"{'-':>13} {'-':>9} {py_count:>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
