"""Benchmark: compiled box-enumeration kernel against the pure fallback.

Times the raw kernel on representative workloads (random-constraint
sweeps, witness probes) and the bounded oracle end to end.

    python benchmarks/bench_kernels.py
"""

import random
import time

from chcpair import OracleBudget, bounded_lm, corpus
from chcpair import boxes
from chcpair import _boxkernel_py as pure

try:
    from chcpair import _boxkernel as compiled
except ImportError:
    compiled = None


def _random_system(rng, nvars, nrows):
    matrix = [rng.randint(-3, 3) for _ in range(nrows * nvars)]
    consts = [rng.randint(-6, 6) for _ in range(nrows)]
    ops = [rng.choice([0, 0, 0, 1, 2]) for _ in range(nrows)]
    return matrix, consts, ops


def bench_raw(impl, systems, lo, hi, limit):
    t0 = time.perf_counter()
    total = 0
    for matrix, consts, ops, nvars in systems:
        nrows = len(consts)
        total += len(
            impl.solve_box(matrix, consts, ops, nrows, nvars, lo, hi, [None] * nvars, limit)
        )
    return time.perf_counter() - t0, total


class _use_impl:
    """Temporarily route boxes through a specific kernel implementation."""

    def __init__(self, impl, name):
        self.impl = impl
        self.name = name

    def __enter__(self):
        self.saved = boxes._impl, boxes.KERNEL
        boxes._impl = self.impl
        boxes.KERNEL = self.name

    def __exit__(self, *exc):
        boxes._impl, boxes.KERNEL = self.saved


def bench_oracle(impl, name):
    with _use_impl(impl, name):
        t0 = time.perf_counter()
        n = len(bounded_lm(corpus.load("hl").definite(), OracleBudget(8, 0, 6)))
        n += len(bounded_lm(corpus.load("sum_square").definite(), OracleBudget(8, 0, 8)))
        return time.perf_counter() - t0, n


def main():
    rng = random.Random(1)
    sweep = []
    for _ in range(300):
        nvars = rng.randint(2, 4)
        nrows = rng.randint(2, 6)
        m, c, o = _random_system(rng, nvars, nrows)
        sweep.append((m, c, o, nvars))

    rows = []
    t_pure, n1 = bench_raw(pure, sweep, -8, 8, 2**62)
    line = ["full sweep, 300 systems, box [-8,8]", f"{t_pure:.3f}s"]
    if compiled is not None:
        t_c, n2 = bench_raw(compiled, sweep, -8, 8, 2**62)
        assert n1 == n2
        line += [f"{t_c:.3f}s", f"{t_pure / t_c:.1f}x"]
    rows.append(line)

    t_pure, n1 = bench_raw(pure, sweep, -8, 8, 1)
    line = ["first-witness probes, 300 systems", f"{t_pure:.3f}s"]
    if compiled is not None:
        t_c, n2 = bench_raw(compiled, sweep, -8, 8, 1)
        assert n1 == n2
        line += [f"{t_c:.3f}s", f"{t_pure / t_c:.1f}x"]
    rows.append(line)

    t_pure, n1 = bench_oracle(pure, "pure")
    line = ["bounded least models (hl, sum/square)", f"{t_pure:.3f}s"]
    if compiled is not None:
        t_c, n2 = bench_oracle(compiled, "compiled")
        assert n1 == n2
        line += [f"{t_c:.3f}s", f"{t_pure / t_c:.1f}x"]
    rows.append(line)

    width = max(len(r[0]) for r in rows)
    header = ["workload".ljust(width), "pure", "compiled", "speedup"]
    print("  ".join(header))
    for r in rows:
        print("  ".join([r[0].ljust(width)] + [x.rjust(8) for x in r[1:]]))
    if compiled is None:
        print("\ncompiled kernel not built; showing the pure fallback only")


if __name__ == "__main__":
    main()
