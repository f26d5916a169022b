"""Timing comparison of the numba and numpy kernel lanes.

Run directly: ``python3 benchmarks/bench_kernels.py``. Measures the tick
accumulator, the shift-matrix builder, the small symmetric eigensolve, and
one end-to-end indicator pass. The numba lane must be active (do not set
PSIMA_NO_NUMBA) or the comparison collapses to numpy vs itself.
"""

import time

import numpy as np

from psima import BasisId, tick_arrays
from psima._kernels import (BASIS_CODE, accumulate_block, accumulate_block_np,
                            lane_name, shift_matrix, shift_matrix_np,
                            symmetric_eigh, symmetric_eigh_np)
from psima.indicators import run_over
from psima.synth import steady


def timeit(fn, *args, repeat=5, inner=1):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_accumulate(rows):
    ticks = steady(rate=2.0, flow=100.0, price=100.0, duration=2000.0, seed=1)
    t, p, dV = tick_arrays(ticks)
    code = BASIS_CODE[BasisId.SHIFTED_LEGENDRE]
    t_now = float(t[-1])

    def jit_lane():
        out = np.zeros((5, 23))
        accumulate_block(t, p, dV, 0, len(t), 0.0, t_now, 256.0, code, out)

    def np_lane():
        out = np.zeros((5, 23))
        accumulate_block_np(t, p, dV, 0, len(t), 0.0, t_now, 256.0, code, out)

    def jit_streaming():
        out = np.zeros((5, 23))
        for l in range(len(t)):
            accumulate_block(t, p, dV, l, l + 1, t[l - 1] if l else 0.0,
                             t_now, 256.0, code, out)

    def np_streaming():
        out = np.zeros((5, 23))
        for l in range(len(t)):
            accumulate_block_np(t, p, dV, l, l + 1, t[l - 1] if l else 0.0,
                                t_now, 256.0, code, out)

    jit_lane()  # compile before timing
    rows.append((f"accumulate {len(t)} ticks, one block",
                 timeit(jit_lane, inner=20), timeit(np_lane, inner=20)))
    rows.append((f"accumulate {len(t)} ticks, tick at a time",
                 timeit(jit_streaming), timeit(np_streaming)))


def bench_shift(rows):
    code = BASIS_CODE[BasisId.SHIFTED_LEGENDRE]
    shift_matrix(code, 0.003, 23)
    rows.append(("shift matrix 23x23",
                 timeit(shift_matrix, code, 0.003, 23, inner=200),
                 timeit(shift_matrix_np, code, 0.003, 23, inner=200)))


def bench_eigh(rows):
    rng = np.random.default_rng(0)
    R = rng.standard_normal((12, 12))
    S = 0.5 * (R + R.T)
    symmetric_eigh(S)
    rows.append(("symmetric eigensolve 12x12",
                 timeit(symmetric_eigh, S, inner=200),
                 timeit(symmetric_eigh_np, S, inner=200)))


def bench_end_to_end(rows):
    ticks = steady(rate=1.0, flow=100.0, price=100.0, duration=2000.0, seed=7)
    best = timeit(run_over, ticks, BasisId.SHIFTED_LEGENDRE, 12, 256.0,
                  repeat=3)
    rows.append((f"indicator pass, {len(ticks)} ticks", best, None))


def main():
    print(f"active lane: {lane_name()}")
    rows = []
    bench_accumulate(rows)
    bench_shift(rows)
    bench_eigh(rows)
    bench_end_to_end(rows)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  speedup")
    for name, a, b in rows:
        if b is None:
            print(f"{name:<{width}}  {a * 1e3:>8.2f}ms  {'-':>10}")
        else:
            print(f"{name:<{width}}  {a * 1e6:>8.1f}us  {b * 1e6:>8.1f}us  "
                  f"{b / a:>6.1f}x")


if __name__ == "__main__":
    main()
