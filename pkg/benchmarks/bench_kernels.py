"""Compare the compiled and NumPy kernels on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]
"""

import argparse
import time

import numpy as np

from hamindex import _fallback
from hamindex.flow import _stage_matrices, gauss_legendre_tableau
from hamindex.symplectic import trig_path

try:
    from hamindex import _core
except ImportError:
    _core = None


def case(n, steps, seed=0):
    rng = np.random.default_rng(seed)
    d = 2 * n
    S = [0.5 * (M + M.T) for M in rng.uniform(-1, 1, size=(3, d, d))]
    B = trig_path(S[0], [S[1]], [S[2]])
    stage, h, a, b = _stage_matrices(B, B.period, steps, 3)
    return stage, h, np.ascontiguousarray(a), np.ascontiguousarray(b)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    gauss_legendre_tableau(3)
    print(f"{'n':>3} {'steps':>6} {'kernel':>10} {'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8} {'max diff':>10}")
    for n in (1, 2, 4):
        for steps in (512, 4096):
            stage, h, a, b = case(n, steps)
            t_py, ref = best_of(lambda: _fallback.collocation_propagate(stage, h, a, b), args.repeat)
            t_py_d, dref = best_of(lambda: _fallback.max_symplectic_defect(ref), args.repeat)
            if _core is None:
                print(f"{n:>3} {steps:>6} {'propagate':>10} {1e3 * t_py:>11.3f} {'n/a':>12}")
                continue
            t_c, out = best_of(lambda: _core.collocation_propagate(stage, h, a, b), args.repeat)
            t_c_d, dout = best_of(lambda: _core.max_symplectic_defect(ref), args.repeat)
            diff = float(np.max(np.abs(np.asarray(out) - ref)))
            print(f"{n:>3} {steps:>6} {'propagate':>10} {1e3 * t_py:>11.3f} {1e3 * t_c:>12.3f} "
                  f"{t_py / t_c:>8.1f} {diff:>10.2e}")
            print(f"{n:>3} {steps:>6} {'defect':>10} {1e3 * t_py_d:>11.3f} {1e3 * t_c_d:>12.3f} "
                  f"{t_py_d / t_c_d:>8.1f} {abs(dout - dref):>10.2e}")


if __name__ == "__main__":
    main()
