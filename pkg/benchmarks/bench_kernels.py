"""Compiled kernels against the numpy fallback on representative inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import cmath
import timeit

import numpy as np

from bigktype import _pykernels
from bigktype.counting import ellipsoid_form
from bigktype.mat2c import random_sl2
from bigktype.sphtrace import _aligned_arrays, _aligned_form

try:
    from bigktype import _core
except ImportError:
    _core = None


def cases():
    g = random_sl2(np.random.default_rng(0), 3.0)
    gt, h = _aligned_form(g)
    small = _aligned_arrays(4, h, 24)
    yield "trace_sum l=2", lambda m: m.trace_sum(gt, 4, 2, 0.5j, *small)
    arrays = _aligned_arrays(80, h, 120)
    yield "trace_sum l=40", lambda m: m.trace_sum(gt, 80, 40, 0.5j, *arrays)

    N = 2000
    logs = np.log(np.arange(1, N + 1, dtype=float))
    coefs = np.ones(N)
    yield "dirichlet_line 2000x2000", lambda m: m.dirichlet_line(logs, coefs, 1.2, 0.0, 0.1, 2000)

    n = 3 + 2j
    qd, mu, bound = ellipsoid_form(g, [("full", 2.5)], cmath.sqrt(n))
    yield "det_points n=3+2i R=2.5", lambda m: m.det_points(qd, mu, bound, 3, 2)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=5, repeat=args.repeat)) / 5
        if _core is None:
            print(f"{name:28s} {1e3 * t_py:10.3f} {'n/a':>12s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_core), number=5, repeat=args.repeat)) / 5
        print(f"{name:28s} {1e3 * t_py:10.3f} {1e3 * t_c:12.3f} {t_py / t_c:8.1f}")


if __name__ == "__main__":
    main()
