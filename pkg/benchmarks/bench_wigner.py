"""Compare the compiled and numpy kernels for matrix-element tables.

    python benchmarks/bench_wigner.py [--nodes 4096] [--bands 2 8 16 32] [--repeat 5]

Reports the best-of-N wall time per band for each available kernel and the
maximum difference between them.
"""
import argparse
import os
import time

import numpy as np

from su2q import _backend, _wigner_py
from su2q.group import random_elements


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=4096)
    ap.add_argument("--bands", type=int, nargs="+", default=[2, 8, 16, 32])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    q = random_elements(args.nodes, np.random.default_rng(0))
    have_ext = _backend._wigner_ext is not None
    print(f"nodes={args.nodes} threads={os.environ.get('SU2Q_THREADS', '1')} compiled={'yes' if have_ext else 'no'}")
    print(f"{'two_l':>6} {'numpy [ms]':>11} {'compiled [ms]':>14} {'speedup':>8} {'max diff':>10}")
    for tl in args.bands:
        _wigner_py.term_table(tl)  # table construction is cached, keep it out of the timings
        t_py = best_of(lambda: _wigner_py.wigner_batch(q, tl), args.repeat)
        if have_ext:
            t_ext = best_of(lambda: _backend._wigner_batch_ext(q, tl), args.repeat)
            diff = np.max(np.abs(_backend._wigner_batch_ext(q, tl) - _wigner_py.wigner_batch(q, tl)))
            print(f"{tl:>6} {1e3 * t_py:>11.2f} {1e3 * t_ext:>14.2f} {t_py / t_ext:>8.1f} {diff:>10.1e}")
        else:
            print(f"{tl:>6} {1e3 * t_py:>11.2f} {'-':>14} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
