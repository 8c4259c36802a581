"""Compare the compiled core against the NumPy fallback.

    python3 benchmarks/bench_core.py [--n 800] [--repeat 3]
"""
import argparse
import time

import numpy as np

from kerrkernel import _pycore
from kerrkernel.fock import EXPERIMENT_POLICY
from kerrkernel.kernels import KernelSpec, _level_weights, gram_exact
from kerrkernel.measure import load_displacement_sets, label_points

try:
    from kerrkernel import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=800)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not built; only the fallback is available")
        return
    pts = np.random.default_rng(0).random((args.n, 2))
    w = _level_weights(1.0, 0.0, EXPERIMENT_POLICY)
    y = label_points(pts, load_displacement_sets()["munu1"]).astype(float)
    K = gram_exact(pts, KernelSpec()).entries

    rows = []
    for name, call in (
        ("kerr2 Gram", lambda m: m.kerr2_closed_gram(pts, pts, w, True)),
        ("SMO C=1", lambda m: m.smo_solve(K, y, 1.0)),
        ("SMO C=100", lambda m: m.smo_solve(K, y, 100.0)),
    ):
        t_py, out_py = best_of(lambda: call(_pycore), args.repeat)
        t_c, out_c = best_of(lambda: call(_core), args.repeat)
        a, b = (out_py, out_c) if name.startswith("kerr2") else (out_py[0], out_c[0])
        rows.append((name, t_py, t_c, float(np.max(np.abs(np.asarray(a) - np.asarray(b))))))

    print(f"n = {args.n}")
    print(f"{'task':<12}{'numpy [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, t_py, t_c, diff in rows:
        print(f"{name:<12}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
