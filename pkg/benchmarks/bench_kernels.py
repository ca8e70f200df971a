"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from colsel import _pykernels

try:
    from colsel import _kernels
except ImportError:
    _kernels = None

from colsel.linalg import JACOBI_MAX_SWEEPS, JACOBI_TOL


def _psd(rng, n):
    B = rng.standard_normal((n, n))
    return np.ascontiguousarray(B @ B.T)


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = {"python": _pykernels}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    cases = []
    for n in (4, 8, 12, 24, 48):
        A = _psd(rng, n)
        cases.append((f"jacobi n={n}", lambda k, A=A: k.jacobi_eigh(A, JACOBI_TOL, JACOBI_MAX_SWEEPS)))
    for m in (10, 100, 1000):
        lam = np.sort(rng.uniform(0.1, 2.0, m))
        w = rng.uniform(0.0, 1.0, m)
        cases.append((f"secular m={m}", lambda k, lam=lam, w=w: k.secular_terms(lam, w, 0.05)))

    for name, call in cases:
        times = {b: _time(lambda k=k: call(k), args.repeat) for b, k in backends.items()}
        row = f"{name:<22}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
