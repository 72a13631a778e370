"""Compiled kernels versus their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times and the speedup; also checks the two backends agree.
"""
import argparse
import time

import numpy as np

from qwf import _fallback

try:
    from qwf import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    psi0 = np.zeros(801, dtype=np.complex128)
    psi0[400] = 1.0
    couplings = np.array([1.0, 0.5])
    x0 = np.linspace(-10.0, 8.0, 2000)
    ai0 = np.exp(-np.abs(x0))
    aip0 = np.cos(x0)
    h = np.full(x0.size, 0.125)
    return {
        "bessel_jn_miller(x=2000, nmax=2200)": lambda m: m.bessel_jn_miller(2000.0, 2200),
        "rk4_hopping(801 sites, 2000 steps)": lambda m: m.rk4_hopping(psi0, couplings, 0.005, 2000),
        "airy_taylor(2000 points)": lambda m: m.airy_taylor(x0, ai0, aip0, h),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; timing the fallback only")
    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, call in cases().items():
        t_py, out_py = best_of(lambda: call(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:40s} {t_py:12.4g} {'-':>13s} {'-':>8s}")
            continue
        t_c, out_c = best_of(lambda: call(_kernels), args.repeat)
        a = np.concatenate([np.ravel(o) for o in (out_py if isinstance(out_py, tuple) else (out_py,))])
        b = np.concatenate([np.ravel(o) for o in (out_c if isinstance(out_c, tuple) else (out_c,))])
        diff = float(np.max(np.abs(a - b)))
        print(f"{name:40s} {t_py:12.4g} {t_c:13.4g} {t_py / t_c:8.1f}   max|diff| {diff:.1e}")


if __name__ == "__main__":
    main()
