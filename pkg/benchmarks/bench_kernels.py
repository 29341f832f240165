"""Times the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the BETA_TURAN_JIT flag does not
matter here.  The first numba call is excluded (compilation or cache load).
"""
import argparse
import timeit

import numpy as np

from beta_turan import _kernels_jit as jit
from beta_turan import _kernels_np as npk
from beta_turan.series import series_of_normalized_I


def _cases():
    s = series_of_normalized_I(0.5, 2.0, 50).coeffs
    t = series_of_normalized_I(0.5, 3.7, 50).coeffs
    u = series_of_normalized_I(0.5, 1.0, 50).coeffs
    v = series_of_normalized_I(0.5, 4.7, 50).coeffs
    psi = [npk.digamma(z) for z in (4.3, 1.5, 2.2)] + [npk.trigamma(z) for z in (4.3, 1.5, 2.2)]
    return {
        "digamma x1000": lambda k: [k.digamma(0.1 + 0.01 * i) for i in range(1000)],
        "unit_hyp_sum x=0.9": lambda k: k.unit_hyp_sum(2.5, 3.0, 0.9, 1e-16, 10_000),
        "inc_beta_series_derivs": lambda k: k.inc_beta_series_derivs(1.5, 2.2, 0.6, 1e-16, 10_000, *psi),
        "convolve_trunc N=50": lambda k: k.convolve_trunc(s, t),
        "wright_diff_compensated N=50": lambda k: k.wright_diff_compensated(s, t, u, v),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args()
    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, call in _cases().items():
        call(jit)  # warm-up
        r_np = np.array(timeit.repeat(lambda: call(npk), number=args.number, repeat=args.repeat))
        r_jit = np.array(timeit.repeat(lambda: call(jit), number=args.number, repeat=args.repeat))
        t_np = r_np.min() / args.number * 1e3
        t_jit = r_jit.min() / args.number * 1e3
        print(f"{name:32s} {t_np:12.4f} {t_jit:12.4f} {t_np / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
