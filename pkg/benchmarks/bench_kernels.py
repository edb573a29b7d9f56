"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import time

import numpy as np

from optocausal import _kernels


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=2 ** 20, help="response grid size")
    ap.add_argument("--batch", type=int, default=10_000, help="moment pairs for E_N")
    args = ap.parse_args()

    if _kernels.numba_impl is None:
        raise SystemExit("numba path unavailable (not installed or OPTOCAUSAL_DISABLE_JIT set)")

    rng = np.random.default_rng(1)
    x = np.linspace(-8.0, 8.0, args.grid)
    n = rng.exponential(1.0, args.batch)
    a = np.sqrt(n * (n + 1.0)) * rng.uniform(0, 1, args.batch) * np.exp(2j * np.pi * rng.uniform(size=args.batch))
    resp_args = (x, 0.2, 1.0, 1e-6, 1.0, 1.6e-5)
    en_args = (a.real, a.imag, n, 64, 1e-10)

    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    # compared outputs: num/den for the response, E_N only for the measure
    # (the optimal phase is arbitrary when E_N is flat in it)
    for name, call, fargs, keep in (("response_parts", "response_parts", resp_args, 2),
                                    ("max_en_over_phase", "max_en_over_phase", en_args, 1)):
        t_np = best_of(lambda: getattr(_kernels.numpy_impl, call)(*fargs), args.repeat)
        t_nb = best_of(lambda: getattr(_kernels.numba_impl, call)(*fargs), args.repeat)
        r_np = getattr(_kernels.numpy_impl, call)(*fargs)
        r_nb = getattr(_kernels.numba_impl, call)(*fargs)
        diff = max(float(np.max(np.abs(p - q))) for p, q in zip(r_np[:keep], r_nb[:keep]))
        print(f"{name:<22}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>9.1f}x"
              f"   max |diff| {diff:.1e}")


if __name__ == "__main__":
    main()
