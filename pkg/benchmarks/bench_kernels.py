"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the Gaussian blur used by the imaging model and a full split-step
evolution (whose per-step potential phase is the compiled inner loop), on
both backends, and checks that the two agree.
"""
import argparse
import math
import timeit

import numpy as np

from bragg_backflow import kernels, oracle


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10s} {best * 1e3:9.3f} ms")
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.compiled_available():
        print("compiled kernels not built; nothing to compare (fallback is in use)")
        return
    backends = {name: kernels.backend_module(name) for name in ("python", "cython")}
    rng = np.random.default_rng(0)

    for n, sigma in ((4096, 0.05), (16384, 0.2)):
        rho = rng.uniform(size=n)
        dx = 0.01
        print(f"gaussian_blur n={n} sigma={sigma / dx:g} dx")
        times = {k: bench(k, lambda m=m: m.gaussian_blur(rho, dx, sigma), args.repeat) for k, m in backends.items()}
        diff = np.max(np.abs(backends["python"].gaussian_blur(rho, dx, sigma)
                             - backends["cython"].gaussian_blur(rho, dx, sigma)))
        print(f"  speed-up {times['python'] / times['cython']:.2f}x, max difference {diff:.1e}")

    for n in (4096, 16384):
        psi = (rng.normal(size=n) + 1j * rng.normal(size=n)).astype(np.complex128)
        v = rng.uniform(size=n)
        print(f"potential_phase n={n}")
        times = {}
        for k, m in backends.items():
            buf = psi.copy()
            times[k] = bench(k, lambda m=m, buf=buf: m.potential_phase(buf, v, 2.0, 1e-3), args.repeat)
        print(f"  speed-up {times['python'] / times['cython']:.2f}x")

    grid = oracle.GridSpec.centered(8192, 80.0)
    gs = oracle.ground_state(grid, oracle.Harmonic(0.0))
    start = oracle.coherent_displacement(gs, 2.1, math.pi / 2)
    print("evolve 8192 points, 1000 steps (g = 1)")
    start = oracle.SimState(start.grid, start.psi, 0.0, oracle.Free(), 1.0)
    out, times = {}, {}
    for k in backends:
        def run(k=k):
            out[k] = oracle.evolve(start, 1.0, dt=1e-3, backend=k)
        times[k] = bench(k, run, args.repeat)
    diff = np.max(np.abs(out["python"].psi - out["cython"].psi))
    print(f"  speed-up {times['python'] / times['cython']:.2f}x, max difference {diff:.1e}")


if __name__ == "__main__":
    main()
