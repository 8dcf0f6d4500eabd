"""Time the numba kernels against their pure-numpy twins.

Run with ``python benchmarks/bench_kernels.py``. Both paths are called in
one process through the ``use_numba`` switch; set
MESOCOLONY_DISABLE_NUMBA=1 to check that the fallback alone imports and runs.
"""

import time

import numpy as np

from mesocolony import _config, kernels


def best_of(fn, repeat=5):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(40_000)
    y = rng.standard_normal(40_000)

    pts = np.linspace(-1.5, 1.5, 5000)
    n = 512
    a = np.zeros(n)
    sqb = np.sqrt(np.arange(n) / (2.0 * n))

    chains, npts, sweeps = 8, 4, 2000
    X0 = rng.standard_normal((chains, npts)) * 0.5
    normals = rng.standard_normal((sweeps, chains, npts))
    uniforms = 1.0 - rng.random((sweeps, chains, npts))
    step = np.full(chains, 0.4)
    coeffs = np.array([0.0, 0.0, 1.0])

    cases = [
        ("dot2 (40k)", lambda u: kernels.dot2(x, y, use_numba=u)),
        ("orthonormal_eval (5k pts, n=512)", lambda u: kernels.orthonormal_eval(pts, a, sqb, n, use_numba=u)),
        ("metropolis (8x4, 2000 sweeps)",
         lambda u: kernels.metropolis_sweeps(X0.copy(), coeffs, 4.0, step, normals, uniforms, False, use_numba=u)),
    ]
    print(f"numba available: {_config.USE_NUMBA}")
    print(f"{'kernel':36s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for name, fn in cases:
        t_np = best_of(lambda: fn(False))
        if _config.USE_NUMBA:
            t_nb = best_of(lambda: fn(True))
            r1, r2 = fn(False), fn(True)
            same = np.allclose(np.asarray(r1[0] if isinstance(r1, tuple) else r1),
                               np.asarray(r2[0] if isinstance(r2, tuple) else r2), rtol=1e-12, atol=0)
            print(f"{name:36s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:8.1f}x"
                  f"{'' if same else '  (results differ!)'}")
        else:
            print(f"{name:36s} {1e3 * t_np:12.2f} {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()
