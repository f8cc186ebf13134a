"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py --repeat 5 --n 1001
"""
import argparse
import time

import numpy as np

from hsvrkit import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    x = np.linspace(0.0, 2.0, n)[:, None]
    y = x[:, 0] + np.sin(2 * np.pi * x[:, 0] ** 4)
    gamma = 1.0 / 0.05**2
    K = _kernels.rbf_matrix_np(x, x, gamma)
    q = np.linspace(0.0, 2.0, 2 * n)[:, None]
    beta = np.random.default_rng(0).normal(size=n)
    times = np.linspace(0.0, 10.0, 500)
    s0 = np.array([1.0, 1.0, 1.0])
    lor = (10.0, 28.0, 8.0 / 3.0)
    return {
        "rbf_matrix": (lambda f: f(x, x, gamma), _kernels.rbf_matrix_np, _kernels.rbf_matrix_nb),
        "kernel_expansion": (lambda f: f(q, x, beta, gamma, 0.0),
                             _kernels.kernel_expansion_np, _kernels.kernel_expansion_nb),
        "smo_solve": (lambda f: f(K, y, 5.0, 0.03, 1e-3, 100 * n * n), _kernels.smo_solve_np, _kernels.smo_solve_nb),
        "rk4_lorenz": (lambda f: f(times, s0, 1e-3, *lor), _kernels.rk4_lorenz_np, _kernels.rk4_lorenz_nb),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1001, help="training points")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, (call, f_np, f_nb) in cases(args.n).items():
        t_np = best_of(lambda: call(f_np), args.repeat)
        if f_nb is None:
            print(f"{name:<18}{t_np:>12.4f}{'n/a':>12}{'':>10}")
            continue
        call(f_nb)  # compile outside the timed region
        t_nb = best_of(lambda: call(f_nb), args.repeat)
        print(f"{name:<18}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
