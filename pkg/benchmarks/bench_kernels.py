"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import time

import numpy as np

from antimod import SbmSpec, _backend, sample


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, seed):
    rng = np.random.default_rng(seed)
    spec = SbmSpec((n // 2, n - n // 2), [[0.02, 0.002], [0.002, 0.02]])
    a = sample(spec, seed).adjacency
    x = rng.standard_normal(n)
    points = rng.standard_normal((n, 4))
    centers = rng.standard_normal((5, 4))
    block_of = spec.labels.astype(np.int64)
    probs = np.ascontiguousarray(spec.b)
    return {
        "csr_matvec": lambda impl, t: impl(a.indptr, a.indices, a.data, x, t),
        "kmeans_assign": lambda impl, t: impl(points, centers, t),
        # the sampler is single-threaded in both backends
        "sbm_pairs": lambda impl, t: impl(block_of, probs, seed, 0, n),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20000, help="node count")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--threads", type=int, default=_backend.num_threads())
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _backend.BACKEND != "compiled":
        print("compiled extension unavailable; timing the fallback only")
    print(f"n={args.n} threads={args.threads} repeat={args.repeat}")
    print(f"{'kernel':<14} {'python [s]':>11} {'compiled [s]':>13} {'speedup':>8}")
    for name, call in cases(args.n, args.seed).items():
        py = _backend.get(name, "python")
        t_py = best_time(lambda: call(py, 1), args.repeat)
        if _backend.BACKEND == "compiled":
            c = _backend.get(name, "compiled")
            t_c = best_time(lambda: call(c, args.threads), args.repeat)
            print(f"{name:<14} {t_py:>11.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x")
        else:
            print(f"{name:<14} {t_py:>11.4f} {'-':>13} {'-':>8}")


if __name__ == "__main__":
    main()
