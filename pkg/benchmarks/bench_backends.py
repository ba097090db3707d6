"""Compare the compiled and pure-Python Jacobi kernels.

Times the raw eigensolver at several sizes, then one condition IV checker run
(its superoperators are ``n^2 x n^2``, so it is the heaviest consumer) with
each kernel swapped in.

    python3 benchmarks/bench_backends.py [--repeat 5] [--trials 50]
"""
import argparse
import timeit

from melab import _kernels
from melab.catalog import StandardEntropy
from melab.membership import check_condition
from melab.sampling import random_hermitian, trial_rng


def bench_kernel(kernel, n, repeat):
    a = random_hermitian(n, trial_rng(0, n))
    timer = timeit.Timer(lambda: kernel(a.copy(), 1e-13, 100, True))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


def bench_checker(kernel, n, trials):
    saved = _kernels.jacobi_eigh
    _kernels.jacobi_eigh = kernel
    try:
        return min(timeit.repeat(lambda: check_condition("IV", StandardEntropy(), n, trials, 0), number=1, repeat=3))
    finally:
        _kernels.jacobi_eigh = saved


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--sizes", default="2,4,8,16,32")
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    names = sorted(backends)
    print(f"active backend: {_kernels.BACKEND}; available: {', '.join(names)}")
    if "cython" not in backends:
        print("compiled kernel not built; only the fallback is timed")

    print(f"\n{'n':>4} " + " ".join(f"{name + ' [ms]':>14}" for name in names) + ("    speedup" if len(names) > 1 else ""))
    for n in (int(s) for s in args.sizes.split(",")):
        times = {name: bench_kernel(backends[name], n, args.repeat) for name in names}
        row = f"{n:>4} " + " ".join(f"{times[name] * 1e3:>14.4f}" for name in names)
        if len(names) > 1:
            row += f"  {times['python'] / times['cython']:>9.1f}x"
        print(row)

    print(f"\ncondition IV checker, xlogx, {args.trials} trials")
    for n in (2, 3):
        times = {name: bench_checker(backends[name], n, args.trials) for name in names}
        row = f"  n={n}: " + ", ".join(f"{name} {times[name]:.3f} s" for name in names)
        if len(names) > 1:
            row += f" ({times['python'] / times['cython']:.1f}x)"
        print(row)


if __name__ == "__main__":
    main()
