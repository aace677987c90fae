"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from dualwave import _backend


def _cases(rng):
    n = 1 << 16
    samples = rng.normal(size=n) + 1j * rng.normal(size=n)
    weight = np.exp(-np.linspace(0.0, 4.0, n))
    omega = np.linspace(0.05, 6.0, 256)
    acc = np.zeros(n)
    return {
        "regulated_dft (65536 x 256)": lambda k: k.regulated_dft(samples, -20.0, 1e-3, weight, omega),
        "phase_increments (65536)": lambda k: k.phase_increments(samples),
        "accumulate_abs2 (65536)": lambda k: k.accumulate_abs2(acc, samples),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    impls = {"python": _backend.python_kernels}
    if _backend.compiled_kernels is not None:
        impls["cython"] = _backend.compiled_kernels
    else:
        print("compiled extension not built; timing the fallback only")
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':32s}" + "".join(f"{name:>12s}" for name in impls) + "     speedup")
    for label, fn in cases.items():
        best = {}
        for name, k in impls.items():
            fn(k)
            best[name] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        row = f"{label:32s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in impls)
        if "cython" in best:
            row += f"  {best['python'] / best['cython']:9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
