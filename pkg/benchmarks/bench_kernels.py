"""Time the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3] [--runs 10000]
"""
import argparse
import time

import numpy as np

from gravcoherence import _backend, gridsim


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def jacobi_case(dim, count, rng):
    mats = []
    for _ in range(count):
        A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        mats.append(A + A.conj().T)
    return mats


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--runs", type=int, default=10_000, help="records in the branch-amplitude case")
    ap.add_argument("--matrices", type=int, default=200, help="matrices per Jacobi case")
    args = ap.parse_args(argv)

    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the python backend only")
    rng = np.random.default_rng(0)

    psi = gridsim.make_two_branch_state()
    mode_l, mode_r = psi.modes()
    ks = rng.standard_normal(args.runs) * gridsim.HBAR / (psi.centers[1] - psi.centers[0])

    cases = {}
    for dim in (8, 16):
        mats = jacobi_case(dim, args.matrices, rng)
        cases[f"jacobi_eigh {dim}x{dim} x{args.matrices}"] = (
            lambda k, mats=mats: [k.jacobi_eigh(H) for H in mats])
    cases[f"branch_amplitudes {psi.grid.n} pts x{args.runs}"] = (
        lambda k: k.branch_amplitudes(psi.x, psi.amplitudes, mode_l, mode_r, ks, gridsim.HBAR, psi.grid.dx))

    print(f"{'case':<40}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        t = {b: best_of(lambda: fn(_backend.get_kernels(b)), args.repeat) for b in backends}
        line = f"{name:<40}" + "".join(f"{t[b]:>11.4f}s" for b in backends)
        if len(backends) > 1:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
