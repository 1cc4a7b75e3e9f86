"""Compare the compiled and pure-Python series kernels.

Runs each kernel on operands taken from a real hierarchy solve, then times a
full solve in a subprocess per backend.  Usage:

    python3 benchmarks/bench_kernels.py [--r 3 --times 8 --degree 6]
"""
import argparse
import os
import subprocess
import sys
import timeit

from gdhierarchy import _kernels_py
from gdhierarchy.series import EPS_OFF, MASK
from gdhierarchy.solver import TruncationSpec, solve_jets

try:
    from gdhierarchy import _kernels_c
except ImportError:
    _kernels_c = None

SOLVE_SNIPPET = ("from gdhierarchy.solver import TruncationSpec, solve_jets;"
                 "from gdhierarchy.wave import solve_phi;"
                 "import time, gdhierarchy.kernels as k;"
                 "t=time.perf_counter();"
                 "solve_phi(solve_jets(TruncationSpec({r}, {n}, {d})));"
                 "print(k.BACKEND, time.perf_counter()-t)")


def kernel_timings(a, b, space, reps):
    shift = space.shift("T1")
    rows = []
    for name, mod in (("python", _kernels_py), ("cython", _kernels_c)):
        if mod is None:
            rows.append((name, None, None, None))
            continue
        ab, bb = a.buckets(), b.buckets()
        t_mul = min(timeit.repeat(lambda: mod.mul_buckets(ab, bb, 0, a.cap, EPS_OFF),
                                  number=reps, repeat=3)) / reps
        t_diff = min(timeit.repeat(lambda: mod.diff_slot(a.terms, shift, MASK),
                                   number=reps, repeat=3)) / reps
        t_axpy = min(timeit.repeat(lambda: mod.axpy(dict(a.terms), b.terms, 3),
                                   number=reps, repeat=3)) / reps
        rows.append((name, t_mul, t_diff, t_axpy))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--times", type=int, default=8)
    ap.add_argument("--degree", type=int, default=6)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    state = solve_jets(TruncationSpec(args.r, args.times, args.degree))
    a, b = state.L[0], state.L[args.r - 2]
    print(f"operands: {len(a)} x {len(b)} terms (r={args.r}, N={args.times}, D={args.degree})")
    print(f"{'backend':8} {'mul_buckets':>12} {'diff_slot':>12} {'axpy':>12}")
    for name, *ts in kernel_timings(a, b, state.space, args.reps):
        cells = ["n/a".rjust(12) if t is None else f"{t * 1e3:10.3f}ms" for t in ts]
        print(f"{name:8} " + " ".join(cells))

    print("end-to-end solve of L and phi:")
    code = SOLVE_SNIPPET.format(r=args.r, n=args.times, d=args.degree)
    for pure in (True, False):
        env = dict(os.environ)
        env.pop("GDH_PURE_PYTHON", None)
        if pure:
            env["GDH_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"  {out[0]:8} {float(out[1]):.2f}s")


if __name__ == "__main__":
    main()
