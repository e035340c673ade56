"""Time the enumeration kernels: numba-compiled loops vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--disc-n 12,16,20] [--herdisc-n 8,10,12,14]

Both backends are timed in the same process through the ``backend=`` switch,
so ``HERDISC_DISABLE_NUMBA`` does not need to be toggled. The first numba
call (compilation or cache load) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from herdisc import _accel
from herdisc._kernels import disc_enumerate, herdisc_enumerate


def _pm1(m, n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return 2.0 * rng.integers(0, 2, size=(m, n)) - 1.0


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _ints(text):
    return [int(t) for t in text.split(",") if t]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--disc-n", type=_ints, default=[12, 16, 20])
    ap.add_argument("--herdisc-n", type=_ints, default=[8, 10, 12, 14])
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    if _accel.HAVE_NUMBA:
        disc_enumerate(_pm1(2, 3, 0), backend="numba")
        herdisc_enumerate(_pm1(2, 3, 0), backend="numba")
    else:
        print("numba not installed; timing the numpy backend only")

    print(f"{'kernel':<8} {'m x n':>7} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + f" {'speedup':>8}")
    jobs = [("disc", disc_enumerate, n) for n in args.disc_n]
    jobs += [("herdisc", herdisc_enumerate, n) for n in args.herdisc_n]
    for name, kernel, n in jobs:
        A = _pm1(n, n, n)
        times, answers = [], []
        for b in backends:
            t, out = _best_of(lambda: kernel(A, backend=b), args.repeat)
            times.append(t)
            answers.append(out[0])
        # both backends must agree before a timing means anything
        assert len(set(answers)) == 1, answers
        speedup = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{name:<8} {f'{n}x{n}':>7} " + " ".join(f"{t:12.4f}" for t in times) + f" {speedup}")


if __name__ == "__main__":
    main()
