"""Compiled vs pure-Python refinement on random raw models.

    python3 benchmarks/bench_refine.py --sizes 1000 10000 50000

Times the refinement rounds only (the integer encoding is shared and timed
separately), best of ``--repeat`` runs, and checks both backends agree.
"""

from __future__ import annotations

import argparse
import random
import time

from futs import kernels
from futs.generate import random_futs_model


def rounds(enc, n, backend):
    blocks, nblocks, count = [0] * n, 1 if n else 0, 0
    while True:
        new, k = kernels.refine_round(enc, blocks, nblocks, backend)
        count += 1
        if k == nblocks:
            return blocks, count
        blocks, nblocks = new, k


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 50_000])
    ap.add_argument("--degree", type=int, default=3, help="max successors per row")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if not kernels.HAVE_COMPILED:
        print("compiled kernel not available; only the Python backend is timed")
    print(f"{'states':>8} {'nnz':>9} {'blocks':>8} {'rounds':>6} {'encode s':>9} "
          f"{'python s':>9} {'compiled s':>10} {'speedup':>8}")
    for n in args.sizes:
        m = random_futs_model(random.Random(args.seed), n, n_relations=2, out_degree=args.degree)
        t_enc, enc = best(lambda: kernels.encode(m), 1)
        t_py, (b_py, r) = best(lambda: rounds(enc, n, "python"), args.repeat)
        if kernels.HAVE_COMPILED:
            t_c, (b_c, _) = best(lambda: rounds(enc, n, "compiled"), args.repeat)
            assert list(b_c) == list(b_py), "backends disagree"
            comp, speed = f"{t_c:10.4f}", f"{t_py / t_c:7.1f}x"
        else:
            comp, speed = f"{'-':>10}", f"{'-':>8}"
        print(f"{n:>8} {len(enc.keys):>9} {len(set(b_py)):>8} {r:>6} "
              f"{t_enc:9.3f} {t_py:9.4f} {comp} {speed}")


if __name__ == "__main__":
    main()
