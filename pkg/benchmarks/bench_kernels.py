"""Compiled vs pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeats N]

Times ``hungarian`` on square random cost matrices and ``accumulate_terms``
on chains of four-qubit fragment tables, for both backends, and prints one
row per case with the speedup.  Results are checked to agree before timing.
"""

import argparse
import sys
import time

import numpy as np

from cutsched import _kernels_py

try:
    from cutsched import _kernels as compiled
except ImportError:
    sys.exit("compiled extension not built; run `pip install --no-build-isolation -e .` first")


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def chain_tables(rng, num_cuts, out_bits=4):
    # fragment f holds cut f-1 (prepared) and cut f (measured)
    owners = [[0]] + [[k - 1, k] for k in range(1, num_cuts)] + [[num_cuts - 1]]
    tables = [rng.normal(size=(4 ** len(ci), 2 ** out_bits)) for ci in owners]
    return tables, owners


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []
    for n in (20, 50, 100, 200):
        c = rng.uniform(0, 1, (n, n))
        a, b = compiled.hungarian(c)[0], _kernels_py.hungarian(c)[0]
        assert np.isclose(c[np.arange(n), a].sum(), c[np.arange(n), b].sum())
        rows.append((f"hungarian n={n}", best_of(lambda: _kernels_py.hungarian(c), args.repeats),
                     best_of(lambda: compiled.hungarian(c), args.repeats)))
    for k in (1, 2, 3, 4):
        tables, owners = chain_tables(rng, k)
        assert np.allclose(compiled.accumulate_terms(tables, owners, k), _kernels_py.accumulate_terms(tables, owners, k))
        rows.append((f"accumulate_terms k={k}", best_of(lambda: _kernels_py.accumulate_terms(tables, owners, k), args.repeats),
                     best_of(lambda: compiled.accumulate_terms(tables, owners, k), args.repeats)))
    print(f"{'case':<24}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, py, cy in rows:
        print(f"{name:<24}{py * 1e3:>12.3f}{cy * 1e3:>12.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
