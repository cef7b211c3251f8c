import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from cutsched import _kernels_py, kernels

try:
    from cutsched import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
BACKENDS.append(pytest.param(compiled, id="cython", marks=pytest.mark.skipif(compiled is None, reason="extension not built")))


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("seed", range(40))
def test_hungarian_matches_scipy(impl, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 20))
    m = int(rng.integers(n, 25))
    c = rng.uniform(-1, 3, (n, m)) if seed % 4 else rng.integers(0, 3, (n, m)).astype(float)
    row_to_col, u, v = impl.hungarian(c)
    rows, cols = linear_sum_assignment(c)
    assert len(set(row_to_col.tolist())) == n
    assert c[np.arange(n), row_to_col].sum() == pytest.approx(c[rows, cols].sum(), abs=1e-9)
    # dual feasibility and complementary slackness
    reduced = c - u[:, None] - v[None, :]
    assert reduced.min() > -1e-9
    assert np.abs(reduced[np.arange(n), row_to_col]).max() < 1e-9


@pytest.mark.parametrize("impl", BACKENDS)
def test_hungarian_rejects_tall_matrices(impl):
    with pytest.raises(ValueError):
        impl.hungarian(np.ones((3, 2)))


def _random_tables(rng, num_cuts):
    # each cut lands in exactly two fragments, in random positions
    nf = int(rng.integers(1, 4))
    owners = [[] for _ in range(nf)]
    for cut in range(num_cuts):
        for f in rng.choice(nf, size=min(2, nf), replace=False):
            owners[f].append(cut)
    tables = []
    for ci in owners:
        rng.shuffle(ci)
        tables.append(rng.normal(size=(4 ** len(ci), 2 ** int(rng.integers(0, 3)))))
    return tables, owners


def _oracle(tables, cut_index, num_cuts):
    total = None
    for term in np.ndindex(*(4,) * num_cuts):
        acc = np.ones(1)
        for t, ci in zip(tables, cut_index):
            r = 0
            for c in ci:
                r = 4 * r + term[c]
            acc = np.kron(acc, t[r])
        total = acc if total is None else total + acc
    return total


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("seed", range(30))
def test_accumulate_terms_matches_kron_oracle(impl, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    tables, owners = _random_tables(rng, k)
    got = impl.accumulate_terms(tables, owners, k)
    assert np.allclose(got, _oracle(tables, owners, k), atol=1e-10)


@pytest.mark.skipif(compiled is None, reason="extension not built")
@pytest.mark.parametrize("seed", range(10))
def test_backends_agree_bit_for_bit_on_assignment(seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(0, 1, (15, 18))
    assert np.array_equal(compiled.hungarian(c)[0], _kernels_py.hungarian(c)[0])
    tables, owners = _random_tables(rng, 3)
    assert np.allclose(compiled.accumulate_terms(tables, owners, 3), _kernels_py.accumulate_terms(tables, owners, 3),
                       rtol=1e-13, atol=1e-13)


def test_dispatch_prefers_the_extension():
    forced = os.environ.get("CUTSCHED_PURE_PYTHON") == "1"
    assert kernels.BACKEND == ("cython" if compiled is not None and not forced else "python")


def test_environment_forces_the_fallback():
    env = dict(os.environ, CUTSCHED_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from cutsched import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
