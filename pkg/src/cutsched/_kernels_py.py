"""Pure-Python versions of the hot kernels (used when the extension is absent)."""

from __future__ import annotations

import numpy as np


def hungarian(cost):
    """Min-cost assignment of every row of an ``n x m`` matrix (``n <= m``).

    Returns ``(row_to_col, u, v)`` with duals satisfying
    ``cost[i, j] - u[i] - v[j] >= 0`` and equality on assigned pairs.
    """
    a = np.asarray(cost, dtype=np.float64)
    n, m = a.shape
    if n > m:
        raise ValueError("hungarian needs rows <= columns")
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    rows = a.tolist()
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = rows[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            row_to_col[p[j] - 1] = j - 1
    return row_to_col, np.array(u[1:]), np.array(v[1:])


def accumulate_terms(tables, cut_index, num_cuts):
    """Sum the product of fragment rows over all ``4**num_cuts`` Pauli terms.

    ``tables[f]`` has shape ``(4**len(cut_index[f]), out_f)``; the row of
    fragment ``f`` for a term is the base-4 number formed by that term's
    labels on ``cut_index[f]`` (first cut most significant).  The result is
    the flattened tensor product in fragment order.
    """
    total = 1
    for t in tables:
        total *= t.shape[1]
    out = np.zeros(total)
    digits = [0] * num_cuts
    weights = [[4 ** (len(ci) - 1 - k) for k in range(len(ci))] for ci in cut_index]
    for term in range(4 ** num_cuts):
        rest = term
        for k in range(num_cuts - 1, -1, -1):
            digits[k] = rest & 3
            rest >>= 2
        acc = None
        for t, ci, w in zip(tables, cut_index, weights):
            r = 0
            for c, wk in zip(ci, w):
                r += digits[c] * wk
            row = t[r]
            acc = row if acc is None else np.multiply.outer(acc, row).ravel()
        out += acc
    return out
