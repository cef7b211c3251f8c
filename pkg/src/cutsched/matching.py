"""Minimum-weight maximum matching for the one-subcircuit-per-device case.

When there are no more subcircuits than devices and no device budget fits two
subcircuits, the scheduling problem is a rectangular assignment problem.  It
is solved with the Hungarian algorithm after padding to a square matrix with
zero-cost dummy rows.  Among optimal matchings the lexicographically smallest
one (rows in order, columns in pool order) is returned, which is the same
tie-break the ILP solver uses.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .ilp import LOAD_TOL, Schedule, ScheduleProblem, device_loads, objective_value
from .kernels import hungarian


class MatchingPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class AssignmentProblem:
    cost: np.ndarray  # rows = subcircuits, cols = devices, inf = infeasible
    source: ScheduleProblem | None = None

    def __post_init__(self):
        c = np.asarray(self.cost, dtype=float)
        object.__setattr__(self, "cost", c)
        if c.ndim != 2:
            raise MatchingPreconditionError("cost must be a matrix")
        n, m = c.shape
        if n > m:
            raise MatchingPreconditionError(
                f"{n} subcircuits but only {m} devices: matching cannot schedule this, use solve_ilp"
            )
        for i in range(n):
            if not np.isfinite(c[i]).any():
                raise MatchingPreconditionError(f"row {i} has no feasible device")

    @classmethod
    def from_schedule_problem(cls, p: ScheduleProblem) -> "AssignmentProblem":
        """Check the unit-capacity restriction and build ``W = Q * A``."""
        n, m = len(p.sub_ids), len(p.hw_ids)
        if n > m:
            raise MatchingPreconditionError(
                f"{n} subcircuits exceed {m} devices; this case cannot be solved by matching, use solve_ilp"
            )
        loads = p.loads
        cost = np.full((n, m), math.inf)
        for j in range(m):
            fits = sorted(loads[i] for i in range(n) if p.scores[i][j] is not None and loads[i] <= p.tau[j] + LOAD_TOL)
            if len(fits) >= 2 and fits[0] + fits[1] <= p.tau[j] + LOAD_TOL:
                raise MatchingPreconditionError(
                    f"budget of {p.hw_ids[j]} fits more than one subcircuit; this case cannot be solved by matching, use solve_ilp"
                )
            for i in range(n):
                q = p.scores[i][j]
                if q is not None and loads[i] <= p.tau[j] + LOAD_TOL:
                    cost[i, j] = q * p.areas[i]
        return cls(cost, p)


def _tight_lexmin(tight: list[list[int]], match: list[int], n_rows: int) -> list[int]:
    """Lexicographically smallest perfect matching within ``tight`` edges.

    ``match`` (row -> col) must already be perfect on the tight graph.  Rows
    ``0..n_rows-1`` are fixed in order; each one moves to the smallest column
    reachable by an alternating cycle through unfixed rows.
    """
    size = len(match)
    owner = [0] * size
    for r, c in enumerate(match):
        owner[c] = r
    fixed = [False] * size
    for i in range(n_rows):
        for j in tight[i]:
            if j >= match[i]:
                break
            r = owner[j]
            if fixed[r]:
                continue
            # alternating path from row r to column match[i] avoiding fixed rows and row i
            target = match[i]
            prev = {r: None}
            via = {}
            dq = deque([r])
            found = None
            while dq and found is None:
                x = dq.popleft()
                for c in tight[x]:
                    if c == j:
                        continue
                    if c == target:
                        found = (x, c)
                        break
                    y = owner[c]
                    if y in prev or fixed[y] or y == i:
                        continue
                    prev[y] = x
                    via[y] = c
                    dq.append(y)
            if found is None:
                continue
            x, c = found
            while True:
                match[x] = c
                owner[c] = x
                if prev[x] is None:
                    break
                c = via[x]
                x = prev[x]
            match[i] = j
            owner[j] = i
            break
        fixed[i] = True
    return match


def lexmin_assignment(cost) -> list[int]:
    """Optimal row -> column assignment (rows <= cols), lexicographic tie-break."""
    c = np.asarray(cost, dtype=float)
    n, m = c.shape
    square = np.zeros((m, m))
    square[:n] = c
    row_to_col, u, v = hungarian(square)
    scale = max(1.0, float(np.abs(c).max()) if c.size else 1.0)
    reduced = square - u[:, None] - v[None, :]
    tol = 1e-9 * scale
    tight = [sorted(np.nonzero(reduced[r] <= tol)[0].tolist()) for r in range(m)]
    match = [int(x) for x in row_to_col]
    for r in range(m):
        if match[r] not in tight[r]:
            tight[r] = sorted(set(tight[r]) | {match[r]})
    return _tight_lexmin(tight, match, n)[:n]


def solve_matching(ap: AssignmentProblem) -> Schedule:
    c = ap.cost
    n, m = c.shape
    finite = c[np.isfinite(c)]
    big_m = (n + 1) * (float(np.abs(finite).max()) + 1.0)
    work = np.where(np.isfinite(c), c, big_m)
    assign = tuple(lexmin_assignment(work))
    if any(not np.isfinite(c[i, j]) for i, j in enumerate(assign)):
        raise MatchingPreconditionError("no perfect matching over feasible pairs exists")
    if ap.source is not None:
        p = ap.source
        return Schedule(assign, objective_value(p, assign), device_loads(p, assign), "matching")
    total = 0.0
    for i, j in enumerate(assign):
        total += float(c[i, j])
    return Schedule(assign, total, tuple(0.0 for _ in range(m)), "matching")
