"""Exact branch-and-bound solver for the noise- and time-aware assignment.

Minimizes ``sum_i Q[i][X(i)] * A[i]`` subject to every subcircuit being placed
exactly once and each device's load ``sum eta_i * t_i`` staying within its
budget ``tau_j``.

Ties: objectives within ``TIE_TOL`` (relative) are equal, and the
lexicographically smallest assignment vector wins, where an assignment vector
lists device positions (pool order) for subcircuits in problem order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

TIE_TOL = 1e-12
LOAD_TOL = 1e-9


class InfeasibleScheduleError(RuntimeError):
    """No assignment meets the budgets; ``budgets`` is a minimal set of devices
    whose budgets would have to grow for a schedule to exist."""

    def __init__(self, msg: str, budgets: Sequence[str] = ()):
        super().__init__(msg)
        self.budgets = list(budgets)


@dataclass(frozen=True)
class ScheduleProblem:
    sub_ids: tuple[str, ...]
    hw_ids: tuple[str, ...]
    scores: tuple[tuple[Optional[float], ...], ...]  # None marks j not in H_i
    areas: tuple[float, ...]  # normalized, in (0, 1]
    eta: tuple[int, ...]
    times: tuple[float, ...]
    tau: tuple[float, ...]

    def __post_init__(self):
        n, m = len(self.sub_ids), len(self.hw_ids)
        if len(self.scores) != n or any(len(r) != m for r in self.scores):
            raise ValueError("score matrix shape does not match subcircuits x hardware")
        for f in ("areas", "eta", "times"):
            if len(getattr(self, f)) != n:
                raise ValueError(f"{f} must have one entry per subcircuit")
        if len(self.tau) != m:
            raise ValueError("tau must have one entry per device")
        for i, row in enumerate(self.scores):
            if all(q is None for q in row):
                raise ValueError(f"subcircuit {self.sub_ids[i]} has no feasible hardware")
        if any(not 0 < a <= 1 for a in self.areas):
            raise ValueError("normalized areas must lie in (0, 1]")
        if any(t < 0 for t in self.tau):
            raise ValueError("budgets must be non-negative")
        if any(e < 1 for e in self.eta):
            raise ValueError("eta must be a positive integer")

    @classmethod
    def build(cls, sub_ids, hw_ids, scores, raw_areas, eta, times, tau) -> "ScheduleProblem":
        """Construct from raw areas (max-normalized here)."""
        top = max(raw_areas)
        return cls(
            tuple(sub_ids),
            tuple(hw_ids),
            tuple(tuple(None if q is None else float(q) for q in row) for row in scores),
            tuple(a / top for a in raw_areas),
            tuple(int(e) for e in eta),
            tuple(float(t) for t in times),
            tuple(float(t) for t in tau),
        )

    @property
    def loads(self) -> list[float]:
        return [e * t for e, t in zip(self.eta, self.times)]

    def feasible(self, i: int) -> list[int]:
        return [j for j, q in enumerate(self.scores[i]) if q is not None]

    def with_tau(self, tau: Sequence[float]) -> "ScheduleProblem":
        return ScheduleProblem(self.sub_ids, self.hw_ids, self.scores, self.areas, self.eta, self.times, tuple(tau))

    def to_dict(self) -> dict:
        return {
            "subcircuits": list(self.sub_ids),
            "hardware": list(self.hw_ids),
            "Q": [list(r) for r in self.scores],
            "A": list(self.areas),
            "eta": list(self.eta),
            "t": list(self.times),
            "tau": list(self.tau),
        }


@dataclass(frozen=True)
class Schedule:
    assignment: tuple[int, ...]  # device position per subcircuit
    objective_value: float
    loads: tuple[float, ...]  # per device
    method: str = "ilp"
    stats: Mapping[str, int] = field(default_factory=dict)

    def named(self, p: ScheduleProblem) -> dict[str, str]:
        return {p.sub_ids[i]: p.hw_ids[j] for i, j in enumerate(self.assignment)}

    def to_dict(self, p: ScheduleProblem) -> dict:
        return {
            "method": self.method,
            "assignment": self.named(p),
            "objective": self.objective_value,
            "loads": {p.hw_ids[j]: self.loads[j] for j in range(len(p.hw_ids))},
            "tau": {p.hw_ids[j]: p.tau[j] for j in range(len(p.hw_ids))},
        }


def objective_value(p: ScheduleProblem, assignment: Sequence[int]) -> float:
    total = 0.0
    for i, j in enumerate(assignment):
        q = p.scores[i][j]
        if q is None:
            raise ValueError(f"{p.sub_ids[i]} cannot run on {p.hw_ids[j]}")
        total += q * p.areas[i]
    return total


def device_loads(p: ScheduleProblem, assignment: Sequence[int]) -> tuple[float, ...]:
    loads = [0.0] * len(p.hw_ids)
    for i, j in enumerate(assignment):
        loads[j] += p.eta[i] * p.times[i]
    return tuple(loads)


def verify_schedule(p: ScheduleProblem, s: Schedule) -> bool:
    """Both constraint families hold and the stated objective recomputes."""
    a = s.assignment
    if len(a) != len(p.sub_ids):
        return False
    for i, j in enumerate(a):
        if not isinstance(j, int) or not 0 <= j < len(p.hw_ids) or p.scores[i][j] is None:
            return False
    loads = device_loads(p, a)
    if any(load > tau + LOAD_TOL for load, tau in zip(loads, p.tau)):
        return False
    if len(s.loads) != len(loads) or any(abs(x - y) > LOAD_TOL for x, y in zip(loads, s.loads)):
        return False
    return abs(objective_value(p, a) - s.objective_value) <= 1e-12


def is_better(obj: float, assign: tuple, best_obj: float, best_assign: Optional[tuple]) -> bool:
    """Documented ordering: lower objective, ties (``TIE_TOL``) to the smaller vector."""
    if best_assign is None:
        return True
    tol = TIE_TOL * max(1.0, abs(best_obj))
    if obj < best_obj - tol:
        return True
    if obj > best_obj + tol:
        return False
    return assign < best_assign


def _search(p: ScheduleProblem, tau: Sequence[float], first_only: bool = False):
    n = len(p.sub_ids)
    loads_i = p.loads
    contrib = [[None if q is None else q * p.areas[i] for q in row] for i, row in enumerate(p.scores)]
    cands = []
    for i in range(n):
        js = [j for j in p.feasible(i) if loads_i[i] <= tau[j] + LOAD_TOL]
        js.sort(key=lambda j: (contrib[i][j], j))
        cands.append(js)
    if any(not c for c in cands):
        return None, {"nodes": 0}

    def regret(i):
        c = cands[i]
        gap = contrib[i][c[1]] - contrib[i][c[0]] if len(c) > 1 else math.inf
        return (-gap, i)

    order = sorted(range(n), key=regret)
    min_rest = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        i = order[k]
        min_rest[k] = min_rest[k + 1] + contrib[i][cands[i][0]]

    assign = [-1] * n
    load = [0.0] * len(p.hw_ids)
    best = {"obj": math.inf, "assign": None}
    stats = {"nodes": 0}

    def dfs(k: int, partial: float) -> bool:
        stats["nodes"] += 1
        if best["assign"] is not None:
            bound = partial + min_rest[k]
            if bound > best["obj"] + TIE_TOL * max(1.0, abs(best["obj"])) + 1e-15:
                return False
        if k == n:
            a = tuple(assign)
            obj = objective_value(p, a)
            if is_better(obj, a, best["obj"], best["assign"]):
                best["obj"], best["assign"] = obj, a
            return first_only
        i = order[k]
        for j in cands[i]:
            if load[j] + loads_i[i] > tau[j] + LOAD_TOL:
                continue
            assign[i] = j
            load[j] += loads_i[i]
            stop = dfs(k + 1, partial + contrib[i][j])
            load[j] -= loads_i[i]
            assign[i] = -1
            if stop:
                return True
        return False

    dfs(0, 0.0)
    return best["assign"], stats


def minimal_violating_budgets(p: ScheduleProblem) -> list[str]:
    """Inclusion-minimal set of devices whose budgets must be relaxed."""
    keep = list(range(len(p.hw_ids)))
    for j in range(len(p.hw_ids)):
        trial = [x for x in keep if x != j]
        tau = [math.inf if x in trial else p.tau[x] for x in range(len(p.hw_ids))]
        found, _ = _search(p, tau, first_only=True)
        if found is not None:
            keep = trial
    return [p.hw_ids[j] for j in keep]


def solve_ilp(p: ScheduleProblem) -> Schedule:
    if sum(p.tau) + LOAD_TOL < sum(p.loads):
        budgets = minimal_violating_budgets(p)
        raise InfeasibleScheduleError(
            f"total budget {sum(p.tau)} is below total load {sum(p.loads)}; relax {budgets}", budgets
        )
    assign, stats = _search(p, p.tau)
    if assign is None:
        budgets = minimal_violating_budgets(p)
        raise InfeasibleScheduleError(f"no assignment fits the budgets; relax {budgets}", budgets)
    return Schedule(assign, objective_value(p, assign), device_loads(p, assign), "ilp", stats)
