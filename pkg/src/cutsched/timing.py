"""Level-based execution-time estimates and per-device time budgets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import Circuit, levels
from .cutter import Subcircuit, expand_instances, instance_count


@dataclass(frozen=True)
class TimeModel:
    t1: float = 1
    t2: float = 10

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("level durations must be positive")


def estimate_time(c: Circuit, m: TimeModel = TimeModel()) -> float:
    lv = levels(c)
    return lv.kappa1 * m.t1 + lv.kappa2 * m.t2


def subcircuit_time(s: Subcircuit, m: TimeModel = TimeModel()) -> float:
    """Longest instance time of ``s``; inserted basis/prep gates occupy levels too."""
    return max(estimate_time(inst.circuit, m) for inst in expand_instances(s))


def subcircuit_loads(subs: Sequence[Subcircuit], m: TimeModel = TimeModel()) -> list[tuple[int, float]]:
    """``(eta_i, t_i)`` per subcircuit, with eta_i the instance count."""
    return [(instance_count(s), subcircuit_time(s, m)) for s in subs]


def tau_min_from_loads(loads: Iterable[tuple[int, float]]) -> float:
    return max(eta * t for eta, t in loads)


def tau_max_from_loads(loads: Iterable[tuple[int, float]]) -> float:
    return sum(eta * t for eta, t in loads)


def tau_min(subs: Sequence[Subcircuit], m: TimeModel = TimeModel()) -> float:
    return tau_min_from_loads(subcircuit_loads(subs, m))


def tau_max(subs: Sequence[Subcircuit], m: TimeModel = TimeModel()) -> float:
    return tau_max_from_loads(subcircuit_loads(subs, m))
