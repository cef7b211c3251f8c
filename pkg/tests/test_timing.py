import pytest
from hypothesis import given, strategies as st

from cutsched.circuit import Circuit
from cutsched.cutter import apply_cuts
from cutsched.timing import (
    TimeModel,
    estimate_time,
    subcircuit_loads,
    tau_max,
    tau_max_from_loads,
    tau_min,
    tau_min_from_loads,
)


def test_realamp6_times(realamp6, realamp6_subs):
    assert estimate_time(realamp6) == 52
    assert [estimate_time(s.circuit) for s in realamp6_subs] == [22, 32]


def test_empty_circuit_takes_no_time():
    assert estimate_time(Circuit(2, [])) == 0


def test_budget_arithmetic_from_known_loads():
    loads = [(3, 22), (4, 32)]
    assert tau_min_from_loads(loads) == 128
    assert tau_max_from_loads(loads) == 194


def test_instance_times_include_inserted_gates(realamp6_subs):
    assert subcircuit_loads(realamp6_subs) == [(3, 23), (4, 33)]
    assert tau_min(realamp6_subs) == 132
    assert tau_max(realamp6_subs) == 201


def test_single_subcircuit(realamp6):
    subs = apply_cuts(realamp6, [])
    assert tau_min(subs) == tau_max(subs) == estimate_time(realamp6)


@given(st.lists(st.tuples(st.integers(1, 64), st.integers(0, 500)), min_size=1, max_size=6))
def test_budget_properties(loads):
    lo, hi = tau_min_from_loads(loads), tau_max_from_loads(loads)
    assert lo <= hi
    if len(loads) == 1:
        assert lo == hi
    assert tau_max_from_loads([(2 * e, t) for e, t in loads]) == 2 * hi


def test_custom_time_model(realamp6):
    assert estimate_time(realamp6, TimeModel(2, 3)) == 2 * 2 + 5 * 3
    with pytest.raises(ValueError):
        TimeModel(0, 1)
