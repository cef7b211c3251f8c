import math

import pytest

from cutsched.benchgen import BenchSpec, generate, reference_cuts
from cutsched.circuit import Circuit, Gate
from cutsched.cutter import CutPoint, apply_cuts
from cutsched.hardware import hetero_pool, ibm_pool


def bell(measure=True):
    c = Circuit(2, [Gate("h", (0,)), Gate("cx", (0, 1))], "bell")
    return c.with_measurements() if measure else c


def split5():
    """Five qubits cut on wire 2: a 3-qubit block of depth 7, then one of depth 2."""
    gates = []
    for k in range(7):
        gates.append(Gate("cx", (0, 1)) if k % 2 == 0 else Gate("cx", (1, 2)))
    gates += [Gate("ry", (2,), math.pi / 3), Gate("cx", (2, 3)), Gate("cx", (3, 4))]
    return Circuit(5, gates, "split5").with_measurements(), [CutPoint(2, 5)]


@pytest.fixture(scope="session")
def realamp6():
    return generate(BenchSpec("real_amplitudes", 6))


@pytest.fixture(scope="session")
def realamp6_subs(realamp6):
    return apply_cuts(realamp6, [CutPoint(3, 7)])


@pytest.fixture(scope="session")
def adder6():
    return generate(BenchSpec("ripple_adder", 6))


@pytest.fixture(scope="session")
def adder6_subs(adder6):
    cuts = [CutPoint(q, g) for q, g in reference_cuts(BenchSpec("ripple_adder", 6), 2)]
    return apply_cuts(adder6, cuts)


@pytest.fixture(scope="session")
def uniform_pool():
    return ibm_pool()


@pytest.fixture(scope="session")
def hetero():
    return hetero_pool(0)
