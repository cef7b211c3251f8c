import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutsched.circuit import Circuit, Gate
from cutsched.hardware import T_5, HardwareSpec
from cutsched.sim import (
    Distribution,
    NoiseModel,
    ResourceGuardError,
    SimulationError,
    density_matrix,
    fidelity,
    noise_model_for,
    simulate_ideal,
    simulate_noisy,
)

from conftest import bell
from oracles import bhattacharyya, random_circuit


def _noisy_from_ideal(c):
    return simulate_noisy(c, NoiseModel.ideal(c.num_qubits))


def test_basic_states():
    h = simulate_ideal(Circuit(1, [Gate("h", (0,))]).with_measurements())
    assert h["0"] == pytest.approx(0.5) and h["1"] == pytest.approx(0.5)
    x = simulate_ideal(Circuit(1, [Gate("x", (0,))]).with_measurements())
    assert x["1"] == pytest.approx(1.0)
    b = simulate_ideal(bell())
    assert b.as_dict(1e-12) == pytest.approx({"00": 0.5, "11": 0.5})


def test_bit_order_puts_qubit_zero_first():
    d = simulate_ideal(Circuit(3, [Gate("x", (0,))]).with_measurements())
    assert d["100"] == pytest.approx(1.0)


def test_partial_measurement_marginalizes():
    c = Circuit(2, [Gate("h", (0,)), Gate("cx", (0, 1)), Gate("measure", (1,))])
    assert simulate_ideal(c).as_dict(1e-12) == pytest.approx({"0": 0.5, "1": 0.5})


@pytest.mark.parametrize("seed", range(100))
def test_density_matrix_agrees_with_statevector(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, int(rng.integers(1, 6)), int(rng.integers(0, 30)))
    a, b = simulate_ideal(c), _noisy_from_ideal(c)
    assert np.abs(a.probs - b.probs).max() < 1e-12


def test_readout_flip():
    c = Circuit(1, [Gate("x", (0,))]).with_measurements()
    d = simulate_noisy(c, NoiseModel((0.0,), {}, (0.03,)))
    assert d["0"] == pytest.approx(0.03, abs=1e-15) and d["1"] == pytest.approx(0.97, abs=1e-15)


def test_bell_with_two_qubit_depolarizing():
    p = 0.08
    d = simulate_noisy(bell(), NoiseModel((0.0, 0.0), {(0, 1): p}, (0.0, 0.0)))
    assert d["00"] == pytest.approx((1 - p) / 2 + p / 4, abs=1e-14)
    assert d["11"] == pytest.approx((1 - p) / 2 + p / 4, abs=1e-14)
    assert d["01"] == pytest.approx(p / 4, abs=1e-14)
    assert d["10"] == pytest.approx(p / 4, abs=1e-14)


def test_single_qubit_depolarizing_is_a_contraction_to_mixed():
    p = 0.2
    d = simulate_noisy(Circuit(1, [Gate("x", (0,))]).with_measurements(), NoiseModel((p,), {}, (0.0,)))
    assert d["0"] == pytest.approx(p / 2)


@pytest.mark.parametrize("seed", range(20))
def test_noisy_state_stays_a_density_matrix(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, 20)
    p2 = {(a, b): float(rng.uniform(0, 0.2)) for a in range(n) for b in range(a + 1, n)}
    nm = NoiseModel(tuple(rng.uniform(0, 0.05, n)), p2, tuple(rng.uniform(0, 0.1, n)))
    rho = density_matrix(c, nm).reshape(1 << n, 1 << n)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    d = simulate_noisy(c, nm)
    assert d.total() == pytest.approx(1.0, abs=1e-12) and d.probs.min() >= 0


def _hw():
    rng = np.random.default_rng(2)
    return HardwareSpec("t5", 5, T_5, tuple(rng.uniform(1e-4, 1e-3, 5)), tuple(rng.uniform(5e-3, 3e-2, 4)),
                        tuple(rng.uniform(1e-2, 4e-2, 5)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_fidelity_falls_as_noise_grows(seed):
    rng = np.random.default_rng(seed)
    gates = [Gate("h", (1,)), Gate("cx", (1, 0)), Gate("cx", (1, 2)), Gate("ry", (2,), float(rng.uniform(-3, 3)))]
    c = Circuit(3, gates).with_measurements()
    ideal = simulate_ideal(c)
    nm = noise_model_for(c, _hw(), (0, 1, 3))
    fids = [fidelity(ideal, simulate_noisy(c, nm.scaled(lam))) for lam in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert fids[0] == pytest.approx(1.0, abs=1e-12)
    assert all(a >= b - 1e-12 for a, b in zip(fids, fids[1:]))


def test_noise_model_follows_the_layout():
    hw = _hw()
    c = bell()
    nm = noise_model_for(c, hw, (3, 1))
    assert nm.p2[(0, 1)] == hw.err_2q[hw.edge_index()[(1, 3)]]
    assert nm.readout == (hw.err_readout[3], hw.err_readout[1])
    with pytest.raises(SimulationError):
        noise_model_for(c, hw, (0, 2))


def test_fidelity_examples():
    a = Distribution.from_dict({"0": 1.0})
    b = Distribution.from_dict({"0": 0.5, "1": 0.5})
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(a, b) == pytest.approx(0.5)
    assert fidelity(a, Distribution.from_dict({"1": 1.0})) == 0.0
    quasi = Distribution(np.array([0.7, 0.4, -0.1, 0.0]))
    assert fidelity(quasi, quasi) == pytest.approx(1.0)
    with pytest.raises(SimulationError):
        fidelity(a, quasi)


@pytest.mark.parametrize("seed", range(10))
def test_fidelity_matches_independent_formula(seed):
    rng = np.random.default_rng(seed)
    p, q = rng.uniform(0, 1, 8), rng.uniform(-0.05, 1, 8)
    assert fidelity(Distribution(p / p.sum()), Distribution(q)) == pytest.approx(bhattacharyya(p, q), abs=1e-12)


def test_guards():
    with pytest.raises(ResourceGuardError):
        simulate_noisy(Circuit(13, []).with_measurements(), NoiseModel.ideal(13))
    with pytest.raises(ResourceGuardError):
        simulate_ideal(Circuit(25, []).with_measurements())
    with pytest.raises(SimulationError, match="no measurements"):
        simulate_ideal(Circuit(2, [Gate("h", (0,))]))
    with pytest.raises(SimulationError):
        NoiseModel((1.0,), {}, (0.0,))


def test_scaling_caps_and_zero_scale():
    nm = NoiseModel((0.3,), {}, (0.3,))
    assert nm.scaled(0.0) == NoiseModel.ideal(1)
    big = nm.scaled(10.0)
    assert big.p1[0] < 1.0 and big.readout[0] == 0.5


def test_distribution_round_trip():
    d = Distribution.from_dict({"01": 0.25, "10": 0.75})
    assert d.num_bits == 2 and d.as_dict() == {"01": 0.25, "10": 0.75}
    assert math.isclose(d.l1(Distribution.from_dict({"01": 0.25, "10": 0.75})), 0.0)
