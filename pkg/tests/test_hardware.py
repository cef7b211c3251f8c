import json

import pytest

from cutsched.benchgen import BenchSpec, generate
from cutsched.circuit import Circuit
from cutsched.hardware import (
    HardwarePool,
    SchemaError,
    feasible_hardware,
    hetero_pool,
    jitter_pool,
    load_pool,
    pool_from_data,
    ibm_pool,
)


def _tiny(**over):
    d = {"name": "one", "num_qubits": 1, "coupling": [], "err_1q": [0.0], "err_2q": [], "err_readout": [0.0]}
    d.update(over)
    return d


def test_bundled_uniform_pool_has_twelve_devices():
    pool = load_pool("ibm_pool.json")
    assert len(pool) == 12
    assert pool == ibm_pool()
    hanoi = pool.by_name("ibmq_hanoi")
    assert set(hanoi.err_2q) == {8.3e-3} and set(hanoi.err_1q) == {2.1e-4} and set(hanoi.err_readout) == {1e-2}
    quito = pool.by_name("ibmq_quito")
    assert quito.num_qubits == 5 and set(quito.err_readout) == {4.15e-2}


def test_bundled_hetero_pool_is_seed_zero_jitter():
    assert load_pool("ibm_hetero.json") == hetero_pool(0)


def test_load_is_idempotent(tmp_path):
    p = tmp_path / "pool.json"
    p.write_text(ibm_pool().to_json())
    assert load_pool(p) == load_pool(p) == ibm_pool()


def test_single_zero_error_qubit_is_valid():
    pool = pool_from_data([_tiny()])
    assert pool[0].num_qubits == 1


@pytest.mark.parametrize("over, where", [
    ({"err_readout": [1.5]}, "err_readout"),
    ({"coupling": [[0, 3]], "err_2q": [0.01]}, "coupling"),
    ({"err_1q": [0.0, 0.0]}, "err_1q"),
    ({"err_2q": [0.1]}, "err_2q"),
])
def test_schema_errors_name_the_field(tmp_path, over, where):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps([_tiny(**over)]))
    with pytest.raises(SchemaError) as e:
        load_pool(p)
    assert where in e.value.path


def test_missing_field_and_duplicates():
    d = _tiny()
    del d["err_1q"]
    with pytest.raises(SchemaError, match="err_1q"):
        pool_from_data([d])
    with pytest.raises(SchemaError):
        pool_from_data([_tiny(), _tiny()])
    with pytest.raises(SchemaError):
        HardwarePool([])


def test_feasibility(uniform_pool):
    four = generate(BenchSpec("real_amplitudes", 4))
    assert feasible_hardware(four, uniform_pool) == list(uniform_pool)
    assert feasible_hardware(generate(BenchSpec("real_amplitudes", 28)), uniform_pool) == []
    five = generate(BenchSpec("real_amplitudes", 5))
    assert uniform_pool.by_name("ibmq_quito") in feasible_hardware(five, uniform_pool)
    assert uniform_pool.by_name("ibmq_quito") not in feasible_hardware(Circuit(6, []), uniform_pool)


def test_feasibility_is_monotone(uniform_pool):
    sets = [len(feasible_hardware(Circuit(n, []), uniform_pool)) for n in range(1, 30)]
    assert sets == sorted(sets, reverse=True)


def test_jitter_is_seeded_and_bounded(uniform_pool):
    a, b = jitter_pool(uniform_pool, 3), jitter_pool(uniform_pool, 3)
    assert a == b and a != jitter_pool(uniform_pool, 4)
    for base, jit in zip(uniform_pool, a):
        for x, y in zip(base.err_2q, jit.err_2q):
            assert 0.5 * x <= y <= 1.5 * x
