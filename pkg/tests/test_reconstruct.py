import numpy as np
import pytest

from cutsched.circuit import Circuit, Gate
from cutsched.cutter import CutPoint, apply_cuts, expand_instances
from cutsched.reconstruct import CutPlan, ReconstructionError, reconstruct, term_count
from cutsched.sim import Distribution, simulate_ideal

from conftest import bell
from oracles import random_cut_circuit


def _ideal_instances(subs):
    return {inst: simulate_ideal(inst.circuit) for s in subs for inst in expand_instances(s)}


def _roundtrip(c, cuts):
    subs = apply_cuts(c, cuts)
    res = reconstruct(CutPlan.from_subcircuits(subs), _ideal_instances(subs))
    return res, simulate_ideal(c)


def test_bell_with_one_cut():
    res, want = _roundtrip(bell(), [CutPoint(0, 0)])
    assert res.term_count == 4
    assert res.raw.l1(want) < 1e-12


def test_ghz_chain():
    c = Circuit(4, [Gate("h", (0,)), Gate("cx", (0, 1)), Gate("cx", (1, 2)), Gate("cx", (2, 3))]).with_measurements()
    res, want = _roundtrip(c, [CutPoint(1, 2), CutPoint(2, 3)])
    assert res.term_count == 16
    assert res.raw.as_dict(1e-9) == pytest.approx({"0000": 0.5, "1111": 0.5}, abs=1e-12)
    assert res.raw.l1(want) < 1e-12


def test_no_cuts_passes_through(realamp6):
    res, want = _roundtrip(realamp6, [])
    assert res.term_count == 1
    assert np.array_equal(res.raw.probs, want.probs)


def test_term_count():
    assert [term_count(k) for k in range(4)] == [1, 4, 16, 64]
    with pytest.raises(ValueError):
        term_count(-1)


def test_realamp_single_cut(realamp6, realamp6_subs):
    res = reconstruct(CutPlan.from_subcircuits(realamp6_subs), _ideal_instances(realamp6_subs))
    assert res.raw.l1(simulate_ideal(realamp6)) < 1e-12


def test_cyclic_adder_fragments(adder6, adder6_subs):
    res = reconstruct(CutPlan.from_subcircuits(adder6_subs), _ideal_instances(adder6_subs))
    assert res.term_count == 16
    assert res.raw.l1(simulate_ideal(adder6)) < 1e-12


@pytest.mark.parametrize("seed", range(50))
def test_random_chains_reconstruct_exactly(seed):
    rng = np.random.default_rng(seed)
    c, cuts = random_cut_circuit(rng, int(rng.integers(3, 8)), int(rng.integers(1, 4)))
    res, want = _roundtrip(c, cuts)
    assert res.raw.l1(want) < 1e-10


def test_accepts_key_tuples(realamp6_subs):
    by_inst = _ideal_instances(realamp6_subs)
    by_key = {i.key: d for i, d in by_inst.items()}
    plan = CutPlan.from_subcircuits(realamp6_subs)
    assert np.array_equal(reconstruct(plan, by_key).raw.probs, reconstruct(plan, by_inst).raw.probs)
    assert sorted(by_key) == sorted(plan.required_instances())


def test_missing_instance_is_named(realamp6_subs):
    dists = {i.key: d for i, d in _ideal_instances(realamp6_subs).items()}
    dists.pop((1, (), ("plus_i",)))
    with pytest.raises(ReconstructionError, match="plus_i"):
        reconstruct(CutPlan.from_subcircuits(realamp6_subs), dists)


def test_wrong_bit_width_is_rejected(realamp6_subs):
    dists = {i.key: d for i, d in _ideal_instances(realamp6_subs).items()}
    dists[(0, ("X",), ())] = Distribution(np.array([0.5, 0.5]))
    with pytest.raises(ReconstructionError, match="bits"):
        reconstruct(CutPlan.from_subcircuits(realamp6_subs), dists)


def test_plan_requires_both_cut_ends(realamp6_subs):
    with pytest.raises(ReconstructionError):
        CutPlan.from_subcircuits(realamp6_subs[:1])


def test_clipped_is_normalized_and_nonnegative(realamp6_subs):
    # perturb one instance so the raw result leaves the simplex
    dists = {i.key: d for i, d in _ideal_instances(realamp6_subs).items()}
    key = (1, (), ("plus",))
    p = dists[key].probs.copy()
    p[:] = 0.0
    p[-1] = 1.0
    dists[key] = Distribution(p, dists[key].num_bits)
    res = reconstruct(CutPlan.from_subcircuits(realamp6_subs), dists)
    assert res.raw.probs.min() < 0
    assert res.clipped.probs.min() >= 0
    assert res.clipped.total() == pytest.approx(1.0)
    assert res.to_dict()["negative_mass"] > 0


def test_depolarized_downstream_keeps_the_upstream_marginal():
    # reconstruction is linear in each fragment; a fully mixed downstream
    # fragment contributes only through the identity term
    c = Circuit(2, [Gate("h", (0,)), Gate("ry", (0,), 0.7), Gate("cx", (0, 1)), Gate("ry", (1,), 0.4)]).with_measurements()
    subs = apply_cuts(c, [CutPoint(1, 2)])
    ideal = _ideal_instances(subs)
    mix = 0.1
    mixed = {}
    for inst, d in ideal.items():
        if inst.base.prepare_cut_wires:
            d = Distribution((1 - mix) * d.probs + mix / d.probs.size, d.num_bits)
        mixed[inst] = d
    res = reconstruct(CutPlan.from_subcircuits(subs), mixed).raw
    want = simulate_ideal(c).probs.reshape(2, 2)
    upstream = want.sum(axis=1)
    expected = (1 - mix) * want + mix * np.outer(upstream, [0.5, 0.5])
    assert np.abs(res.probs - expected.ravel()).max() < 1e-12
