"""Acceptance gate: one PASS/FAIL line per criterion, at its stated tolerance.

Criteria 6 and the fidelity half of 7 are directional claims about cutting
under noise.  They are checked as stated and are expected to fail under the
local depolarizing-plus-readout model; see README "Results".
"""

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from cutsched.benchgen import BenchSpec, generate, reference_cuts
from cutsched.cutter import CutPoint, apply_cuts, expand_instances
from cutsched.ilp import InfeasibleScheduleError, objective_value, solve_ilp, verify_schedule
from cutsched.layout import score_matrix
from cutsched.matching import AssignmentProblem, solve_matching
from cutsched.pipeline import (
    JobFile,
    build_problem,
    cmd_pipeline,
    cmd_sweep_pairs,
    dumps,
    resolve_budgets,
)
from cutsched.reconstruct import CutPlan, reconstruct, term_count
from cutsched.sim import simulate_ideal
from cutsched.timing import estimate_time, subcircuit_loads

from oracles import brute_force_schedule, random_cut_circuit, random_problem, unit_capacity_problem

JOBS = Path(__file__).resolve().parent.parent / "jobs"
SEEDS = range(10)

pytestmark = pytest.mark.slow


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def test_criterion_1_time_model(capsys, realamp6, realamp6_subs):
    t0 = time.perf_counter()
    got = (estimate_time(realamp6), *[estimate_time(s.circuit) for s in realamp6_subs])
    elapsed = time.perf_counter() - t0
    ok = got == (52, 22, 32) and elapsed < 1.0
    report(capsys, 1, ok, f"uncut/subcircuit times {got} (want (52, 22, 32)) in {elapsed:.3f}s")


def test_criterion_2_reconstruction_exactness(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        c, cuts = random_cut_circuit(rng, int(rng.integers(4, 9)), int(rng.integers(1, 3)))
        subs = apply_cuts(c, cuts)
        dists = {i.key: simulate_ideal(i.circuit) for s in subs for i in expand_instances(s)}
        rec = reconstruct(CutPlan.from_subcircuits(subs), dists)
        worst = max(worst, rec.raw.l1(simulate_ideal(c)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 60
    report(capsys, 2, ok, f"worst L1 over 50 circuits {worst:.2e} (tol 1e-8) in {elapsed:.1f}s")


def test_criterion_3_ilp_matches_enumeration(capsys):
    t0 = time.perf_counter()
    obj_bad = assign_bad = infeasible = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        p = random_problem(rng, ties=seed % 3 == 0)
        want, want_obj = brute_force_schedule(p)
        try:
            s = solve_ilp(p)
        except InfeasibleScheduleError:
            infeasible += 1
            obj_bad += want is not None
            continue
        if want is None:
            obj_bad += 1
            continue
        obj_bad += objective_value(p, want) != s.objective_value
        assign_bad += s.assignment != want
    elapsed = time.perf_counter() - t0
    ok = obj_bad == 0 and assign_bad == 0 and elapsed < 30
    report(capsys, 3, ok, f"200 problems: {obj_bad} objective and {assign_bad} assignment mismatches "
                          f"({infeasible} agreed infeasible) in {elapsed:.1f}s")


def test_criterion_4_matching_equals_ilp(capsys):
    t0 = time.perf_counter()
    bad = 0
    for seed in range(300):
        p = unit_capacity_problem(np.random.default_rng(seed), ties=seed % 2 == 0)
        bad += solve_matching(AssignmentProblem.from_schedule_problem(p)).objective_value != solve_ilp(p).objective_value
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 30
    report(capsys, 4, ok, f"300 unit-capacity problems: {bad} objective mismatches in {elapsed:.1f}s")


def _job_schedules(job):
    c, pool = job.load_circuit(), job.load_pool()
    subs = apply_cuts(c, job.cut_points())
    q = score_matrix(subs, pool)
    loads = subcircuit_loads(subs, job.time_model())
    out = []
    for tau in ("min", "max"):
        p = build_problem(subs, pool, q, loads, resolve_budgets(replace(job, tau=tau), loads, pool))
        out.append((p, solve_ilp(p)))
        try:
            out.append((p, solve_matching(AssignmentProblem.from_schedule_problem(p))))
        except ValueError:
            pass  # roomy budgets fall outside the matching case
    return out


def test_criterion_5_constraint_soundness(capsys):
    checked = violations = 0
    for path in sorted(JOBS.glob("*.json")):
        for seed in SEEDS:
            for p, s in _job_schedules(replace(JobFile.load(path), jitter_seed=seed)):
                checked += 1
                violations += not verify_schedule(p, s)
    for seed in range(200):
        p = random_problem(np.random.default_rng(seed))
        try:
            s = solve_ilp(p)
        except InfeasibleScheduleError:
            continue
        checked += 1
        violations += not verify_schedule(p, s)
    ok = violations == 0
    report(capsys, 5, ok, f"{checked} schedules checked, {violations} violations")


def test_criterion_6_cut_beats_uncut(capsys):
    t0 = time.perf_counter()
    jobs = {
        "adder6": JobFile.load(JOBS / "adder6.json"),
        "realamp6": JobFile(BenchSpec("real_amplitudes", 6), cuts=2, method="both"),
    }
    wins, detail = {}, []
    for name, job in jobs.items():
        job = replace(job, pool="ibm_pool.json", noise_scale=1.0)
        rows = []
        for seed in SEEDS:
            rep = cmd_pipeline(replace(job, jitter_seed=seed))
            rows.append((rep["fidelity"]["cut"], rep["fidelity"]["uncut"]))
        wins[name] = sum(cut > uncut for cut, uncut in rows)
        mean_cut, mean_uncut = np.mean(rows, axis=0)
        detail.append(f"{name} {wins[name]}/10 (mean cut {mean_cut:.4f} vs uncut {mean_uncut:.4f})")
    elapsed = time.perf_counter() - t0
    ok = all(w >= 7 for w in wins.values()) and elapsed < 300
    report(capsys, 6, ok, f"cut beats uncut-best in ≥7/10 seeds: {'; '.join(detail)}; {elapsed:.0f}s")


def _fixed_width_reconstruction_ms(k, repeats=25):
    # k cuts joining k+1 four-qubit fragments
    spec = BenchSpec("real_amplitudes", (k + 1) * 4 - k)
    subs = apply_cuts(generate(spec), [CutPoint(q, g) for q, g in reference_cuts(spec, k + 1)])
    assert all(s.num_qubits == 4 for s in subs)
    dists = {i.key: simulate_ideal(i.circuit) for s in subs for i in expand_instances(s)}
    plan = CutPlan.from_subcircuits(subs)
    results = [reconstruct(plan, dists) for _ in range(repeats)]
    assert results[0].term_count == term_count(k)
    return min(r.elapsed_ms for r in results)


def test_criterion_7_scaling_shapes(capsys):
    base = JobFile(BenchSpec("real_amplitudes", 12), pool="ibm_pool.json")
    xs, fids, means = [], [], {}
    for frags in (2, 3):
        f = [cmd_pipeline(replace(base, cuts=frags, jitter_seed=s), baseline=False)["fidelity"]["cut"] for s in SEEDS]
        xs += [frags] * len(f)
        fids += f
        means[frags] = float(np.mean(f))
    rho = float(spearmanr(xs, fids).statistic)
    terms_ok = [term_count(k) for k in range(5)] == [1, 4, 16, 64, 256]
    ms = {k: _fixed_width_reconstruction_ms(k) for k in (1, 2, 3, 4)}
    ratios = {k: ms[k + 1] / ms[k] for k in (1, 2, 3)}
    shape_ok = means[3] >= means[2] and rho > 0
    time_ok = terms_ok and all(r >= 2 for r in ratios.values())
    detail = (f"mean fidelity 2->3 fragments {means[2]:.4f} -> {means[3]:.4f}, Spearman {rho:+.2f} "
              f"({'ok' if shape_ok else 'not increasing'}); term count 4^k {'exact' if terms_ok else 'WRONG'}; "
              f"time ratios " + ", ".join(f"{k + 1}/{k}={r:.1f}" for k, r in ratios.items())
              + f" ({'ok' if time_ok else 'below 2'})")
    report(capsys, 7, shape_ok and time_ok, detail)


def test_criterion_8_pair_sweep(capsys):
    job = JobFile.load(JOBS / "realamp10_pairs.json")
    close = 0
    flags_ok = True
    gaps = []
    for seed in SEEDS:
        rep = cmd_sweep_pairs(replace(job, jitter_seed=seed))
        for cell in rep["cells"]:
            want = "max" if cell["diagonal"] else "min"
            flags_ok &= cell["tau_policy"] == want and cell["execution_time"] == rep[f"tau_{want}"]
        gap = rep["summary"]["fidelity_gap"]
        gaps.append(gap)
        close += gap <= 0.02
    ratio = rep["tau_min"] / rep["tau_max"]
    ok = close >= 7 and flags_ok
    report(capsys, 8, ok, f"off-diagonal min-score pair within 2 points of best diagonal in {close}/10 seeds "
                          f"(largest gap {max(gaps):.4f}); tau flags {'exact' if flags_ok else 'WRONG'}; "
                          f"parallel/sequential time {ratio:.2f}")


def test_criterion_9_determinism(capsys, tmp_path):
    from cutsched.cli import main

    same = []
    for path in sorted(JOBS.glob("*.json")):
        a, b = (cmd_pipeline(replace(JobFile.load(path), jitter_seed=3)) for _ in range(2))
        same.append(dumps(a) == dumps(b))
        outs = []
        for name in ("x.json", "y.json"):
            assert main(["pipeline", str(path), "--seed", "3", "--out", str(tmp_path / name)]) == 0
            outs.append((tmp_path / name).read_bytes())
        same.append(outs[0] == outs[1])
    ok = all(same)
    report(capsys, 9, ok, f"{sum(same)}/{len(same)} repeated job runs byte-identical")
