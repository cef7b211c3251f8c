"""End-to-end orchestration: cut, score, schedule, simulate, reconstruct.

Everything here is deterministic for a fixed job.  Wall-clock timings are the
one non-reproducible quantity, so they only appear in reports when asked for
(``include_timing=True``).
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from .benchgen import BenchSpec, generate, reference_cuts
from .circuit import Circuit, area, parse_qasm
from .cutter import CutPoint, Subcircuit, apply_cuts, expand_instances
from .hardware import HardwarePool, HardwareSpec, SchemaError, jitter_pool, load_pool
from .ilp import Schedule, ScheduleProblem, solve_ilp, verify_schedule
from .layout import LayoutError, ScoredLayout, best_layout, score_matrix
from .matching import AssignmentProblem, solve_matching
from .reconstruct import CutPlan, reconstruct
from .sim import MAX_NOISY_QUBITS, Distribution, fidelity, noise_model_for, simulate_ideal, simulate_noisy
from .timing import TimeModel, estimate_time, subcircuit_loads, tau_max_from_loads, tau_min_from_loads

REPORT_SCHEMA = "cutsched.report/1"
JOB_SCHEMA = "cutsched.job/1"
TIE_BREAK = "lowest objective; ties (relative 1e-12) go to the lexicographically smallest vector of pool positions"
QUASI_POLICY = "fidelity uses the clipped, renormalized reconstruction; raw signed values are reported alongside"


class JobError(SchemaError):
    pass


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except Exception as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


# --- job description ------------------------------------------------------------


@dataclass(frozen=True)
class JobFile:
    circuit: Union[str, BenchSpec]
    cuts: Union[tuple[CutPoint, ...], int] = ()  # explicit cuts, or a fragment count for reference cuts
    pool: str = "ibm_hetero.json"
    jitter_seed: Optional[int] = None
    t1: float = 1
    t2: float = 10
    tau: Union[str, float] = "min"
    tau_for: Mapping[str, float] = field(default_factory=dict)
    method: str = "ilp"
    noise_scale: float = 1.0
    workers: int = 1
    base_dir: Optional[str] = None

    def __post_init__(self):
        if self.method not in ("ilp", "matching", "both"):
            raise JobError("method", f"must be ilp, matching or both, not {self.method!r}")
        if isinstance(self.tau, str) and self.tau not in ("min", "max"):
            raise JobError("tau", f"must be 'min', 'max' or a number, not {self.tau!r}")
        if not isinstance(self.tau, str) and not self.tau >= 0:
            raise JobError("tau", "explicit budgets must be non-negative")
        if not self.noise_scale >= 0:
            raise JobError("noise_scale", "must be non-negative")
        if self.t1 <= 0 or self.t2 <= 0:
            raise JobError("time_model", "t1 and t2 must be positive")
        if self.workers < 1:
            raise JobError("workers", "must be at least 1")
        if isinstance(self.cuts, int) and not isinstance(self.circuit, BenchSpec):
            raise JobError("cuts", "reference cuts need a benchmark circuit spec")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any], base_dir: Optional[str] = None) -> "JobFile":
        if not isinstance(d, Mapping):
            raise JobError("$", "job must be a JSON object")
        known = {"schema", "circuit", "cuts", "pool", "jitter_seed", "time_model", "tau", "tau_for",
                 "method", "noise_scale", "workers"}
        extra = sorted(set(d) - known)
        if extra:
            raise JobError(extra[0], "unknown field")
        if "circuit" not in d:
            raise JobError("circuit", "missing")
        circ = d["circuit"]
        if isinstance(circ, Mapping):
            try:
                circ = BenchSpec(**circ)
            except TypeError as exc:
                raise JobError("circuit", str(exc)) from None
        elif not isinstance(circ, str):
            raise JobError("circuit", "must be a QASM path or a benchmark spec object")
        cuts = d.get("cuts", [])
        if isinstance(cuts, Mapping) and set(cuts) == {"reference"}:
            cuts = int(cuts["reference"])
        elif isinstance(cuts, list):
            try:
                cuts = tuple(CutPoint.from_dict(x) for x in cuts)
            except (KeyError, TypeError, ValueError) as exc:
                raise JobError("cuts", f"bad cut record: {exc}") from None
        else:
            raise JobError("cuts", "must be a list of {qubit, after_gate} or {\"reference\": k}")
        tm = d.get("time_model", {})
        return cls(
            circuit=circ,
            cuts=cuts,
            pool=d.get("pool", "ibm_hetero.json"),
            jitter_seed=d.get("jitter_seed"),
            t1=tm.get("t1", 1),
            t2=tm.get("t2", 10),
            tau=d.get("tau", "min"),
            tau_for=dict(d.get("tau_for", {})),
            method=d.get("method", "ilp"),
            noise_scale=float(d.get("noise_scale", 1.0)),
            workers=int(d.get("workers", 1)),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path) -> "JobFile":
        p = Path(path)
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise JobError(str(path), f"invalid JSON: {exc}") from None
        return cls.from_dict(data, base_dir=str(p.parent))

    def to_dict(self) -> dict:
        circ = self.circuit
        if isinstance(circ, BenchSpec):
            circ = {k: getattr(circ, k) for k in ("family", "num_qubits", "reps", "secret", "steps", "seed")}
        cuts = {"reference": self.cuts} if isinstance(self.cuts, int) else [c.to_dict() for c in self.cuts]
        return {
            "schema": JOB_SCHEMA,
            "circuit": circ,
            "cuts": cuts,
            "pool": self.pool,
            "jitter_seed": self.jitter_seed,
            "time_model": {"t1": self.t1, "t2": self.t2},
            "tau": self.tau,
            "tau_for": dict(sorted(self.tau_for.items())),
            "method": self.method,
            "noise_scale": self.noise_scale,
            "workers": self.workers,
        }

    # resolved inputs

    def time_model(self) -> TimeModel:
        return TimeModel(self.t1, self.t2)

    def load_circuit(self) -> Circuit:
        if isinstance(self.circuit, BenchSpec):
            return generate(self.circuit)
        p = Path(self.circuit)
        if not p.is_absolute() and self.base_dir:
            p = Path(self.base_dir) / p
        return parse_qasm(p.read_text(), name=p.stem)

    def cut_points(self) -> list[CutPoint]:
        if isinstance(self.cuts, int):
            return [CutPoint(q, g) for q, g in reference_cuts(self.circuit, self.cuts)]
        return list(self.cuts)

    def load_pool(self) -> HardwarePool:
        p = self.pool
        if self.base_dir and not Path(p).is_absolute() and (Path(self.base_dir) / p).exists():
            p = str(Path(self.base_dir) / p)
        pool = load_pool(p)
        return pool if self.jitter_seed is None else jitter_pool(pool, self.jitter_seed)


# --- stages -----------------------------------------------------------------------


def resolve_budgets(job: JobFile, loads: Sequence[tuple[int, float]], pool: HardwarePool) -> tuple[float, ...]:
    if job.tau == "min":
        base = tau_min_from_loads(loads)
    elif job.tau == "max":
        base = tau_max_from_loads(loads)
    else:
        base = float(job.tau)
    tau = {hw.name: base for hw in pool}
    for name, units in job.tau_for.items():
        if name not in tau:
            raise JobError(f"tau_for.{name}", "no such device in the pool")
        tau[name] = float(units)
    return tuple(tau[hw.name] for hw in pool)


def build_problem(subs: Sequence[Subcircuit], pool: HardwarePool, q, loads, tau) -> ScheduleProblem:
    return ScheduleProblem.build(
        [s.name for s in subs],
        pool.names,
        q.scores(),
        [area(s.circuit) for s in subs],
        [eta for eta, _ in loads],
        [t for _, t in loads],
        tau,
    )


def run_schedule(p: ScheduleProblem, method: str) -> tuple[Schedule, dict]:
    """Solve with the requested method(s); the ILP result is primary under ``both``."""
    out: dict[str, Any] = {}
    if method in ("ilp", "both"):
        out["ilp"] = solve_ilp(p)
    if method in ("matching", "both"):
        out["matching"] = solve_matching(AssignmentProblem.from_schedule_problem(p))
    for name, s in out.items():
        if not verify_schedule(p, s):
            raise AssertionError(f"{name} schedule violates its constraints")
    primary = out.get("ilp", out.get("matching"))
    extra = {"schedules": {k: v.to_dict(p) for k, v in out.items()}}
    if method == "both":
        extra["objectives_equal"] = out["ilp"].objective_value == out["matching"].objective_value
        extra["assignments_equal"] = out["ilp"].assignment == out["matching"].assignment
    return primary, extra


def simulate_fragment(s: Subcircuit, hw: HardwareSpec, layout: Sequence[int], scale: float) -> dict:
    """Noisy distributions of every instance of ``s`` placed on ``hw`` via ``layout``."""
    out = {}
    for inst in expand_instances(s):
        nm = noise_model_for(inst.circuit, hw, layout, scale)
        out[inst.key] = simulate_noisy(inst.circuit, nm)
    return out


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def digest(dists: Mapping) -> str:
    h = hashlib.sha256()
    for key in sorted(dists):
        h.update(repr(key).encode())
        h.update(np.ascontiguousarray(dists[key].probs, dtype=np.float64).tobytes())
    return h.hexdigest()


def best_device(c: Circuit, pool: HardwarePool) -> Optional[tuple[HardwareSpec, ScoredLayout]]:
    """Lowest-score (device, layout) for the whole circuit; pool order breaks ties."""
    best = None
    for hw in pool:
        if hw.num_qubits < c.num_qubits:
            continue
        try:
            sl = best_layout(c, hw)
        except LayoutError:
            continue
        if best is None or sl.score < best[1].score:
            best = (hw, sl)
    return best


def uncut_baseline(c: Circuit, pool: HardwarePool, scale: float, ideal: Distribution) -> dict:
    if c.num_qubits > MAX_NOISY_QUBITS:
        return {"status": "not_executable", "reason": f"{c.num_qubits} qubits exceed the {MAX_NOISY_QUBITS}-qubit noisy simulator"}
    found = best_device(c, pool)
    if found is None:
        return {"status": "not_executable", "reason": "no device in the pool hosts the uncut circuit"}
    hw, sl = found
    noisy = simulate_noisy(c, noise_model_for(c, hw, sl.layout, scale))
    return {"status": "ok", "device": hw.name, "layout": list(sl.layout), "score": sl.score,
            "fidelity": fidelity(noisy, ideal)}


# --- commands ---------------------------------------------------------------------


def cmd_pipeline(job: JobFile, include_timing: bool = False, baseline: bool = True) -> dict:
    """Cut, score, schedule, simulate each placed fragment, reconstruct, and compare."""
    with _stage("load"):
        c = job.load_circuit()
        pool = job.load_pool()
        tm = job.time_model()
    with _stage("cut"):
        subs = apply_cuts(c, job.cut_points())
    with _stage("score"):
        q = score_matrix(subs, pool)
    with _stage("schedule"):
        loads = subcircuit_loads(subs, tm)
        tau = resolve_budgets(job, loads, pool)
        p = build_problem(subs, pool, q, loads, tau)
        sched, sched_extra = run_schedule(p, job.method)
    with _stage("simulate"):
        placed = [(s, pool[j], q.cells[i][j].layout) for i, (s, j) in enumerate(zip(subs, sched.assignment))]
        parts = _map(lambda x: simulate_fragment(x[0], x[1], x[2], job.noise_scale), placed, job.workers)
        dists = {k: v for part in parts for k, v in part.items()}
        ideal = simulate_ideal(c)
    with _stage("reconstruct"):
        rec = reconstruct(CutPlan.from_subcircuits(subs), dists)
        f_cut = fidelity(rec.clipped, ideal)
    with _stage("baseline"):
        base = uncut_baseline(c, pool, job.noise_scale, ideal) if baseline else {"status": "skipped"}

    recon = rec.to_dict(1e-15)
    if not include_timing:
        recon.pop("elapsed_ms")
    return {
        "schema_version": REPORT_SCHEMA,
        "kind": "pipeline",
        "job": job.to_dict(),
        "circuit": {
            "name": c.name,
            "num_qubits": c.num_qubits,
            "num_gates": len(c.gates),
            "num_cx": c.num_cx,
            "estimated_time": estimate_time(c, tm),
        },
        "subcircuits": [
            {
                "name": s.name,
                "qubits": s.num_qubits,
                "nu": eta,
                "t": t,
                "area": area(s.circuit),
                "A": p.areas[i],
                "measure_cut_wires": list(s.measure_cut_wires),
                "prepare_cut_wires": list(s.prepare_cut_wires),
            }
            for i, (s, (eta, t)) in enumerate(zip(subs, loads))
        ],
        "Q": q.to_dict(),
        "problem": p.to_dict(),
        "schedule": sched.to_dict(p),
        "placements": [{"subcircuit": s.name, "device": hw.name, "layout": list(lay)} for s, hw, lay in placed],
        "verified": verify_schedule(p, sched),
        "tie_break": TIE_BREAK,
        **sched_extra,
        "instances": {"count": len(dists), "digest": digest(dists)},
        "reconstruction": recon,
        "quasi_policy": QUASI_POLICY,
        "fidelity": {"cut": f_cut, "uncut": base.get("fidelity")},
        "uncut_baseline": base,
    }


def cmd_sweep_pairs(job: JobFile) -> dict:
    """Fidelity for every ordered device pair hosting the two fragments.

    Diagonal cells run both fragments on one device, back to back, so they
    need the sequential budget (tau_max); off-diagonal cells run in parallel
    (tau_min).
    """
    with _stage("load"):
        c = job.load_circuit()
        pool = job.load_pool()
        tm = job.time_model()
    with _stage("cut"):
        subs = apply_cuts(c, job.cut_points())
        if len(subs) != 2:
            raise JobError("cuts", f"pair sweep needs exactly 2 subcircuits, got {len(subs)}")
    with _stage("score"):
        q = score_matrix(subs, pool)
        loads = subcircuit_loads(subs, tm)
        raw_areas = [area(s.circuit) for s in subs]
        norm = [a / max(raw_areas) for a in raw_areas]
    with _stage("simulate"):
        ideal = simulate_ideal(c)
        jobs = [(i, j) for i in range(2) for j in range(len(pool)) if q.cells[i][j] is not None]
        sims = _map(lambda ij: simulate_fragment(subs[ij[0]], pool[ij[1]], q.cells[ij[0]][ij[1]].layout, job.noise_scale),
                    jobs, job.workers)
        by_pair = dict(zip(jobs, sims))
    plan = CutPlan.from_subcircuits(subs)
    t_min, t_max = tau_min_from_loads(loads), tau_max_from_loads(loads)
    cells = []
    for j, hj in enumerate(pool):
        for k, hk in enumerate(pool):
            if (0, j) not in by_pair or (1, k) not in by_pair:
                continue
            rec = reconstruct(plan, {**by_pair[(0, j)], **by_pair[(1, k)]})
            diag = j == k
            cells.append(
                {
                    "devices": [hj.name, hk.name],
                    "diagonal": diag,
                    "tau_policy": "max" if diag else "min",
                    "execution_time": (loads[0][0] * loads[0][1] + loads[1][0] * loads[1][1]) if diag
                    else max(loads[0][0] * loads[0][1], loads[1][0] * loads[1][1]),
                    "objective": q.score(0, j) * norm[0] + q.score(1, k) * norm[1],
                    "fidelity": fidelity(rec.clipped, ideal),
                }
            )
    return {
        "schema_version": REPORT_SCHEMA,
        "kind": "sweep_pairs",
        "job": job.to_dict(),
        "subcircuits": [s.name for s in subs],
        "tau_min": t_min,
        "tau_max": t_max,
        "cells": cells,
        "summary": summarize_pairs(cells),
    }


def summarize_pairs(cells: Sequence[Mapping]) -> dict:
    diag = [x for x in cells if x["diagonal"]]
    off = [x for x in cells if not x["diagonal"]]
    out: dict[str, Any] = {}
    if diag:
        best = max(diag, key=lambda x: x["fidelity"])
        out["best_diagonal"] = {"devices": best["devices"], "fidelity": best["fidelity"]}
    if off:
        pick = min(off, key=lambda x: x["objective"])
        out["min_objective_off_diagonal"] = {"devices": pick["devices"], "fidelity": pick["fidelity"]}
    if diag and off:
        out["fidelity_gap"] = out["best_diagonal"]["fidelity"] - out["min_objective_off_diagonal"]["fidelity"]
    return out


SCALING_AXES = ("num_subcircuits", "circuit_size")


def cmd_scaling(template: JobFile, axis: str, values: Sequence[int], seeds: Sequence[int],
                include_timing: bool = False) -> dict:
    """Mean cut-path fidelity over jitter seeds along one axis.

    ``num_subcircuits`` varies the reference fragment count at fixed width;
    ``circuit_size`` varies the width with two fragments.  Each seed re-jitters
    the pool, which is what varies between trials.
    """
    if axis not in SCALING_AXES:
        raise JobError("axis", f"must be one of {SCALING_AXES}")
    if not isinstance(template.circuit, BenchSpec):
        raise JobError("circuit", "scaling needs a benchmark circuit spec")
    if not values or not seeds:
        raise JobError("values", "need at least one axis value and one seed")
    points = []
    for x in values:
        if axis == "num_subcircuits":
            job = replace(template, cuts=int(x))
        else:
            job = replace(template, circuit=replace(template.circuit, num_qubits=int(x)), cuts=2)
        fids, ms, terms = [], [], None
        for seed in seeds:
            with _stage(f"{axis}={x}, seed={seed}"):
                rep = cmd_pipeline(replace(job, jitter_seed=int(seed)), include_timing=include_timing, baseline=False)
            fids.append(rep["fidelity"]["cut"])
            terms = rep["reconstruction"]["term_count"]
            if include_timing:
                ms.append(rep["reconstruction"]["elapsed_ms"])
        pt = {"x": int(x), "fidelity_mean": float(np.mean(fids)), "fidelities": fids, "term_count": terms}
        if include_timing:
            pt["reconstruction_ms_mean"] = float(np.mean(ms))
        points.append(pt)
    return {
        "schema_version": REPORT_SCHEMA,
        "kind": "scaling",
        "axis": axis,
        "job": template.to_dict(),
        "seeds": [int(s) for s in seeds],
        "points": points,
    }


# --- serialization ----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return None
        return obj
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Mapping):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(report: Mapping) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def to_csv(report: Mapping) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report["kind"] == "sweep_pairs":
        w.writerow(["device_a", "device_b", "diagonal", "tau_policy", "execution_time", "objective", "fidelity"])
        for x in report["cells"]:
            w.writerow([*x["devices"], int(x["diagonal"]), x["tau_policy"], repr(float(x["execution_time"])),
                        repr(x["objective"]), repr(x["fidelity"])])
    elif report["kind"] == "scaling":
        timed = any("reconstruction_ms_mean" in p for p in report["points"])
        w.writerow([report["axis"], "fidelity_mean", "term_count"] + (["reconstruction_ms_mean"] if timed else []))
        for p in report["points"]:
            w.writerow([p["x"], repr(p["fidelity_mean"]), p["term_count"]]
                       + ([repr(p["reconstruction_ms_mean"])] if timed else []))
    else:
        raise ValueError(f"no CSV form for {report['kind']} reports")
    return buf.getvalue()
