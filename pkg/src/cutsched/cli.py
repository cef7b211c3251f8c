"""Command-line interface.

Examples:
  cutsched gen --family ripple_adder --qubits 6 > adder6.qasm
  cutsched estimate-time adder6.qasm --cut 2:25 --cut 2:82
  cutsched schedule bench:ripple_adder:6 --reference-cuts 2 --method both
  cutsched pipeline job.json --out report.json
  cutsched sweep-pairs job.json --csv pairs.csv
  cutsched scaling job.json --axis num_subcircuits --values 2,3 --seeds 10

Exit codes: 0 success, 2 schema/parse error, 3 infeasible schedule,
4 resource guard, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .benchgen import BenchSpec, generate, reference_cuts
from .circuit import Circuit, emit_qasm, levels, parse_qasm
from .cutter import CutPoint, apply_cuts, expand_instances, instance_count
from .hardware import load_pool
from .ilp import InfeasibleScheduleError
from .layout import LayoutError, best_layout, score_matrix
from .pipeline import (
    JobError,
    JobFile,
    build_problem,
    cmd_pipeline,
    cmd_scaling,
    cmd_sweep_pairs,
    dumps,
    resolve_budgets,
    run_schedule,
    simulate_fragment,
    to_csv,
    REPORT_SCHEMA,
    SCALING_AXES,
)
from .reconstruct import CutPlan, reconstruct
from .sim import ResourceGuardError, noise_model_for, simulate_ideal, simulate_noisy
from .timing import TimeModel, estimate_time, subcircuit_loads, tau_max_from_loads, tau_min_from_loads

EXIT_OK, EXIT_OTHER, EXIT_SCHEMA, EXIT_INFEASIBLE, EXIT_GUARD = 0, 1, 2, 3, 4


# --- argument helpers -------------------------------------------------------------


def _cut_arg(text: str) -> CutPoint:
    try:
        q, g = text.split(":")
        return CutPoint(int(q), int(g))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cut must look like QUBIT:AFTER_GATE, got {text!r}") from None


def _tau_for_arg(text: str) -> tuple[str, float]:
    name, sep, units = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=UNITS, got {text!r}")
    return name, float(units)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _bench_from_ref(ref: str) -> BenchSpec:
    # bench:<family>:<qubits>
    parts = ref.split(":")
    if len(parts) != 3:
        raise JobError("circuit", f"benchmark reference must be bench:FAMILY:QUBITS, got {ref!r}")
    return BenchSpec(parts[1], int(parts[2]))


def _circuit(ref: str) -> tuple[Circuit, BenchSpec | None]:
    if ref.startswith("bench:"):
        spec = _bench_from_ref(ref)
        return generate(spec), spec
    p = Path(ref)
    return parse_qasm(p.read_text(), name=p.stem), None


def _cuts(args, spec: BenchSpec | None) -> list[CutPoint]:
    if args.reference_cuts is not None:
        if spec is None:
            raise JobError("cuts", "--reference-cuts needs a bench:FAMILY:QUBITS circuit")
        return [CutPoint(q, g) for q, g in reference_cuts(spec, args.reference_cuts)]
    return list(args.cut or [])


def _time_model(args) -> TimeModel:
    return TimeModel(args.t1 if args.t1 is not None else 1, args.t2 if args.t2 is not None else 10)


def _job_from_args(args, circuit_ref: str, spec: BenchSpec | None) -> JobFile:
    cuts = args.reference_cuts if args.reference_cuts is not None else tuple(args.cut or ())
    base = JobFile(spec if spec is not None else circuit_ref, cuts=cuts)
    return _override(base, args)


def _override(job: JobFile, args) -> JobFile:
    """Global flags given explicitly on the command line win over job-file fields."""
    changes = {}
    if args.pool is not None:
        changes["pool"] = args.pool
    if args.seed is not None:
        changes["jitter_seed"] = args.seed
    if args.t1 is not None:
        changes["t1"] = args.t1
    if args.t2 is not None:
        changes["t2"] = args.t2
    if args.tau is not None:
        changes["tau"] = args.tau if args.tau in ("min", "max") else float(args.tau)
    if args.tau_for:
        changes["tau_for"] = {**job.tau_for, **dict(args.tau_for)}
    if args.noise_scale is not None:
        changes["noise_scale"] = args.noise_scale
    if args.method is not None:
        changes["method"] = args.method
    if args.workers is not None:
        changes["workers"] = args.workers
    return replace(job, **changes) if changes else job


def _emit(args, report) -> None:
    text = report if isinstance(report, str) else dumps(report)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- subcommands ------------------------------------------------------------------


def do_gen(args) -> None:
    spec = BenchSpec(args.family, args.qubits, reps=args.reps, secret=args.secret, steps=args.steps, seed=args.angle_seed)
    _emit(args, emit_qasm(generate(spec)))


def do_cut(args) -> None:
    c, spec = _circuit(args.circuit)
    subs = apply_cuts(c, _cuts(args, spec))
    _emit(args, {
        "schema_version": REPORT_SCHEMA,
        "kind": "cut",
        "circuit": c.name,
        "subcircuits": [
            {
                "name": s.name,
                "qubits": s.num_qubits,
                "measure_cut_wires": list(s.measure_cut_wires),
                "prepare_cut_wires": list(s.prepare_cut_wires),
                "output_wires": [list(x) for x in s.output_wires],
                "instances": instance_count(s),
                "instance_labels": [[list(i.basis_choice), list(i.prep_choice)] for i in expand_instances(s)],
                "qasm": emit_qasm(s.circuit),
            }
            for s in subs
        ],
    })


def do_score(args) -> None:
    c, spec = _circuit(args.circuit)
    job = _job_from_args(args, args.circuit, spec)
    subs = apply_cuts(c, job.cut_points())
    q = score_matrix(subs, job.load_pool())
    _emit(args, {"schema_version": REPORT_SCHEMA, "kind": "score", **q.to_dict()})


def do_estimate_time(args) -> None:
    c, spec = _circuit(args.circuit)
    tm = _time_model(args)
    lv = levels(c)
    subs = apply_cuts(c, _cuts(args, spec))
    loads = subcircuit_loads(subs, tm)
    _emit(args, {
        "schema_version": REPORT_SCHEMA,
        "kind": "estimate_time",
        "time_model": {"t1": tm.t1, "t2": tm.t2},
        "circuit": {"name": c.name, "kappa1": lv.kappa1, "kappa2": lv.kappa2, "time": estimate_time(c, tm)},
        "subcircuits": [
            {"name": s.name, "kappa1": levels(s.circuit).kappa1, "kappa2": levels(s.circuit).kappa2,
             "base_time": estimate_time(s.circuit, tm), "instance_time": t, "nu": eta}
            for s, (eta, t) in zip(subs, loads)
        ],
        "tau_min": tau_min_from_loads(loads),
        "tau_max": tau_max_from_loads(loads),
    })


def do_schedule(args) -> None:
    c, spec = _circuit(args.circuit)
    job = _job_from_args(args, args.circuit, spec)
    pool = job.load_pool()
    subs = apply_cuts(c, job.cut_points())
    q = score_matrix(subs, pool)
    loads = subcircuit_loads(subs, job.time_model())
    p = build_problem(subs, pool, q, loads, resolve_budgets(job, loads, pool))
    sched, extra = run_schedule(p, job.method)
    _emit(args, {"schema_version": REPORT_SCHEMA, "kind": "schedule", "problem": p.to_dict(),
                 "schedule": sched.to_dict(p), **extra})


def do_simulate(args) -> None:
    c, _ = _circuit(args.circuit)
    if args.device is None:
        dist = simulate_ideal(c)
        meta = {"mode": "ideal"}
    else:
        job = _override(JobFile(args.circuit), args)
        hw = job.load_pool().by_name(args.device)
        layout = _int_list(args.layout) if args.layout else list(best_layout(c, hw).layout)
        dist = simulate_noisy(c, noise_model_for(c, hw, layout, job.noise_scale))
        meta = {"mode": "noisy", "device": hw.name, "layout": layout, "noise_scale": job.noise_scale}
    _emit(args, {"schema_version": REPORT_SCHEMA, "kind": "simulate", **meta, "distribution": dist.as_dict()})


def do_reconstruct(args) -> None:
    """Reconstruct from ideal instance distributions, or noisy ones on ``--device``."""
    c, spec = _circuit(args.circuit)
    subs = apply_cuts(c, _cuts(args, spec))
    dists = {}
    if args.device is None:
        for s in subs:
            for inst in expand_instances(s):
                dists[inst.key] = simulate_ideal(inst.circuit)
    else:
        job = _override(JobFile(args.circuit), args)
        hw = job.load_pool().by_name(args.device)
        for s in subs:
            dists.update(simulate_fragment(s, hw, best_layout(s.circuit, hw).layout, job.noise_scale))
    rec = reconstruct(CutPlan.from_subcircuits(subs), dists)
    out = rec.to_dict()
    if not args.timing:
        out.pop("elapsed_ms")
    _emit(args, {"schema_version": REPORT_SCHEMA, "kind": "reconstruct", **out})


def do_pipeline(args) -> None:
    job = _override(JobFile.load(args.job), args)
    _emit(args, cmd_pipeline(job, include_timing=args.timing))


def do_sweep_pairs(args) -> None:
    job = _override(JobFile.load(args.job), args)
    rep = cmd_sweep_pairs(job)
    if args.csv:
        Path(args.csv).write_text(to_csv(rep))
    _emit(args, rep)


def do_scaling(args) -> None:
    job = _override(JobFile.load(args.job), args)
    seeds = list(range(args.seeds)) if args.seed_list is None else _int_list(args.seed_list)
    rep = cmd_scaling(job, args.axis, _int_list(args.values), seeds, include_timing=args.timing)
    if args.csv:
        Path(args.csv).write_text(to_csv(rep))
    _emit(args, rep)


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--pool", help="hardware pool JSON file or bundled fixture name (default ibm_hetero.json)")
    g.add_argument("--seed", type=int, help="noise-jitter seed applied to the pool")
    g.add_argument("--t1", type=float, help="duration of a one-qubit level (default 1)")
    g.add_argument("--t2", type=float, help="duration of a two-qubit level (default 10)")
    g.add_argument("--tau", help="per-device budget: min, max, or a number of units")
    g.add_argument("--tau-for", action="append", type=_tau_for_arg, metavar="NAME=UNITS",
                   help="budget override for one device (repeatable)")
    g.add_argument("--noise-scale", type=float, help="multiplier on simulated gate and readout noise")
    g.add_argument("--method", choices=("ilp", "matching", "both"), help="scheduler")
    g.add_argument("--workers", type=int, help="parallel simulation workers")
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--timing", action="store_true", help="include wall-clock timings (reports stop being byte-stable)")

    circ = argparse.ArgumentParser(add_help=False)
    circ.add_argument("circuit", help="QASM file, or bench:FAMILY:QUBITS")
    circ.add_argument("--cut", action="append", type=_cut_arg, metavar="Q:G", help="cut wire Q after gate G (repeatable)")
    circ.add_argument("--reference-cuts", type=int, metavar="K", help="use the benchmark's balanced K-fragment cuts")

    parser = argparse.ArgumentParser(prog="cutsched", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"cutsched {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="emit a benchmark circuit as QASM")
    p.add_argument("--family", required=True, choices=("real_amplitudes", "bernstein_vazirani", "ripple_adder", "trotter"))
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--secret")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--angle-seed", type=int, default=0)
    p.set_defaults(fn=do_gen)

    for name, fn, text in (
        ("cut", do_cut, "split a circuit at cut points"),
        ("score", do_score, "best layout score per (subcircuit, device)"),
        ("estimate-time", do_estimate_time, "level-based time estimates and budgets"),
        ("schedule", do_schedule, "assign subcircuits to devices"),
        ("reconstruct", do_reconstruct, "recombine instance distributions"),
        ("simulate", do_simulate, "ideal or noisy output distribution"),
    ):
        p = sub.add_parser(name, parents=[common, circ], help=text)
        if name in ("simulate", "reconstruct"):
            p.add_argument("--device", help="simulate with this device's noise (default: ideal)")
        if name == "simulate":
            p.add_argument("--layout", help="comma-separated physical qubits (default: best layout)")
        p.set_defaults(fn=fn)

    for name, fn, text in (
        ("pipeline", do_pipeline, "run a job end to end"),
        ("sweep-pairs", do_sweep_pairs, "fidelity over every ordered device pair"),
        ("scaling", do_scaling, "fidelity series along a size axis"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("job", help="job JSON file")
        if name != "pipeline":
            p.add_argument("--csv", help="also write the series as CSV")
        if name == "scaling":
            p.add_argument("--axis", required=True, choices=SCALING_AXES)
            p.add_argument("--values", required=True, help="comma-separated axis values")
            p.add_argument("--seeds", type=int, default=10, help="number of jitter seeds 0..N-1")
            p.add_argument("--seed-list", help="explicit comma-separated seeds")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except InfeasibleScheduleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LayoutError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        stage = getattr(exc, "stage", None)
        print(f"error{f' [{stage}]' if stage else ''}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
