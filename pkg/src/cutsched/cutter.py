"""Wire cutting: split a circuit at user-given cut points and expand instances."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .circuit import Circuit, Gate

BASES = ("X", "Y", "Z")
PREPS = ("zero", "one", "plus", "plus_i")

_BASIS_GATES = {"X": ("h",), "Y": ("sdg", "h"), "Z": ()}
_PREP_GATES = {"zero": (), "one": ("x",), "plus": ("h",), "plus_i": ("h", "s")}


class CutError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CutPoint:
    qubit: int
    after_gate: int

    @classmethod
    def from_dict(cls, d) -> "CutPoint":
        return cls(int(d["qubit"]), int(d["after_gate"]))

    def to_dict(self) -> dict:
        return {"qubit": self.qubit, "after_gate": self.after_gate}


@dataclass(frozen=True)
class Subcircuit:
    """One fragment of a cut circuit.

    ``measure_cuts[k]``/``prepare_cuts[k]`` give the cut id (index into the
    cut list) served by ``measure_cut_wires[k]``/``prepare_cut_wires[k]``.
    ``output_wires`` maps local qubits to bit positions of the parent's
    measured-qubit ordering.
    """

    circuit: Circuit
    parent: str
    index: int
    measure_cut_wires: tuple[int, ...]
    prepare_cut_wires: tuple[int, ...]
    output_wires: tuple[tuple[int, int], ...]
    measure_cuts: tuple[int, ...] = ()
    prepare_cuts: tuple[int, ...] = ()
    qubit_origin: tuple[tuple[int, int], ...] = ()
    gate_indices: tuple[int, ...] = ()

    @property
    def num_qubits(self) -> int:
        return self.circuit.num_qubits

    @property
    def name(self) -> str:
        return self.circuit.name


@dataclass(frozen=True)
class InstanceCircuit:
    base: Subcircuit = field(repr=False)
    basis_choice: tuple[str, ...]
    prep_choice: tuple[str, ...]
    circuit: Circuit = field(repr=False)

    @property
    def key(self) -> tuple[int, tuple[str, ...], tuple[str, ...]]:
        return (self.base.index, self.basis_choice, self.prep_choice)


def _validate_cuts(c: Circuit, cuts) -> list[CutPoint]:
    cuts = [cp if isinstance(cp, CutPoint) else CutPoint.from_dict(cp) for cp in cuts]
    if len(set(cuts)) != len(cuts):
        raise CutError("duplicate cut point")
    for cp in cuts:
        if not 0 <= cp.qubit < c.num_qubits:
            raise CutError(f"cut {cp}: qubit out of range")
        if not 0 <= cp.after_gate < len(c.gates):
            raise CutError(f"cut {cp}: gate index out of range")
        g = c.gates[cp.after_gate]
        if cp.qubit not in g.qubits:
            raise CutError(f"cut {cp}: gate {cp.after_gate} ({g.kind}) does not act on qubit {cp.qubit}")
        if g.kind == "measure":
            raise CutError(f"cut {cp}: cannot cut after a measurement")
        later = [i for i in range(cp.after_gate + 1, len(c.gates)) if cp.qubit in c.gates[i].qubits]
        if not later:
            raise CutError(f"cut {cp}: no gate follows on qubit {cp.qubit}")
    return cuts


def apply_cuts(c: Circuit, cuts) -> list[Subcircuit]:
    """Cut ``c`` at ``cuts`` and return the fragments.

    Each cut ends one wire segment (measured in the upstream fragment) and
    starts a fresh one (prepared in the downstream fragment).  Fragments are
    the connected components of wire segments joined by two-qubit gates,
    ordered upstream-first where the fragment graph allows it.
    """
    cuts = _validate_cuts(c, cuts)
    bits = {q: pos for pos, q in enumerate(c.measured_qubits)}
    if not cuts:
        outputs = tuple((q, bits[q]) for q in range(c.num_qubits) if q in bits)
        return [
            Subcircuit(
                circuit=Circuit(c.num_qubits, c.gates, f"{c.name}.f0"),
                parent=c.name,
                index=0,
                measure_cut_wires=(),
                prepare_cut_wires=(),
                output_wires=outputs,
                qubit_origin=tuple((q, 0) for q in range(c.num_qubits)),
                gate_indices=tuple(range(len(c.gates))),
            )
        ]

    cuts_on: dict[int, list[tuple[int, int]]] = {}
    for cid, cp in enumerate(cuts):
        cuts_on.setdefault(cp.qubit, []).append((cp.after_gate, cid))
    for lst in cuts_on.values():
        lst.sort()

    def segment(q: int, gate_idx: int) -> int:
        return sum(1 for after, _ in cuts_on.get(q, ()) if after < gate_idx)

    nsegs = {q: len(cuts_on.get(q, ())) + 1 for q in range(c.num_qubits)}
    nodes = [(q, s) for q in range(c.num_qubits) for s in range(nsegs[q])]
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    gate_segs = []
    for idx, g in enumerate(c.gates):
        segs = tuple((q, segment(q, idx)) for q in g.qubits)
        gate_segs.append(segs)
        if len(segs) == 2:
            ra, rb = find(segs[0]), find(segs[1])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    comps: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for n in nodes:
        comps.setdefault(find(n), []).append(n)

    # cut endpoints: segment before (measured) and after (prepared)
    cut_ends = {}
    for q, lst in cuts_on.items():
        for k, (_, cid) in enumerate(lst):
            up, down = find((q, k)), find((q, k + 1))
            if up == down:
                raise CutError(f"cut {cuts[cid]} does not separate the circuit (both sides stay in one fragment)")
            cut_ends[cid] = ((q, k), (q, k + 1))

    first_gate = {root: len(c.gates) for root in comps}
    for idx, segs in enumerate(gate_segs):
        r = find(segs[0])
        first_gate[r] = min(first_gate[r], idx)
    order = _fragment_order(list(comps), first_gate, [(find(u), find(d)) for u, d in cut_ends.values()])

    subs: list[Subcircuit] = []
    for fidx, root in enumerate(order):
        segs = sorted(comps[root])
        local = {seg: i for i, seg in enumerate(segs)}
        width = len(segs)
        if width > c.num_qubits:
            raise CutError(f"fragment {fidx} has {width} qubits, more than the {c.num_qubits}-qubit parent")
        gidx = [i for i, s in enumerate(gate_segs) if find(s[0]) == root]
        gates = [Gate(c.gates[i].kind, tuple(local[s] for s in gate_segs[i]), c.gates[i].param) for i in gidx]
        meas = sorted((local[u], cid) for cid, (u, _) in cut_ends.items() if u in local)
        prep = sorted((local[d], cid) for cid, (_, d) in cut_ends.items() if d in local)
        gates += [Gate("measure", (w,)) for w, _ in meas]
        outputs = tuple(
            (local[(q, s)], bits[q])
            for (q, s) in segs
            if q in bits and s == nsegs[q] - 1
        )
        subs.append(
            Subcircuit(
                circuit=Circuit(width, gates, f"{c.name}.f{fidx}"),
                parent=c.name,
                index=fidx,
                measure_cut_wires=tuple(w for w, _ in meas),
                prepare_cut_wires=tuple(w for w, _ in prep),
                output_wires=outputs,
                measure_cuts=tuple(cid for _, cid in meas),
                prepare_cuts=tuple(cid for _, cid in prep),
                qubit_origin=tuple(segs),
                gate_indices=tuple(gidx),
            )
        )
    return subs


def _fragment_order(roots, first_gate, edges):
    """Kahn's order, earliest-gate first; a cycle is broken at its earliest fragment."""
    indeg = {r: 0 for r in roots}
    succ: dict = {r: [] for r in roots}
    for u, d in edges:
        succ[u].append(d)
        indeg[d] += 1
    heap = [(first_gate[r], r) for r in roots if indeg[r] == 0]
    heapq.heapify(heap)
    done: list = []
    placed = set()
    while len(done) < len(roots):
        if not heap:
            r = min((r for r in roots if r not in placed), key=lambda r: (first_gate[r], r))
            indeg[r] = 0
            heap.append((first_gate[r], r))
        _, r = heapq.heappop(heap)
        if r in placed:
            continue
        placed.add(r)
        done.append(r)
        for d in succ[r]:
            indeg[d] -= 1
            if indeg[d] == 0 and d not in placed:
                heapq.heappush(heap, (first_gate[d], d))
    return done


def instance_count(s: Subcircuit) -> int:
    return 3 ** len(s.measure_cut_wires) * 4 ** len(s.prepare_cut_wires)


def build_instance(s: Subcircuit, basis: tuple[str, ...], prep: tuple[str, ...]) -> InstanceCircuit:
    if len(basis) != len(s.measure_cut_wires) or len(prep) != len(s.prepare_cut_wires):
        raise CutError("label arity does not match the subcircuit's cut wires")
    gates: list[Gate] = []
    for w, p in zip(s.prepare_cut_wires, prep):
        gates += [Gate(k, (w,)) for k in _PREP_GATES[p]]
    gates += [g for g in s.circuit.gates if g.kind != "measure"]
    for w, b in zip(s.measure_cut_wires, basis):
        gates += [Gate(k, (w,)) for k in _BASIS_GATES[b]]
    gates += [g for g in s.circuit.gates if g.kind == "measure"]
    label = "".join(basis) + ("|" + ",".join(prep) if prep else "")
    name = f"{s.circuit.name}[{label}]" if label else s.circuit.name
    return InstanceCircuit(s, tuple(basis), tuple(prep), Circuit(s.num_qubits, gates, name))


def expand_instances(s: Subcircuit) -> list[InstanceCircuit]:
    """All (basis, preparation) variants in lexicographic label order."""
    m, p = len(s.measure_cut_wires), len(s.prepare_cut_wires)
    out = []
    for labels in itertools.product(*([BASES] * m + [PREPS] * p)):
        out.append(build_instance(s, tuple(labels[:m]), tuple(labels[m:])))
    return out
