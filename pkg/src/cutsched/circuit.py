"""Circuit intermediate representation, QASM-subset I/O and structural metrics."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

ONE_QUBIT_KINDS = frozenset({"h", "x", "y", "z", "s", "sdg", "rx", "ry", "rz"})
ROTATIONS = frozenset({"rx", "ry", "rz"})
GATE_KINDS = ONE_QUBIT_KINDS | {"cx", "measure"}


class CircuitError(ValueError):
    """Raised for structurally invalid circuits."""


class QasmSyntaxError(ValueError):
    """Raised by :func:`parse_qasm`; carries the offending line number."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind == "cx" else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind} {self.qubits}")
        if (self.param is not None) != (self.kind in ROTATIONS):
            raise CircuitError(f"param must be given iff gate is a rotation ({self.kind})")
        if self.param is not None:
            object.__setattr__(self, "param", float(self.param))

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == "cx"

    def remapped(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.param)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str = "circuit"

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise CircuitError("num_qubits must be positive")
        measured: set[int] = set()
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
                if q in measured:
                    raise CircuitError(f"gate {g.kind} on qubit {q} after its measurement")
            if g.kind == "measure":
                measured.add(g.qubits[0])

    @property
    def measured_qubits(self) -> list[int]:
        """Measured qubits in ascending order; this is the bitstring order."""
        return sorted(g.qubits[0] for g in self.gates if g.kind == "measure")

    @property
    def num_cx(self) -> int:
        return sum(1 for g in self.gates if g.kind == "cx")

    def with_measurements(self) -> "Circuit":
        """Copy with a measurement appended on every unmeasured qubit."""
        have = set(self.measured_qubits)
        extra = [Gate("measure", (q,)) for q in range(self.num_qubits) if q not in have]
        return Circuit(self.num_qubits, self.gates + tuple(extra), self.name)

    def without_measurements(self) -> "Circuit":
        return Circuit(self.num_qubits, [g for g in self.gates if g.kind != "measure"], self.name)


@dataclass(frozen=True)
class LevelSeq:
    levels: tuple[tuple[int, ...], ...]
    kinds: tuple[str, ...]

    @property
    def kappa1(self) -> int:
        return self.kinds.count("one_qubit_only")

    @property
    def kappa2(self) -> int:
        return self.kinds.count("has_two_qubit")

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class InteractionGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


# --- QASM subset --------------------------------------------------------------

_QREG = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_GATE = re.compile(
    r"^([a-z]+)\s*(?:\(\s*([^()]*?)\s*\))?\s+"
    r"([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]"
    r"(?:\s*,\s*([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\])?$"
)
_PI_EXPR = re.compile(r"^([-+]?)(?:(\d*\.?\d+(?:[eE][-+]?\d+)?)\s*\*\s*)?pi(?:\s*/\s*(\d*\.?\d+))?$")


def _parse_angle(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text.replace(" ", ""))
    if not m:
        raise QasmSyntaxError(lineno, f"cannot parse angle {text!r}")
    sign, mul, div = m.groups()
    val = math.pi * (float(mul) if mul else 1.0) / (float(div) if div else 1.0)
    return -val if sign == "-" else val


def _statements(text: str) -> Iterable[tuple[int, str]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("//", 1)[0].strip()
        if not line:
            continue
        parts = line.split(";")
        if parts[-1].strip():
            raise QasmSyntaxError(lineno, f"missing ';' after {parts[-1].strip()!r}")
        for stmt in parts[:-1]:
            stmt = stmt.strip()
            if not stmt:
                raise QasmSyntaxError(lineno, "empty statement")
            yield lineno, stmt


def parse_qasm(text: str, name: str = "circuit") -> Circuit:
    """Parse the QASM subset into a :class:`Circuit`.

    Accepts an optional ``OPENQASM 2.0;`` / ``include`` preamble, exactly one
    ``qreg``, then one gate per statement.  The register name is discarded.
    """
    reg: Optional[str] = None
    num_qubits = 0
    gates: list[Gate] = []
    for lineno, stmt in _statements(text):
        if stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        m = _QREG.match(stmt)
        if m:
            if reg is not None:
                raise QasmSyntaxError(lineno, "only one qreg is supported")
            reg, num_qubits = m.group(1), int(m.group(2))
            if num_qubits < 1:
                raise QasmSyntaxError(lineno, "qreg size must be positive")
            continue
        m = _GATE.match(stmt)
        if not m:
            raise QasmSyntaxError(lineno, f"cannot parse statement {stmt!r}")
        if reg is None:
            raise QasmSyntaxError(lineno, "gate before qreg declaration")
        kind, ptext, r1, q1, r2, q2 = m.groups()
        if kind not in GATE_KINDS:
            raise QasmSyntaxError(lineno, f"unknown gate {kind!r}")
        qubits = [int(q1)] + ([int(q2)] if q2 is not None else [])
        for r in (r1, r2):
            if r is not None and r != reg:
                raise QasmSyntaxError(lineno, f"unknown register {r!r}")
        for q in qubits:
            if q >= num_qubits:
                raise QasmSyntaxError(lineno, f"qubit index {q} out of range (qreg has {num_qubits})")
        if (ptext is not None) != (kind in ROTATIONS):
            raise QasmSyntaxError(lineno, f"{kind} {'requires' if kind in ROTATIONS else 'takes no'} angle")
        param = _parse_angle(ptext, lineno) if ptext is not None else None
        try:
            gates.append(Gate(kind, tuple(qubits), param))
        except CircuitError as exc:
            raise QasmSyntaxError(lineno, str(exc)) from None
    if reg is None:
        raise QasmSyntaxError(1, "missing qreg declaration")
    try:
        return Circuit(num_qubits, gates, name)
    except CircuitError as exc:
        raise QasmSyntaxError(0, str(exc)) from None


def emit_qasm(c: Circuit) -> str:
    lines = [f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        if g.kind == "cx":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        elif g.param is not None:
            lines.append(f"{g.kind}({g.param!r}) q[{g.qubits[0]}];")
        else:
            lines.append(f"{g.kind} q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


# --- structure ----------------------------------------------------------------

def levels(c: Circuit) -> LevelSeq:
    """Greedy left-aligned levels; measurements are not placed in levels."""
    free_at = [0] * c.num_qubits
    buckets: list[list[int]] = []
    for idx, g in enumerate(c.gates):
        if g.kind == "measure":
            continue
        lvl = max(free_at[q] for q in g.qubits)
        if lvl == len(buckets):
            buckets.append([])
        buckets[lvl].append(idx)
        for q in g.qubits:
            free_at[q] = lvl + 1
    kinds = tuple(
        "has_two_qubit" if any(c.gates[i].is_two_qubit for i in b) else "one_qubit_only"
        for b in buckets
    )
    return LevelSeq(tuple(tuple(b) for b in buckets), kinds)


def two_qubit_depth(c: Circuit) -> int:
    return levels(c).kappa2


def area(c: Circuit) -> int:
    # cx-free circuits count as depth 1 so normalized areas stay positive
    return c.num_qubits * max(two_qubit_depth(c), 1)


def interaction_graph(c: Circuit) -> InteractionGraph:
    edges = sorted({tuple(sorted(g.qubits)) for g in c.gates if g.kind == "cx"})
    return InteractionGraph(c.num_qubits, tuple(edges))
