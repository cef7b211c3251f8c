"""Deterministic generators for the benchmark circuit families.

Every family produces a fully measured circuit whose interaction graph is a
path or a star, so it embeds exactly on heavy-hex style coupling maps without
SWAP routing.  Rotation angles come from ``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import Circuit, Gate

FAMILIES = ("real_amplitudes", "bernstein_vazirani", "ripple_adder", "trotter")


class BenchSpecError(ValueError):
    pass


@dataclass(frozen=True)
class BenchSpec:
    family: str
    num_qubits: int
    reps: int = 1
    secret: Optional[str] = None
    steps: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BenchSpecError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        n = self.num_qubits
        if n < 1:
            raise BenchSpecError("num_qubits must be positive")
        if self.family == "ripple_adder" and (n < 4 or n % 2):
            raise BenchSpecError("ripple_adder needs an even number of qubits >= 4 (2 bits per operand bit + carry in/out)")
        if self.family == "bernstein_vazirani":
            if n < 2:
                raise BenchSpecError("bernstein_vazirani needs at least 2 qubits")
            if self.secret is not None and (len(self.secret) != n - 1 or set(self.secret) - {"0", "1"}):
                raise BenchSpecError(f"secret must be a {n - 1}-character bitstring")
        if self.family in ("real_amplitudes", "trotter") and n < 2:
            raise BenchSpecError(f"{self.family} needs at least 2 qubits")
        if self.reps < 1 or self.steps < 1:
            raise BenchSpecError("reps and steps must be positive")

    @property
    def label(self) -> str:
        return f"{self.family}_{self.num_qubits}"


def generate(spec: BenchSpec) -> Circuit:
    builder = {
        "real_amplitudes": _real_amplitudes,
        "bernstein_vazirani": _bernstein_vazirani,
        "ripple_adder": _ripple_adder,
        "trotter": _trotter,
    }[spec.family]
    gates = builder(spec)
    n = spec.num_qubits
    c = Circuit(n, gates, spec.label)
    if spec.family != "bernstein_vazirani":
        c = c.with_measurements()
    return c


def _real_amplitudes(spec: BenchSpec) -> list[Gate]:
    # reverse-linear entanglement: cx(n-2, n-1), ..., cx(0, 1)
    n = spec.num_qubits
    angles = iter(np.random.default_rng(spec.seed).uniform(0.0, 2 * math.pi, n * (spec.reps + 1)))
    gates: list[Gate] = []
    for _ in range(spec.reps):
        gates += [Gate("ry", (q,), float(next(angles))) for q in range(n)]
        gates += [Gate("cx", (q, q + 1)) for q in reversed(range(n - 1))]
    gates += [Gate("ry", (q,), float(next(angles))) for q in range(n)]
    return gates


def _bernstein_vazirani(spec: BenchSpec) -> list[Gate]:
    n = spec.num_qubits
    secret = spec.secret if spec.secret is not None else "1" * (n - 1)
    anc = n - 1
    gates = [Gate("x", (anc,))] + [Gate("h", (q,)) for q in range(n)]
    gates += [Gate("cx", (i, anc)) for i, bit in enumerate(secret) if bit == "1"]
    gates += [Gate("h", (q,)) for q in range(n - 1)]
    gates += [Gate("measure", (q,)) for q in range(n - 1)]
    return gates


def _trotter(spec: BenchSpec) -> list[Gate]:
    """Transverse-field Ising steps: ZZ on even then odd bonds, then an X layer."""
    n = spec.num_qubits
    rng = np.random.default_rng(spec.seed)
    gates: list[Gate] = []
    for _ in range(spec.steps):
        theta_zz, theta_x = (float(a) for a in rng.uniform(0.0, math.pi, 2))
        for start in (0, 1):
            for q in range(start, n - 1, 2):
                gates += [Gate("cx", (q, q + 1)), Gate("rz", (q + 1,), theta_zz), Gate("cx", (q, q + 1))]
        gates += [Gate("rx", (q,), theta_x) for q in range(n)]
    return gates


# --- ripple-carry adder on a line ----------------------------------------------
#
# Qubit order c0, b0, a0, b1, a1, ..., b_{m-1}, a_{m-1}, z so every MAJ/UMA
# block acts on three consecutive qubits.  The end-to-end cx inside a block is
# bridged through the middle qubit, keeping the interaction graph a path.

def _cx_line(ctrl: int, tgt: int) -> list[Gate]:
    if abs(ctrl - tgt) == 1:
        return [Gate("cx", (ctrl, tgt))]
    if abs(ctrl - tgt) != 2:
        raise AssertionError("bridged cx spans exactly one middle qubit")
    mid = (ctrl + tgt) // 2
    return [Gate("cx", (ctrl, mid)), Gate("cx", (mid, tgt)), Gate("cx", (ctrl, mid)), Gate("cx", (mid, tgt))]


def _ccx_line(x: int, y: int, z: int) -> list[Gate]:
    t, tdg = math.pi / 4, -math.pi / 4
    g: list[Gate] = [Gate("h", (z,))]
    g += _cx_line(y, z)
    g.append(Gate("rz", (z,), tdg))
    g += _cx_line(x, z)
    g.append(Gate("rz", (z,), t))
    g += _cx_line(y, z)
    g.append(Gate("rz", (z,), tdg))
    g += _cx_line(x, z)
    g += [Gate("rz", (y,), t), Gate("rz", (z,), t), Gate("h", (z,))]
    g += _cx_line(x, y)
    g += [Gate("rz", (x,), t), Gate("rz", (y,), tdg)]
    g += _cx_line(x, y)
    return g


def _maj(x: int, y: int, z: int) -> list[Gate]:
    return _cx_line(z, y) + _cx_line(z, x) + _ccx_line(x, y, z)


def _uma(x: int, y: int, z: int) -> list[Gate]:
    return _ccx_line(x, y, z) + _cx_line(z, x) + _cx_line(x, y)


def adder_registers(num_qubits: int) -> dict[str, list[int]]:
    """Qubit indices of the adder's registers (``a``, ``b``, ``cin``, ``cout``)."""
    m = (num_qubits - 2) // 2
    return {
        "cin": [0],
        "b": [1 + 2 * i for i in range(m)],
        "a": [2 + 2 * i for i in range(m)],
        "cout": [num_qubits - 1],
    }


def _ripple_adder(spec: BenchSpec) -> list[Gate]:
    n = spec.num_qubits
    regs = adder_registers(n)
    a, b, z = regs["a"], regs["b"], regs["cout"][0]
    m = len(a)
    # superposed operands make the output distribution non-trivial
    gates = [Gate("h", (q,)) for q in sorted(a + b)]
    carry = 0
    for i in range(m):
        gates += _maj(carry, b[i], a[i])
        carry = a[i]
    gates += _cx_line(a[-1], z)
    for i in reversed(range(m)):
        prev = a[i - 1] if i > 0 else 0
        gates += _uma(prev, b[i], a[i])
    return gates


def adder_ideal_output(num_qubits: int, a_val: int, b_val: int, cin: int = 0) -> dict[str, int]:
    """Classical reference for the adder on basis inputs."""
    m = (num_qubits - 2) // 2
    total = a_val + b_val + cin
    return {"a": a_val, "b": total % (1 << m), "cin": cin, "cout": total >> m}


def basis_adder(num_qubits: int, a_val: int, b_val: int, cin: int = 0) -> Circuit:
    """The adder circuit acting on computational-basis operands (no Hadamards)."""
    regs = adder_registers(num_qubits)
    prep: list[Gate] = []
    for reg, val in (("a", a_val), ("b", b_val)):
        for i, q in enumerate(regs[reg]):
            if (val >> i) & 1:
                prep.append(Gate("x", (q,)))
    if cin:
        prep.append(Gate("x", (0,)))
    # drop only the leading operand Hadamards
    n_lead = len(regs["a"]) + len(regs["b"])
    body = _ripple_adder(BenchSpec("ripple_adder", num_qubits))[n_lead:]
    return Circuit(num_qubits, prep + body, f"adder_{a_val}+{b_val}").with_measurements()


# --- reference cut placements ---------------------------------------------------


def _wire_split(c: Circuit, w: int) -> list[tuple[int, int]]:
    """Two cuts isolating the block of gates that couple wire ``w`` to ``w + 1``."""
    on_w = [i for i, g in enumerate(c.gates) if w in g.qubits and g.kind != "measure"]
    pair = [i for i, g in enumerate(c.gates) if set(g.qubits) == {w, w + 1}]
    if not pair:
        raise BenchSpecError(f"no two-qubit gates between wires {w} and {w + 1}")
    before = [i for i in on_w if i < pair[0]]
    if not before:
        raise BenchSpecError(f"wire {w} has no gates before its coupling block")
    return [(w, before[-1]), (w, pair[-1])]


def reference_cuts(spec: BenchSpec, num_fragments: int = 2) -> list[tuple[int, int]]:
    """Cut points ``(qubit, after_gate)`` splitting ``generate(spec)`` into balanced fragments.

    real_amplitudes (reps=1) and trotter-free chains split anywhere into
    ``num_fragments`` pieces of near-equal width.  ripple_adder supports two
    fragments: the middle ``a`` wire is cut on entry to and exit from the upper
    MAJ/UMA block (for 6 qubits this gives two 4-qubit fragments).
    """
    n = spec.num_qubits
    c = generate(spec)
    if num_fragments < 1:
        raise BenchSpecError("num_fragments must be positive")
    if num_fragments == 1:
        return []
    if spec.family == "real_amplitudes":
        if spec.reps != 1:
            raise BenchSpecError("reference cuts exist only for reps=1 RealAmplitudes")
        # fragment sizes satisfy sum = n + (num_fragments - 1)
        total = n + num_fragments - 1
        if total // num_fragments < 2:
            raise BenchSpecError(f"{n} qubits cannot form {num_fragments} fragments of width >= 2")
        # narrower fragments upstream (high wires); 6 qubits -> cut (3, 7)
        widths = [total // num_fragments + (1 if k >= num_fragments - total % num_fragments else 0) for k in range(num_fragments)]
        cuts = []
        top = n - 1
        for w in widths[:-1]:
            q = top - w + 1  # lowest wire of this fragment; cut it after cx(q, q+1)
            cuts.append((q, n + (n - 2 - q)))
            top = q
        return cuts
    if spec.family == "ripple_adder":
        if num_fragments != 2:
            raise BenchSpecError("ripple_adder reference cuts produce exactly two fragments")
        a = adder_registers(n)["a"]
        return _wire_split(c, a[(len(a) - 1) // 2])
    raise BenchSpecError(f"no reference cuts for family {spec.family!r}")
