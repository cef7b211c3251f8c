"""Exact simulation: statevector (ideal) and density matrix (noisy).

Bitstrings list measured qubits in ascending index order, leftmost first;
``Distribution.probs`` is indexed the same way (first measured qubit is the
most significant bit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .circuit import Circuit, Gate

MAX_IDEAL_QUBITS = 24
MAX_NOISY_QUBITS = 12


class ResourceGuardError(RuntimeError):
    pass


class SimulationError(ValueError):
    pass


_S2 = 1 / math.sqrt(2)
_FIXED = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def gate_matrix(g: Gate) -> np.ndarray:
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    t = g.param / 2
    c, s = math.cos(t), math.sin(t)
    if g.kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if g.kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "rz":
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]])
    raise SimulationError(f"no matrix for {g.kind}")


class Distribution:
    """Probabilities over ``num_bits`` measured bits (may be a signed quasi-distribution)."""

    __slots__ = ("probs", "num_bits")

    def __init__(self, probs, num_bits: Optional[int] = None):
        probs = np.asarray(probs, dtype=float).ravel()
        if num_bits is None:
            num_bits = int(round(math.log2(len(probs)))) if len(probs) > 1 else 0
        if len(probs) != 1 << num_bits:
            raise SimulationError(f"{len(probs)} probabilities do not fit {num_bits} bits")
        self.probs = probs
        self.num_bits = num_bits

    @classmethod
    def from_dict(cls, d: Mapping[str, float]) -> "Distribution":
        if not d:
            raise SimulationError("empty distribution")
        n = len(next(iter(d)))
        probs = np.zeros(1 << n)
        for k, v in d.items():
            if len(k) != n or set(k) - {"0", "1"}:
                raise SimulationError(f"bad bitstring {k!r}")
            probs[int(k, 2) if n else 0] = v
        return cls(probs, n)

    def as_dict(self, tol: float = 0.0) -> dict[str, float]:
        """Lexicographically ordered ``{bitstring: probability}``, dropping ``|p| <= tol``."""
        out = {}
        for i, p in enumerate(self.probs):
            if abs(p) > tol:
                out[format(i, f"0{self.num_bits}b") if self.num_bits else ""] = float(p)
        return out

    def __getitem__(self, bitstring: str) -> float:
        return float(self.probs[int(bitstring, 2) if bitstring else 0])

    def total(self) -> float:
        return float(self.probs.sum())

    def clipped(self) -> "Distribution":
        p = np.clip(self.probs, 0.0, None)
        s = p.sum()
        if s <= 0:
            raise SimulationError("distribution has no positive mass")
        return Distribution(p / s, self.num_bits)

    def l1(self, other: "Distribution") -> float:
        return float(np.abs(self.probs - other.probs).sum())

    def __repr__(self):
        return f"Distribution({self.as_dict(1e-12)})"


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate depolarizing probabilities and per-qubit symmetric readout error.

    Indexed by the circuit's logical qubits; build one for a placed circuit
    with :func:`noise_model_for`.
    """

    p1: tuple[float, ...]
    p2: Mapping[tuple[int, int], float]
    readout: tuple[float, ...]

    def __post_init__(self):
        for v in list(self.p1) + list(self.p2.values()) + list(self.readout):
            if not 0.0 <= v < 1.0:
                raise SimulationError(f"channel parameter {v} outside [0, 1)")

    @classmethod
    def ideal(cls, num_qubits: int) -> "NoiseModel":
        return cls((0.0,) * num_qubits, {}, (0.0,) * num_qubits)

    def scaled(self, lam: float) -> "NoiseModel":
        def sc(v):
            return min(v * lam, 0.999)

        return NoiseModel(
            tuple(sc(v) for v in self.p1),
            {k: sc(v) for k, v in self.p2.items()},
            tuple(min(v * lam, 0.5) for v in self.readout),
        )

    def gate_error(self, g: Gate) -> float:
        if g.kind == "measure":
            return 0.0
        if g.kind == "cx":
            return self.p2.get(tuple(sorted(g.qubits)), 0.0)
        return self.p1[g.qubits[0]]


def noise_model_for(c: Circuit, hw, layout: Sequence[int], scale: float = 1.0) -> NoiseModel:
    """Noise seen by ``c`` when placed on ``hw`` with ``layout[k]`` hosting logical qubit ``k``."""
    eidx = hw.edge_index()
    p2 = {}
    for g in c.gates:
        if g.kind == "cx":
            a, b = sorted(g.qubits)
            edge = tuple(sorted((layout[a], layout[b])))
            if edge not in eidx:
                raise SimulationError(f"layout maps cx{g.qubits} onto non-edge {edge} of {hw.name}")
            p2[(a, b)] = hw.err_2q[eidx[edge]]
    nm = NoiseModel(
        tuple(hw.err_1q[layout[q]] for q in range(c.num_qubits)),
        p2,
        tuple(hw.err_readout[layout[q]] for q in range(c.num_qubits)),
    )
    return nm.scaled(scale) if scale != 1.0 else nm


def _check_measured(c: Circuit) -> list[int]:
    meas = c.measured_qubits
    if not meas:
        raise SimulationError(f"circuit {c.name!r} has no measurements")
    return meas


def _apply_1q(state, u, axis):
    state = np.tensordot(u, state, axes=([1], [axis]))
    return np.moveaxis(state, 0, axis)


def _apply_cx(state, ctrl, tgt):
    idx = [slice(None)] * state.ndim
    idx[ctrl] = 1
    sub = state[tuple(idx)]
    t = tgt if tgt < ctrl else tgt - 1
    state[tuple(idx)] = np.flip(sub, axis=t)
    return state


def statevector(c: Circuit) -> np.ndarray:
    n = c.num_qubits
    if n > MAX_IDEAL_QUBITS:
        raise ResourceGuardError(f"{n} qubits exceeds the statevector limit of {MAX_IDEAL_QUBITS}")
    psi = np.zeros((2,) * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for g in c.gates:
        if g.kind == "measure":
            continue
        if g.kind == "cx":
            psi = _apply_cx(psi, *g.qubits)
        else:
            psi = _apply_1q(psi, gate_matrix(g), g.qubits[0])
    return psi


def _marginal(probs: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    drop = tuple(q for q in range(n) if q not in keep)
    return probs.sum(axis=drop) if drop else probs


def simulate_ideal(c: Circuit) -> Distribution:
    meas = _check_measured(c)
    psi = statevector(c)
    probs = _marginal(np.abs(psi) ** 2, c.num_qubits, meas)
    return Distribution(probs.ravel(), len(meas))


def density_matrix(c: Circuit, nm: Optional[NoiseModel] = None) -> np.ndarray:
    """Final density matrix as a ``(2,)*2n`` tensor (row axes first)."""
    n = c.num_qubits
    if n > MAX_NOISY_QUBITS:
        raise ResourceGuardError(f"{n} qubits exceeds the density-matrix limit of {MAX_NOISY_QUBITS}")
    rho = np.zeros((2,) * (2 * n), dtype=complex)
    rho[(0,) * (2 * n)] = 1.0
    for g in c.gates:
        if g.kind == "measure":
            continue
        if g.kind == "cx":
            a, b = g.qubits
            rho = _apply_cx(rho, a, b)
            rho = _apply_cx(rho, n + a, n + b)
        else:
            u = gate_matrix(g)
            q = g.qubits[0]
            rho = _apply_1q(rho, u, q)
            rho = _apply_1q(rho, u.conj(), n + q)
        p = nm.gate_error(g) if nm is not None else 0.0
        if p > 0.0:
            rho = depolarize(rho, n, g.qubits, p)
    return rho


def depolarize(rho: np.ndarray, n: int, support, p: float) -> np.ndarray:
    """``rho -> (1-p) rho + p * Tr_S(rho) (x) I/d`` on the qubits in ``support``."""
    support = list(support)
    d = 2 ** len(support)
    blocks = []
    reduced = None
    for k in range(d):
        idx = [slice(None)] * (2 * n)
        for i, q in enumerate(support):
            b = (k >> (len(support) - 1 - i)) & 1
            idx[q] = b
            idx[n + q] = b
        idx = tuple(idx)
        blocks.append(idx)
        reduced = rho[idx].copy() if reduced is None else reduced + rho[idx]
    out = (1.0 - p) * rho
    for idx in blocks:
        out[idx] += (p / d) * reduced
    return out


def simulate_noisy(c: Circuit, nm: NoiseModel) -> Distribution:
    meas = _check_measured(c)
    n = c.num_qubits
    rho = density_matrix(c, nm)
    diag = np.real(np.diagonal(rho.reshape(1 << n, 1 << n))).reshape((2,) * n)
    probs = _marginal(diag, n, meas)
    for pos, q in enumerate(meas):
        r = nm.readout[q]
        if r > 0.0:
            conf = np.array([[1.0 - r, r], [r, 1.0 - r]])
            probs = np.moveaxis(np.tensordot(conf, probs, axes=([1], [pos])), 0, pos)
    probs = np.clip(probs.ravel(), 0.0, None)
    return Distribution(probs / probs.sum(), len(meas))


def fidelity(p: Distribution, q: Distribution) -> float:
    """Classical (Bhattacharyya) fidelity after clipping negatives and renormalizing."""
    if p.num_bits != q.num_bits:
        raise SimulationError(f"distributions over {p.num_bits} and {q.num_bits} bits")
    a, b = p.clipped().probs, q.clipped().probs
    f = float(np.sqrt(a * b).sum() ** 2)
    return min(max(f, 0.0), 1.0)
