"""Classical recombination of fragment-instance distributions.

Each cut replaces the identity channel on a wire by
``rho = 1/2 * sum_P Tr(rho P) P`` with ``P`` in ``I, X, Y, Z``.  The upstream
fragment supplies ``Tr(rho P)`` from its basis-``P`` instance (``I`` and ``Z``
both come from the Z-basis instance), and the downstream fragment supplies
``P`` as a signed combination of the four prepared states.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .cutter import BASES, PREPS, Subcircuit
from .kernels import accumulate_terms
from .sim import Distribution, _FIXED

PAULIS = ("I", "X", "Y", "Z")
# basis instance read for each Pauli on a measured cut wire
MEASURE_BASIS = {"I": "Z", "X": "X", "Y": "Y", "Z": "Z"}
# outcome sign (bit 0, bit 1) for each Pauli
MEASURE_SIGN = np.array([[1.0, 1.0], [1.0, -1.0], [1.0, -1.0], [1.0, -1.0]])
# Pauli as a combination of prepared states (zero, one, plus, plus_i)
PREP_COEFF = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [-1.0, -1.0, 2.0, 0.0],
        [-1.0, -1.0, 0.0, 2.0],
        [1.0, -1.0, 0.0, 0.0],
    ]
)


class ReconstructionError(ValueError):
    pass


def _check_coefficient_table() -> None:
    eye = np.eye(2, dtype=complex)
    paulis = {"I": eye, "X": _FIXED["x"], "Y": _FIXED["y"], "Z": _FIXED["z"]}
    kets = {
        "zero": np.array([1, 0], dtype=complex),
        "one": np.array([0, 1], dtype=complex),
        "plus": np.array([1, 1], dtype=complex) / np.sqrt(2),
        "plus_i": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    }
    states = [np.outer(kets[r], kets[r].conj()) for r in PREPS]
    for a, p in enumerate(PAULIS):
        combo = sum(PREP_COEFF[a, r] * states[r] for r in range(4))
        if not np.allclose(combo, paulis[p]):
            raise AssertionError(f"preparation coefficients do not reproduce {p}")
    # measuring in basis B = rotate then read Z: need U^dag Z U = P
    rot = {"X": _FIXED["h"], "Y": _FIXED["h"] @ _FIXED["sdg"], "Z": eye}
    for a, p in enumerate(PAULIS):
        u = rot[MEASURE_BASIS[p]]
        observable = u.conj().T @ np.diag(MEASURE_SIGN[a]).astype(complex) @ u
        if not np.allclose(observable, paulis[p]):
            raise AssertionError(f"measurement rule does not reproduce {p}")
    # and the identity decomposition itself
    rng = np.random.default_rng(0)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ m.conj().T
    back = sum(np.trace(rho @ paulis[p]) * paulis[p] for p in PAULIS) / 2
    if not np.allclose(back, rho):
        raise AssertionError("Pauli decomposition of the identity channel failed")


_check_coefficient_table()


def term_count(k: int) -> int:
    if k < 0:
        raise ValueError("number of cuts must be non-negative")
    return 4**k


@dataclass(frozen=True)
class CutPlan:
    fragments: tuple[Subcircuit, ...]
    num_cuts: int
    num_output_bits: int

    @classmethod
    def from_subcircuits(cls, subs: Sequence[Subcircuit]) -> "CutPlan":
        meas = [c for s in subs for c in s.measure_cuts]
        prep = [c for s in subs for c in s.prepare_cuts]
        k = len(meas)
        if sorted(meas) != list(range(k)) or sorted(prep) != list(range(k)):
            raise ReconstructionError("every cut needs exactly one measured and one prepared end")
        bits = sorted(b for s in subs for _, b in s.output_wires)
        if bits != list(range(len(bits))):
            raise ReconstructionError(f"output bits {bits} are not a bijection onto the parent outputs")
        return cls(tuple(subs), k, len(bits))

    def required_instances(self) -> list[tuple[int, tuple[str, ...], tuple[str, ...]]]:
        import itertools

        keys = []
        for s in self.fragments:
            m, p = len(s.measure_cut_wires), len(s.prepare_cut_wires)
            for labels in itertools.product(*([BASES] * m + [PREPS] * p)):
                keys.append((s.index, tuple(labels[:m]), tuple(labels[m:])))
        return keys


@dataclass(frozen=True)
class ReconstructionResult:
    raw: Distribution
    clipped: Distribution
    term_count: int
    elapsed_ms: float

    def to_dict(self, tol: float = 1e-15) -> dict:
        return {
            "raw": self.raw.as_dict(tol),
            "clipped": self.clipped.as_dict(tol),
            "term_count": self.term_count,
            "elapsed_ms": self.elapsed_ms,
            "negative_mass": float(-self.raw.probs[self.raw.probs < 0].sum()),
        }


def fragment_table(s: Subcircuit, dists: Mapping) -> np.ndarray:
    """Signed table of shape ``(4**(m+p), 2**outputs)`` for one fragment.

    Rows run over Pauli labels on the fragment's measured cut wires, then its
    prepared cut wires (first wire most significant); columns over its output
    bits in ``output_wires`` order.
    """
    m, p = len(s.measure_cut_wires), len(s.prepare_cut_wires)
    measured = sorted(s.measure_cut_wires + tuple(w for w, _ in s.output_wires))
    pos = {w: k for k, w in enumerate(measured)}
    cut_axes = [pos[w] for w in s.measure_cut_wires]
    out_axes = [pos[w] for w, _ in s.output_wires]
    n_out = len(out_axes)
    nbits = len(measured)

    import itertools

    prep_tuples = list(itertools.product(PREPS, repeat=p))
    # values[mP, prep-instance, outputs] before combining preparations
    values = np.zeros((4,) * m + (len(prep_tuples), 1 << n_out))
    for mlabels in itertools.product(range(4), repeat=m):
        basis = tuple(MEASURE_BASIS[PAULIS[a]] for a in mlabels)
        for r, prep in enumerate(prep_tuples):
            key = (s.index, basis, prep)
            d = dists.get(key)
            if d is None:
                raise ReconstructionError(f"missing instance {key}")
            if d.num_bits != nbits:
                raise ReconstructionError(f"instance {key} has {d.num_bits} bits, expected {nbits}")
            t = d.probs.reshape((2,) * nbits) if nbits else d.probs.reshape(())
            t = np.transpose(t, cut_axes + out_axes) if nbits else t
            for a in mlabels:
                t = np.tensordot(MEASURE_SIGN[a], t, axes=([0], [0]))
            values[mlabels + (r,)] = np.asarray(t).reshape(-1)
    values = values.reshape((4,) * m + (4,) * p + (1 << n_out,))
    for ax in range(m, m + p):
        values = np.moveaxis(np.tensordot(PREP_COEFF, values, axes=([1], [ax])), 0, ax)
    return values.reshape(4 ** (m + p), 1 << n_out)


def _normalize_keys(inst_dists: Mapping) -> dict:
    out = {}
    for k, v in inst_dists.items():
        out[k.key if hasattr(k, "key") else k] = v
    return out


def reconstruct(plan: CutPlan, inst_dists: Mapping) -> ReconstructionResult:
    """Recombine instance distributions into the uncut (quasi-)distribution.

    ``inst_dists`` maps InstanceCircuits (or their ``key`` tuples) to
    distributions over the instance's measured qubits.  The raw result may
    hold small negative entries; ``clipped`` is clipped and renormalized.
    """
    dists = _normalize_keys(inst_dists)
    tables, cut_index, out_bits = [], [], []
    for s in plan.fragments:
        tables.append(fragment_table(s, dists))
        cut_index.append(list(s.measure_cuts) + list(s.prepare_cuts))
        out_bits += [b for _, b in s.output_wires]
    start = time.perf_counter()
    flat = accumulate_terms(tables, cut_index, plan.num_cuts)
    elapsed = (time.perf_counter() - start) * 1e3
    flat = flat * 0.5**plan.num_cuts
    n = len(out_bits)
    if n:
        # axis k of the product holds parent bit out_bits[k]
        tensor = flat.reshape((2,) * n)
        tensor = np.transpose(tensor, np.argsort(out_bits))
        flat = tensor.reshape(-1)
    raw = Distribution(flat, n)
    return ReconstructionResult(raw, raw.clipped(), term_count(plan.num_cuts), elapsed)
