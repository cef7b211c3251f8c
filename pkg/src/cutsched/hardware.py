"""Hardware descriptors: coupling map plus calibration data."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


class SchemaError(ValueError):
    """Invalid hardware-pool data; ``path`` points at the offending field."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass(frozen=True)
class HardwareSpec:
    name: str
    num_qubits: int
    coupling: tuple[tuple[int, int], ...]
    err_1q: tuple[float, ...]
    err_2q: tuple[float, ...]
    err_readout: tuple[float, ...]
    t1_us: Optional[tuple[float, ...]] = None
    t2_us: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "coupling", tuple(tuple(sorted(map(int, e))) for e in self.coupling))
        for f in ("err_1q", "err_2q", "err_readout", "t1_us", "t2_us"):
            v = getattr(self, f)
            if v is not None:
                object.__setattr__(self, f, tuple(float(x) for x in v))
        _validate_spec(self, self.name)

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.coupling)}

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.num_qubits)]
        for a, b in self.coupling:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "num_qubits": self.num_qubits,
            "coupling": [list(e) for e in self.coupling],
            "err_1q": list(self.err_1q),
            "err_2q": list(self.err_2q),
            "err_readout": list(self.err_readout),
        }
        if self.t1_us is not None:
            d["t1_us"] = list(self.t1_us)
        if self.t2_us is not None:
            d["t2_us"] = list(self.t2_us)
        return d


def _validate_spec(hw: HardwareSpec, path: str) -> None:
    if not isinstance(hw.num_qubits, int) or hw.num_qubits < 1:
        raise SchemaError(f"{path}.num_qubits", "must be a positive integer")
    seen = set()
    for k, (a, b) in enumerate(hw.coupling):
        if a == b or not (0 <= a < hw.num_qubits and 0 <= b < hw.num_qubits):
            raise SchemaError(f"{path}.coupling[{k}]", f"invalid edge ({a}, {b})")
        if (a, b) in seen:
            raise SchemaError(f"{path}.coupling[{k}]", f"duplicate edge ({a}, {b})")
        seen.add((a, b))
    sizes = {"err_1q": hw.num_qubits, "err_2q": len(hw.coupling), "err_readout": hw.num_qubits}
    for f, n in sizes.items():
        vals = getattr(hw, f)
        if len(vals) != n:
            raise SchemaError(f"{path}.{f}", f"expected {n} entries, got {len(vals)}")
        for k, v in enumerate(vals):
            if not 0.0 <= v < 1.0:
                raise SchemaError(f"{path}.{f}[{k}]", f"probability {v} outside [0, 1)")
    for f in ("t1_us", "t2_us"):
        vals = getattr(hw, f)
        if vals is not None:
            if len(vals) != hw.num_qubits:
                raise SchemaError(f"{path}.{f}", f"expected {hw.num_qubits} entries, got {len(vals)}")
            for k, v in enumerate(vals):
                if v <= 0:
                    raise SchemaError(f"{path}.{f}[{k}]", "decay time must be positive")


class HardwarePool(tuple):
    """Ordered, non-empty collection of uniquely named :class:`HardwareSpec`."""

    def __new__(cls, specs: Iterable[HardwareSpec]):
        specs = tuple(specs)
        if not specs:
            raise SchemaError("pool", "hardware pool is empty")
        names = [s.name for s in specs]
        for k, n in enumerate(names):
            if names.index(n) != k:
                raise SchemaError(f"pool[{k}].name", f"duplicate device name {n!r}")
        return super().__new__(cls, specs)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self]

    def by_name(self, name: str) -> HardwareSpec:
        for s in self:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps([s.to_dict() for s in self], indent=1) + "\n"


_REQUIRED = ("name", "num_qubits", "coupling", "err_1q", "err_2q", "err_readout")


def pool_from_data(data) -> HardwarePool:
    if not isinstance(data, list):
        raise SchemaError("pool", "expected a JSON array of hardware specs")
    specs = []
    for k, d in enumerate(data):
        path = f"pool[{k}]"
        if not isinstance(d, dict):
            raise SchemaError(path, "expected an object")
        for f in _REQUIRED:
            if f not in d:
                raise SchemaError(f"{path}.{f}", "missing field")
        unknown = set(d) - set(_REQUIRED) - {"t1_us", "t2_us"}
        if unknown:
            raise SchemaError(f"{path}.{sorted(unknown)[0]}", "unknown field")
        if not isinstance(d["name"], str):
            raise SchemaError(f"{path}.name", "must be a string")
        if not isinstance(d["num_qubits"], int) or isinstance(d["num_qubits"], bool):
            raise SchemaError(f"{path}.num_qubits", "must be an integer")
        for f in ("coupling", "err_1q", "err_2q", "err_readout"):
            if not isinstance(d[f], list):
                raise SchemaError(f"{path}.{f}", "must be an array")
        for e, edge in enumerate(d["coupling"]):
            if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(x, int) for x in edge)):
                raise SchemaError(f"{path}.coupling[{e}]", "edge must be a pair of integers")
        try:
            spec = HardwareSpec(
                name=d["name"],
                num_qubits=d["num_qubits"],
                coupling=d["coupling"],
                err_1q=d["err_1q"],
                err_2q=d["err_2q"],
                err_readout=d["err_readout"],
                t1_us=d.get("t1_us"),
                t2_us=d.get("t2_us"),
            )
        except SchemaError as exc:
            raise SchemaError(exc.path.replace(d["name"], path, 1), str(exc).split(": ", 1)[1]) from None
        except (TypeError, ValueError) as exc:
            raise SchemaError(path, str(exc)) from None
        specs.append(spec)
    return HardwarePool(specs)


def load_pool(path) -> HardwarePool:
    """Load a pool file, or a bundled fixture by name (``ibm_pool.json``)."""
    p = Path(path)
    if not p.exists():
        bundled = resources.files("cutsched") / "data" / str(path)
        if bundled.is_file():
            return pool_from_data(json.loads(bundled.read_text()))
        raise FileNotFoundError(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON: {exc}") from None
    return pool_from_data(data)


def feasible_hardware(sub, pool: Sequence[HardwareSpec]) -> list[HardwareSpec]:
    """Devices with at least as many qubits as ``sub`` (a Subcircuit or Circuit), pool order."""
    n = sub.num_qubits
    return [hw for hw in pool if hw.num_qubits >= n]


# --- bundled fixtures ------------------------------------------------------------

FALCON_27 = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9),
    (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16), (15, 18),
    (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23), (22, 25), (23, 24),
    (24, 25), (25, 26),
)
FALCON_16 = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9),
    (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
)
H_7 = ((0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6))
T_5 = ((0, 1), (1, 2), (1, 3), (3, 4))
LINE_5 = ((0, 1), (1, 2), (2, 3), (3, 4))

# name, qubits, coupling, 2q error, 1q error, T1 (us), T2 (us), readout error
IBM_DEVICES = (
    ("ibmq_hanoi", 27, FALCON_27, 8.3e-3, 2.1e-4, 156.69, 137.7, 1e-2),
    ("ibmq_mumbai", 27, FALCON_27, 7.5e-3, 2.5e-4, 118.01, 161.97, 1.8e-2),
    ("ibmq_cairo", 27, FALCON_27, 9.4e-3, 2.2e-4, 94.62, 116.42, 1.3e-2),
    ("ibmq_kolkata", 27, FALCON_27, 8.7e-3, 2e-4, 117.42, 92.97, 1.2e-2),
    ("ibmq_guadalupe", 16, FALCON_16, 9.74e-3, 2.64e-4, 86.72, 118.73, 1.64e-2),
    ("ibmq_lagos", 7, H_7, 7.2e-3, 2e-4, 112.51, 84.42, 1.4e-2),
    ("ibmq_nairobi", 7, H_7, 8.7e-3, 3.5e-4, 114.75, 71.42, 2.7e-2),
    ("ibmq_jakarta", 7, H_7, 7.3e-3, 1.03e-4, 136.95, 38.99, 2.09e-2),
    ("ibmq_manila", 5, LINE_5, 7.7e-3, 2.46e-4, 141.15, 56.53, 2.2e-2),
    ("ibmq_lima", 5, T_5, 9.58e-3, 3.76e-4, 98.68, 115.32, 2.41e-2),
    ("ibmq_belem", 5, T_5, 8.89e-3, 3.88e-4, 101.42, 98.85, 2.39e-2),
    ("ibmq_quito", 5, T_5, 7.9e-3, 2.88e-4, 96.83, 104.39, 4.15e-2),
)


def ibm_pool() -> HardwarePool:
    """The twelve devices with their published averages spread uniformly."""
    specs = []
    for name, n, coupling, e2, e1, t1, t2, ro in IBM_DEVICES:
        specs.append(
            HardwareSpec(
                name=name,
                num_qubits=n,
                coupling=coupling,
                err_1q=(e1,) * n,
                err_2q=(e2,) * len(coupling),
                err_readout=(ro,) * n,
                t1_us=(t1,) * n,
                t2_us=(t2,) * n,
            )
        )
    return HardwarePool(specs)


def jitter_pool(pool: Sequence[HardwareSpec], seed: int, spread: float = 0.5) -> HardwarePool:
    """Multiply every error rate by an independent factor in ``[1-spread, 1+spread]``."""
    rng = np.random.default_rng(seed)

    def jit(vals):
        f = rng.uniform(1.0 - spread, 1.0 + spread, len(vals))
        return tuple(float(min(v * x, 0.999)) for v, x in zip(vals, f))

    out = []
    for hw in pool:
        out.append(
            HardwareSpec(
                name=hw.name,
                num_qubits=hw.num_qubits,
                coupling=hw.coupling,
                err_1q=jit(hw.err_1q),
                err_2q=jit(hw.err_2q),
                err_readout=jit(hw.err_readout),
                t1_us=hw.t1_us,
                t2_us=hw.t2_us,
            )
        )
    return HardwarePool(out)


def hetero_pool(seed: int = 0) -> HardwarePool:
    return jitter_pool(ibm_pool(), seed)
