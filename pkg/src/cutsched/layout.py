"""Exact-embedding layout search and calibration-based layout scores."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .circuit import Circuit, InteractionGraph, interaction_graph
from .hardware import HardwareSpec, feasible_hardware
from .matching import lexmin_assignment


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class ScoredLayout:
    layout: tuple[int, ...]
    score: float

    def to_dict(self) -> dict:
        return {"score": self.score, "layout": list(self.layout)}


def _search_order(adj: list[set[int]], vertices: Sequence[int]) -> list[tuple[int, Optional[int]]]:
    """BFS order over ``vertices`` as ``(vertex, already-placed neighbour or None)``."""
    order: list[tuple[int, Optional[int]]] = []
    seen: set[int] = set()
    remaining = sorted(vertices, key=lambda v: (-len(adj[v]), v))
    for root in remaining:
        if root in seen:
            continue
        seen.add(root)
        order.append((root, None))
        dq = deque([root])
        while dq:
            x = dq.popleft()
            for y in sorted(adj[x]):
                if y not in seen:
                    seen.add(y)
                    order.append((y, x))
                    dq.append(y)
    return order


def _embeddings(adj: list[set[int]], vertices: Sequence[int], hw: HardwareSpec):
    """Yield injective, edge-preserving partial maps ``{logical: physical}`` over ``vertices``."""
    hadj = hw.adjacency()
    order = _search_order(adj, vertices)
    mapping: dict[int, int] = {}
    used: set[int] = set()
    deg = {v: len(adj[v]) for v in vertices}

    def rec(k: int):
        if k == len(order):
            yield dict(mapping)
            return
        v, anchor = order[k]
        pool = sorted(hadj[mapping[anchor]]) if anchor is not None else range(hw.num_qubits)
        for p in pool:
            if p in used or len(hadj[p]) < deg[v]:
                continue
            if any(w in mapping and mapping[w] not in hadj[p] for w in adj[v]):
                continue
            mapping[v] = p
            used.add(p)
            yield from rec(k + 1)
            del mapping[v]
            used.discard(p)

    yield from rec(0)


def enumerate_layouts(g: InteractionGraph, hw: HardwareSpec) -> list[tuple[int, ...]]:
    """All injective edge-preserving layouts, sorted lexicographically."""
    if g.num_vertices > hw.num_qubits:
        return []
    adj = g.adjacency()
    out = {tuple(m[v] for v in range(g.num_vertices)) for m in _embeddings(adj, range(g.num_vertices), hw)}
    return sorted(out)


def _op_counts(c: Circuit):
    n1 = [0] * c.num_qubits
    nm = [0] * c.num_qubits
    ncx: dict[tuple[int, int], int] = {}
    for g in c.gates:
        if g.kind == "cx":
            e = tuple(sorted(g.qubits))
            ncx[e] = ncx.get(e, 0) + 1
        elif g.kind == "measure":
            nm[g.qubits[0]] += 1
        else:
            n1[g.qubits[0]] += 1
    return n1, nm, ncx


def score_layout(c: Circuit, hw: HardwareSpec, layout: Sequence[int]) -> float:
    """``1 - prod(1 - eps)`` over every gate and measurement of ``c`` as placed.

    Lower is better.  Factors are multiplied qubit by qubit (1-qubit gates,
    then readout) and then edge by edge in sorted order.
    """
    layout = tuple(layout)
    if len(layout) != c.num_qubits or len(set(layout)) != len(layout):
        raise LayoutError(f"layout {layout} is not injective over {c.num_qubits} qubits")
    if any(not 0 <= p < hw.num_qubits for p in layout):
        raise LayoutError(f"layout {layout} uses qubits outside {hw.name}")
    eidx = hw.edge_index()
    n1, nm, ncx = _op_counts(c)
    keep = 1.0
    for q in range(c.num_qubits):
        keep *= (1.0 - hw.err_1q[layout[q]]) ** n1[q]
        keep *= (1.0 - hw.err_readout[layout[q]]) ** nm[q]
    for (a, b), k in sorted(ncx.items()):
        edge = tuple(sorted((layout[a], layout[b])))
        if edge not in eidx:
            raise LayoutError(f"cx({a},{b}) lands on non-edge {edge} of {hw.name}")
        keep *= (1.0 - hw.err_2q[eidx[edge]]) ** k
    return 1.0 - keep


def best_layout(c: Circuit, hw: HardwareSpec) -> ScoredLayout:
    """Lowest-score layout; ties go to the lexicographically smallest layout.

    Qubits without two-qubit gates are placed afterwards by an optimal
    assignment onto the free physical qubits (scores factor per qubit), so
    their placements are never enumerated exhaustively.
    """
    if c.num_qubits > hw.num_qubits:
        raise LayoutError(f"{c.name} ({c.num_qubits} qubits) does not fit {hw.name} ({hw.num_qubits})")
    g = interaction_graph(c)
    adj = g.adjacency()
    linked = [v for v in range(g.num_vertices) if adj[v]]
    isolated = [v for v in range(g.num_vertices) if not adj[v]]
    n1, nm, _ = _op_counts(c)
    # per (isolated logical qubit, physical qubit) log-survival cost
    iso_cost = None
    if isolated:
        e1 = np.array(hw.err_1q)
        er = np.array(hw.err_readout)
        iso_cost = np.array([-(n1[v] * np.log1p(-e1) + nm[v] * np.log1p(-er)) for v in isolated])
    best: Optional[ScoredLayout] = None
    for m in _embeddings(adj, linked, hw):
        if isolated:
            free = [p for p in range(hw.num_qubits) if p not in m.values()]
            cols = lexmin_assignment(iso_cost[:, free])
            for v, col in zip(isolated, cols):
                m[v] = free[col]
        lay = tuple(m[v] for v in range(c.num_qubits))
        s = score_layout(c, hw, lay)
        if best is None or s < best.score or (s == best.score and lay < best.layout):
            best = ScoredLayout(lay, s)
    if best is None:
        raise LayoutError(f"no exact embedding of {c.name} on {hw.name}")
    return best


@dataclass(frozen=True)
class ScoreMatrix:
    sub_names: tuple[str, ...]
    hw_names: tuple[str, ...]
    cells: tuple[tuple[Optional[ScoredLayout], ...], ...]

    def score(self, i: int, j: int) -> Optional[float]:
        cell = self.cells[i][j]
        return None if cell is None else cell.score

    def scores(self) -> list[list[Optional[float]]]:
        return [[None if c is None else c.score for c in row] for row in self.cells]

    def to_dict(self) -> dict:
        return {
            "subcircuits": list(self.sub_names),
            "hardware": list(self.hw_names),
            "cells": [[None if c is None else c.to_dict() for c in row] for row in self.cells],
        }


def score_matrix(subs, pool: Sequence[HardwareSpec]) -> ScoreMatrix:
    """Best (score, layout) per feasible (subcircuit, device) pair; ``None`` elsewhere.

    ``subs`` may hold Subcircuits or plain Circuits.
    """
    rows = []
    for s in subs:
        c = s.circuit if hasattr(s, "circuit") else s
        fits = {hw.name for hw in feasible_hardware(c, pool)}
        row = []
        for hw in pool:
            cell = None
            if hw.name in fits:
                try:
                    cell = best_layout(c, hw)
                except LayoutError:
                    cell = None
            row.append(cell)
        if all(x is None for x in row):
            raise LayoutError(f"{c.name} has no feasible (hardware, layout) pair in the pool")
        rows.append(tuple(row))
    names = tuple((s.circuit if hasattr(s, "circuit") else s).name for s in subs)
    return ScoreMatrix(names, tuple(hw.name for hw in pool), tuple(rows))
