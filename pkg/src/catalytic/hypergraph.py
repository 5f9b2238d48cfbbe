"""Hypergraph states and the Y-measurement injection of |+i>."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from catalytic.statevec import (
    SINGLE_QUBIT_MATRICES,
    MeasurementOutcome,
    PauliBasis,
    Policy,
    SimulationError,
    StateVector,
    apply_matrix,
    measure_pauli,
)

MAX_VERTICES = 20


class HypergraphError(ValueError):
    pass


def _edge_set(edges: Iterable[Iterable[int]], arity: int, m: int) -> frozenset[tuple[int, ...]]:
    out = set()
    for e in edges:
        e = tuple(sorted(int(v) for v in e))
        if len(e) != arity:
            raise HypergraphError(f"edge {e} must have exactly {arity} vertices")
        if len(set(e)) != arity:
            raise HypergraphError(f"edge {e} repeats a vertex")
        if any(not 1 <= v <= m for v in e):
            raise HypergraphError(f"edge {e} has a vertex outside [1, {m}]")
        if e in out:
            raise HypergraphError(f"duplicate edge {e}")
        out.add(e)
    return frozenset(out)


@dataclass(frozen=True)
class Hypergraph:
    """Vertices ``1..num_vertices`` with 2-edges and 3-hyperedges."""

    num_vertices: int
    edges2: frozenset = frozenset()
    edges3: frozenset = frozenset()

    def __post_init__(self):
        if self.num_vertices < 1:
            raise HypergraphError("a hypergraph needs at least one vertex")
        object.__setattr__(self, "edges2", _edge_set(self.edges2, 2, self.num_vertices))
        object.__setattr__(self, "edges3", _edge_set(self.edges3, 3, self.num_vertices))

    def to_dict(self) -> dict:
        return {
            "num_vertices": self.num_vertices,
            "edges2": [list(e) for e in sorted(self.edges2)],
            "edges3": [list(e) for e in sorted(self.edges3)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hypergraph":
        return cls(int(data["num_vertices"]), data.get("edges2", []), data.get("edges3", []))


@dataclass(frozen=True)
class SectionedResource:
    """A hypergraph split into input, body and output vertex sections."""

    hypergraph: Hypergraph
    input_section: frozenset
    body_section: frozenset
    output_section: frozenset

    def __post_init__(self):
        secs = [frozenset(int(v) for v in s) for s in (self.input_section, self.body_section, self.output_section)]
        for name, s in zip(("input_section", "body_section", "output_section"), secs):
            object.__setattr__(self, name, s)
        everything = set().union(*secs)
        if sum(map(len, secs)) != len(everything):
            raise HypergraphError("sections overlap")
        if everything != set(range(1, self.hypergraph.num_vertices + 1)):
            raise HypergraphError("sections must cover every vertex exactly once")

    @property
    def measured(self) -> frozenset:
        return self.input_section | self.body_section

    def to_dict(self) -> dict:
        d = self.hypergraph.to_dict()
        d["sections"] = {
            "input": sorted(self.input_section),
            "body": sorted(self.body_section),
            "output": sorted(self.output_section),
        }
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "SectionedResource":
        g = Hypergraph.from_dict(data)
        s = data.get("sections", {})
        return cls(g, s.get("input", []), s.get("body", []), s.get("output", []))


def build_state(g: Hypergraph, order: Iterable[tuple[int, ...]] | None = None) -> StateVector:
    """``prod CCZ * prod CZ |+>^m``.

    Every edge only flips the sign of basis states whose bits are all 1 on
    that edge, so the state is built directly from sign parities. ``order``
    optionally fixes the sequence in which edges are applied (the result
    does not depend on it).
    """
    m = g.num_vertices
    if m > MAX_VERTICES:
        raise HypergraphError(f"build_state is limited to {MAX_VERTICES} vertices, got {m}")
    edges = list(order) if order is not None else sorted(g.edges2) + sorted(g.edges3)
    if set(edges) != set(g.edges2) | set(g.edges3) or len(edges) != len(g.edges2) + len(g.edges3):
        raise HypergraphError("order must list every edge exactly once")
    idx = np.arange(2**m)
    bits = [(idx >> (m - v)) & 1 for v in range(1, m + 1)]
    parity = np.zeros(2**m, dtype=np.int64)
    for e in edges:
        term = np.ones(2**m, dtype=np.int64)
        for v in e:
            term &= bits[v - 1]
        parity ^= term
    amps = (1 - 2 * parity) * 2 ** (-m / 2)
    return StateVector(m, amps.astype(complex))


def attach_injection_vertex(g: Hypergraph, target: int) -> tuple[Hypergraph, int]:
    """Add a fresh vertex joined to ``target`` by one 2-edge."""
    if not 1 <= target <= g.num_vertices:
        raise HypergraphError(f"target {target} outside [1, {g.num_vertices}]")
    new = g.num_vertices + 1
    return Hypergraph(new, g.edges2 | {(target, new)}, g.edges3), new


@dataclass(frozen=True)
class InjectionResult:
    state: StateVector
    byproduct: str  # "I" or "Z", acting on the target
    outcome: MeasurementOutcome

    def corrected(self, target: int) -> StateVector:
        if self.byproduct == "I":
            return self.state
        return apply_matrix(self.state, SINGLE_QUBIT_MATRICES["Z"], target)


def y_inject(state: StateVector, ancilla: int, target: int, policy: Policy) -> InjectionResult:
    """Measure ``ancilla`` in Y; the CZ-neighbour ``target`` picks up S.

    Outcome +1 leaves ``S|+> = |+i>`` on the target (byproduct I); outcome
    -1 leaves ``Z S|+>`` (byproduct Z). The ancilla stays in the register.
    """
    if ancilla == target:
        raise SimulationError("ancilla and target must differ")
    outcome, post = measure_pauli(state, ancilla, PauliBasis.Y, policy)
    return InjectionResult(post, "I" if outcome.eigenvalue == 1 else "Z", outcome)


def transformed_demo_resource() -> tuple[SectionedResource, StateVector]:
    """Three |+> inputs with an injection vertex (4) attached to input 3."""
    g, new = attach_injection_vertex(Hypergraph(3), 3)
    res = SectionedResource(g, {1, 2, 3}, {new}, set())
    return res, build_state(g)
