"""Circuit IR over a fixed gate alphabet, the gadget circuits, and equivalence checks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from catalytic.statevec import (
    SimulationError,
    StateVector,
    apply_gate,
    global_phase_distance,
    make_basis_state,
    random_state,
)

ARITY = {
    "H": 1, "S": 1, "Sdg": 1, "T": 1, "X": 1, "Y": 1, "Z": 1,
    "CZ": 2, "SWAP": 2, "CS": 2,
    "CCZ": 3,
}
SYMMETRIC = {"CZ", "CCZ", "SWAP", "CS"}

ALPHABETS = {
    "HCCZ": frozenset({"H", "CCZ"}),
    "HSCCZ": frozenset({"H", "S", "CCZ"}),
    "HCS": frozenset({"H", "CS"}),
    "FULL": frozenset(ARITY),
}

MAX_UNITARY_QUBITS = 10


class CircuitError(ValueError):
    """Malformed gate or circuit, or a gate outside the declared alphabet."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) != ARITY[self.kind]:
            raise CircuitError(f"{self.kind} takes {ARITY[self.kind]} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"{self.kind} on repeated qubits {qubits}")
        if any(q < 1 for q in qubits):
            raise CircuitError(f"qubit indices are 1-based, got {qubits}")
        if self.kind in SYMMETRIC:
            qubits = tuple(sorted(qubits))
        object.__setattr__(self, "qubits", qubits)

    def remap(self, mapping: Sequence[int]) -> "Gate":
        """Relabel local qubit ``q`` as ``mapping[q-1]``."""
        return Gate(self.kind, tuple(mapping[q - 1] for q in self.qubits))

    def __str__(self):
        return f"{self.kind}{list(self.qubits)}"


def gate(kind: str, *qubits: int) -> Gate:
    return Gate(kind, qubits)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    alphabet: str = "FULL"

    def __post_init__(self):
        if self.alphabet not in ALPHABETS:
            raise CircuitError(f"unknown alphabet {self.alphabet!r}")
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        allowed = ALPHABETS[self.alphabet]
        for g in gates:
            if g.kind not in allowed:
                raise CircuitError(f"gate {g} not allowed in alphabet {self.alphabet}")
            if max(g.qubits) > self.num_qubits:
                raise CircuitError(f"gate {g} exceeds {self.num_qubits} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def kinds(self) -> set[str]:
        return {g.kind for g in self.gates}

    def widen(self, num_qubits: int) -> "Circuit":
        """Same gates on a larger register."""
        return Circuit(num_qubits, self.gates, self.alphabet)

    def with_alphabet(self, alphabet: str) -> "Circuit":
        return Circuit(self.num_qubits, self.gates, alphabet)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "alphabet": self.alphabet,
            "gates": [{"kind": g.kind, "qubits": list(g.qubits)} for g in self.gates],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        try:
            gates = [Gate(g["kind"], tuple(g["qubits"])) for g in data["gates"]]
            return cls(int(data["num_qubits"]), tuple(gates), data.get("alphabet", "FULL"))
        except (KeyError, TypeError) as exc:
            raise CircuitError(f"malformed circuit JSON: {exc!r}") from exc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"malformed circuit JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise CircuitError("circuit JSON must be an object")
        return cls.from_dict(data)


def circuit(num_qubits: int, gates: Iterable[Gate | tuple], alphabet: str = "FULL") -> Circuit:
    """Build a circuit from ``Gate``s or ``(kind, q1, ...)`` tuples."""
    built = [g if isinstance(g, Gate) else Gate(g[0], tuple(g[1:])) for g in gates]
    return Circuit(num_qubits, tuple(built), alphabet)


def run(c: Circuit, state: StateVector) -> StateVector:
    if state.num_qubits != c.num_qubits:
        raise SimulationError(f"circuit has {c.num_qubits} qubits, input state has {state.num_qubits}")
    for g in c.gates:
        state = apply_gate(state, g)
    return state


def unitary_of(c: Circuit) -> np.ndarray:
    m = c.num_qubits
    if m > MAX_UNITARY_QUBITS:
        raise CircuitError(f"unitary_of is limited to {MAX_UNITARY_QUBITS} qubits, got {m}")
    dim = 2**m
    cols = [run(c, make_basis_state(m, format(i, f"0{m}b"))).amps for i in range(dim)]
    return np.column_stack(cols)


def unitary_phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Max entrywise deviation between ``u`` and ``lam*v`` for the best-aligned unit ``lam``."""
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    ratio = u[k] / v[k] if abs(v[k]) > 0 else 1.0
    lam = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.max(np.abs(u - lam * v)))


def equivalent(c1: Circuit, c2: Circuit, tol: float = 1e-10, *, seed: int = 0) -> bool:
    """Unitary equality up to one global phase.

    Circuits wider than ``MAX_UNITARY_QUBITS`` are compared on 20 random
    input states instead of full matrices.
    """
    if c1.num_qubits != c2.num_qubits:
        raise CircuitError(f"qubit counts differ: {c1.num_qubits} vs {c2.num_qubits}")
    if c1.num_qubits <= MAX_UNITARY_QUBITS:
        return unitary_phase_distance(unitary_of(c1), unitary_of(c2)) <= tol
    rng = np.random.default_rng(seed)
    phase = None
    for _ in range(20):
        psi = random_state(c1.num_qubits, rng)
        a, b = run(c1, psi).amps, run(c2, psi).amps
        overlap = np.vdot(b, a)
        # All inputs must share a single phase.
        lam = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        phase = lam if phase is None else phase
        if np.linalg.norm(a - phase * b) > tol:
            return False
    return True


def states_match(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    return global_phase_distance(a, b) <= tol


# -- gadget circuits ------------------------------------------------------


def controlled_s_gadget() -> Circuit:
    """Controlled-S on qubits (1, 2) with qubit 3 as a |0> ancilla.

    Conjugating S on the ancilla by H.CCZ.H flips it to X S X exactly when
    both controls are 1, which leaves |0> multiplied by i.
    """
    return circuit(3, [("H", 3), ("CCZ", 1, 2, 3), ("H", 3), ("S", 3),
                       ("H", 3), ("CCZ", 1, 2, 3), ("H", 3)], "HSCCZ")


def cz_from_ccz_gadget() -> Circuit:
    """``(CCZ then H on qubit 3)`` four times; equals CZ on (1, 2) exactly."""
    gates = []
    for _ in range(4):
        gates += [("CCZ", 1, 2, 3), ("H", 3)]
    return circuit(3, gates, "HCCZ")


def prepare_one_gadget() -> Circuit:
    """Maps |000> to |100> with H and CCZ only (qubits 2, 3 return to |0>)."""
    cz = list(cz_from_ccz_gadget().gates)
    gates = [gate("H", 1), gate("H", 2)]
    gates += cz + [gate("H", 2)]
    gates += cz + [gate("H", 2)]
    gates += cz + [gate("H", 1), gate("H", 2)]
    return Circuit(3, tuple(gates), "HCCZ")


# Both parts act on (2, 3) with qubit 1 as the |1> control that reduces CCZ to CZ.
CATALYTIC_FORMER = (("H", 3), ("CCZ", 1, 2, 3), ("H", 2), ("H", 3), ("CCZ", 1, 2, 3), ("H", 2), ("CCZ", 1, 2, 3))
CATALYTIC_SWAP = (("H", 3), ("CCZ", 1, 2, 3), ("H", 3),
                  ("H", 2), ("CCZ", 1, 2, 3), ("H", 2),
                  ("H", 3), ("CCZ", 1, 2, 3), ("H", 3))


def catalytic_s_gadget() -> Circuit:
    """S on qubit 3 using |1>|+i> on qubits (1, 2) as an unchanged catalyst.

    The first seven gates leave ``S|psi> ⊗ |+i>`` on (2, 3); the last nine
    are a SWAP built from three CZs, returning the catalyst to qubit 2.
    """
    return circuit(3, CATALYTIC_FORMER + CATALYTIC_SWAP, "HCCZ")


def catalytic_swap_part() -> Circuit:
    return circuit(3, CATALYTIC_SWAP, "HCCZ")


def catalytic_former_part() -> Circuit:
    return circuit(3, CATALYTIC_FORMER, "HCCZ")


def duplicate_plus_i_gadget() -> Circuit:
    """|1>|0>|+i> -> |1>|+i>|+i>."""
    return circuit(3, [("H", 2), ("H", 3), ("CCZ", 1, 2, 3), ("H", 3), ("CCZ", 1, 2, 3)], "HCCZ")


def embed(gadget: Circuit, slots: Sequence[int], num_qubits: int, alphabet: str | None = None) -> list[Gate]:
    """Gates of ``gadget`` with local qubit ``q`` relabelled ``slots[q-1]``."""
    if len(slots) != gadget.num_qubits or len(set(slots)) != len(slots):
        raise CircuitError(f"need {gadget.num_qubits} distinct slots, got {list(slots)}")
    if any(not 1 <= s <= num_qubits for s in slots):
        raise CircuitError(f"slots {list(slots)} outside [1, {num_qubits}]")
    return [g.remap(slots) for g in gadget.gates]


def random_circuit(
    rng: np.random.Generator,
    num_qubits: int,
    num_gates: int,
    alphabet: str = "HCCZ",
) -> Circuit:
    """Uniformly random gate sequence over ``alphabet`` (gates that fit the register)."""
    kinds = sorted(k for k in ALPHABETS[alphabet] if ARITY[k] <= num_qubits)
    gates = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        qubits = rng.choice(np.arange(1, num_qubits + 1), size=ARITY[kind], replace=False)
        gates.append(Gate(kind, tuple(int(q) for q in qubits)))
    return Circuit(num_qubits, tuple(gates), alphabet)
