"""Adaptive Pauli-measurement patterns with Pauli-frame byproduct tracking.

Outcome bits: 0 for eigenvalue +1, 1 for eigenvalue -1. Steps are numbered
from 0 in pattern order; qubits are numbered from 1 as everywhere else.

An adapt rule ``{on: [i, j], flip: true}`` negates the measured observable
when the outcome bits of steps ``i, j`` have odd parity; the reported
eigenvalue is then that of the negated observable. A correction
``{on: [i], pauli: "Z", target: q}`` toggles Z on qubit ``q`` in the frame
when the listed outcomes have odd parity. Corrections may depend on the
step they belong to; adapt rules only on strictly earlier steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from catalytic.hypergraph import Hypergraph, SectionedResource, build_state
from catalytic.statevec import (
    EIGENVECTORS,
    SINGLE_QUBIT_MATRICES,
    MeasurementOutcome,
    PauliBasis,
    Postselect,
    Sample,
    SimulationError,
    StateVector,
    apply_matrix,
    measure_pauli,
    remove_qubit,
)


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class AdaptRule:
    on: tuple[int, ...]
    flip: bool = True


@dataclass(frozen=True)
class Correction:
    on: tuple[int, ...]
    pauli: str
    target: int

    def __post_init__(self):
        if self.pauli not in ("X", "Z"):
            raise PatternError(f"corrections are X or Z, got {self.pauli!r}")


@dataclass(frozen=True)
class MeasurementStep:
    qubit: int
    basis: PauliBasis
    adapt: tuple[AdaptRule, ...] = ()
    correct: tuple[Correction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "basis", PauliBasis(self.basis))
        object.__setattr__(self, "adapt", tuple(self.adapt))
        object.__setattr__(self, "correct", tuple(self.correct))

    def to_dict(self) -> dict:
        return {
            "qubit": self.qubit,
            "basis": self.basis.value,
            "adapt": [{"on": list(a.on), "flip": a.flip} for a in self.adapt],
            "correct": [{"on": list(c.on), "pauli": c.pauli, "target": c.target} for c in self.correct],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementStep":
        return cls(
            int(d["qubit"]),
            PauliBasis(d["basis"]),
            tuple(AdaptRule(tuple(a["on"]), bool(a.get("flip", True))) for a in d.get("adapt", [])),
            tuple(Correction(tuple(c["on"]), c["pauli"], int(c["target"])) for c in d.get("correct", [])),
        )


@dataclass(frozen=True)
class PauliFrame:
    """Pending Pauli byproducts, ``qubit -> (x_flip, z_flip)``.

    Qubits with both flips get ``Y = i X Z`` so that applying a frame twice
    is exactly the identity.
    """

    flips: Mapping[int, tuple[bool, bool]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(q): (bool(x), bool(z)) for q, (x, z) in dict(self.flips).items() if x or z}
        object.__setattr__(self, "flips", clean)

    def toggle(self, qubit: int, pauli: str) -> "PauliFrame":
        x, z = self.flips.get(qubit, (False, False))
        if pauli == "X":
            x = not x
        elif pauli == "Z":
            z = not z
        else:
            raise PatternError(f"frame entries are X or Z, got {pauli!r}")
        return PauliFrame({**self.flips, qubit: (x, z)})

    def remap(self, mapping: Mapping[int, int]) -> "PauliFrame":
        """Relabel qubits via ``mapping``; qubits absent from it are dropped."""
        return PauliFrame({mapping[q]: f for q, f in self.flips.items() if q in mapping})

    def __bool__(self):
        return bool(self.flips)

    def to_dict(self) -> dict:
        return {str(q): {"x": x, "z": z} for q, (x, z) in sorted(self.flips.items())}


def apply_frame(state: StateVector, frame: PauliFrame) -> StateVector:
    for q, (x, z) in sorted(frame.flips.items()):
        if not 1 <= q <= state.num_qubits:
            raise SimulationError(f"frame qubit {q} out of range [1, {state.num_qubits}]")
        pauli = "Y" if (x and z) else ("X" if x else "Z")
        state = apply_matrix(state, SINGLE_QUBIT_MATRICES[pauli], q)
    return state


@dataclass(frozen=True)
class MeasurementPattern:
    steps: tuple[MeasurementStep, ...]
    resource: SectionedResource | None = None

    def to_dict(self) -> dict:
        d = {"steps": [s.to_dict() for s in self.steps]}
        if self.resource is not None:
            d["resource"] = self.resource.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementPattern":
        try:
            steps = tuple(MeasurementStep.from_dict(s) for s in d["steps"])
            res = SectionedResource.from_dict(d["resource"]) if "resource" in d else None
        except (KeyError, TypeError, ValueError) as exc:
            raise PatternError(f"malformed pattern JSON: {exc!r}") from exc
        return cls(steps, res)

    @classmethod
    def from_json(cls, text: str) -> "MeasurementPattern":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise PatternError(f"malformed pattern JSON: {exc}") from exc


@dataclass(frozen=True)
class StepRecord:
    step: int
    qubit: int
    basis: PauliBasis
    flipped: bool
    outcome: MeasurementOutcome

    @property
    def bit(self) -> int:
        return self.outcome.bit

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "qubit": self.qubit,
            "basis": ("-" if self.flipped else "+") + self.basis.value,
            "eigenvalue": self.outcome.eigenvalue,
            "probability": self.outcome.probability,
        }


@dataclass(frozen=True)
class ExecutionResult:
    records: tuple[StepRecord, ...]
    residual: StateVector
    qubit_map: dict  # surviving resource qubit -> residual index
    frame: PauliFrame  # keyed by resource qubit indices

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(r.bit for r in self.records)

    @property
    def residual_frame(self) -> PauliFrame:
        return self.frame.remap(self.qubit_map)

    def corrected(self) -> StateVector:
        return apply_frame(self.residual, self.residual_frame)

    def log_lines(self) -> list[str]:
        return [json.dumps(r.to_dict(), sort_keys=True) for r in self.records]


def _parity(bits: Sequence[int], on: Sequence[int], step: int, inclusive: bool) -> int:
    limit = step + 1 if inclusive else step
    p = 0
    for i in on:
        if not 0 <= i < limit:
            kind = "correction" if inclusive else "adapt rule"
            raise PatternError(f"{kind} of step {step} references step {i}, which has not happened yet")
        p ^= bits[i]
    return p


def validate(steps: Sequence[MeasurementStep], num_qubits: int, measurable: set | None = None) -> None:
    seen = set()
    for i, s in enumerate(steps):
        if not 1 <= s.qubit <= num_qubits:
            raise PatternError(f"step {i} measures qubit {s.qubit} outside [1, {num_qubits}]")
        if s.qubit in seen:
            raise PatternError(f"step {i} re-measures qubit {s.qubit}")
        if measurable is not None and s.qubit not in measurable:
            raise PatternError(f"step {i} measures qubit {s.qubit}, which is in the output section")
        seen.add(s.qubit)
        for a in s.adapt:
            if any(not 0 <= j < i for j in a.on):
                raise PatternError(f"adapt rule of step {i} references a later step: {list(a.on)}")
        for c in s.correct:
            if any(not 0 <= j <= i for j in c.on):
                raise PatternError(f"correction of step {i} references a later step: {list(c.on)}")
            if not 1 <= c.target <= num_qubits:
                raise PatternError(f"correction of step {i} targets qubit {c.target} outside the register")


def execute(
    resource: StateVector,
    steps: Sequence[MeasurementStep],
    policy: Sample | Sequence[int],
    sections: SectionedResource | None = None,
) -> ExecutionResult:
    """Run ``steps`` on ``resource`` in order.

    ``policy`` is a ``Sample`` or a list of eigenvalues to postselect, one
    per step. Measured qubits are removed from the residual register;
    ``qubit_map`` gives where each surviving qubit ended up.
    """
    m = resource.num_qubits
    validate(steps, m, set(sections.measured) if sections is not None else None)
    if len(steps) >= m:
        raise PatternError("a pattern must leave at least one qubit unmeasured")
    if not isinstance(policy, Sample):
        policy = list(policy)
        if len(policy) != len(steps):
            raise PatternError(f"{len(policy)} postselected outcomes for {len(steps)} steps")

    state = resource
    bits: list[int] = []
    records = []
    frame = PauliFrame()
    collapsed = {}
    for i, s in enumerate(steps):
        flipped = sum(a.flip and _parity(bits, a.on, i, inclusive=False) for a in s.adapt) % 2 == 1
        step_policy = policy if isinstance(policy, Sample) else Postselect(policy[i])
        if flipped and isinstance(step_policy, Postselect):
            step_policy = Postselect(-step_policy.eigenvalue)
        raw, state = measure_pauli(state, s.qubit, s.basis, step_policy)
        eig = -raw.eigenvalue if flipped else raw.eigenvalue
        outcome = MeasurementOutcome(eig, raw.probability)
        bits.append(outcome.bit)
        records.append(StepRecord(i, s.qubit, s.basis, flipped, outcome))
        collapsed[s.qubit] = EIGENVECTORS[s.basis][0 if raw.eigenvalue == 1 else 1]
        for c in s.correct:
            if _parity(bits, c.on, i, inclusive=True):
                frame = frame.toggle(c.target, c.pauli)

    # Remove from the highest index down so earlier indices stay valid.
    for q in sorted(collapsed, reverse=True):
        state = remove_qubit(state, q, collapsed[q])
    survivors = [q for q in range(1, m + 1) if q not in collapsed]
    qubit_map = {q: i for i, q in enumerate(survivors, start=1)}
    return ExecutionResult(tuple(records), state, qubit_map, frame)


# -- canonical patterns -------------------------------------------------------


def teleportation_pattern() -> list[MeasurementStep]:
    """On ``CZ(|psi>|+>)``: X-measure qubit 1, leaving ``H|psi>`` on qubit 2 after the frame."""
    return [MeasurementStep(1, PauliBasis.X, correct=(Correction((0,), "X", 2),))]


def y_injection_pattern(ancilla: int = 2, target: int = 1) -> list[MeasurementStep]:
    """Y-measure the injection vertex; Z on the target when the outcome is -1."""
    return [MeasurementStep(ancilla, PauliBasis.Y, correct=(Correction((0,), "Z", target),))]


def y_injection_resource():
    """Two-vertex resource ``CZ|++>``: output vertex 1, injection vertex 2 in the body."""
    res = SectionedResource(Hypergraph(2, {(1, 2)}), set(), {2}, {1})
    return res, build_state(res.hypergraph)
