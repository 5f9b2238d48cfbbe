"""Dense state-vector simulation.

Qubits are numbered from 1. Qubit 1 is the most significant bit of the
basis-state index, so ``|100>`` has amplitude at index 4 for three qubits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from catalytic.circuits import Gate

MAX_QUBITS = 24
NORM_TOL = 1e-12

SQRT1_2 = 1 / np.sqrt(2)


class SimulationError(ValueError):
    """Invalid simulator input (sizes, indices, zero-probability branches)."""


class QubitCapError(SimulationError):
    """Register larger than ``MAX_QUBITS``."""


def _check_count(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise SimulationError(f"qubit count must be a positive integer, got {m!r}")
    if m > MAX_QUBITS:
        raise QubitCapError(f"qubit count {m} exceeds the cap of {MAX_QUBITS}")


class PauliBasis(str, enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


# +1 and -1 eigenvectors of each Pauli observable.
EIGENVECTORS = {
    PauliBasis.X: (np.array([SQRT1_2, SQRT1_2]), np.array([SQRT1_2, -SQRT1_2])),
    PauliBasis.Y: (np.array([SQRT1_2, 1j * SQRT1_2]), np.array([SQRT1_2, -1j * SQRT1_2])),
    PauliBasis.Z: (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
}

SINGLE_QUBIT_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2,
    "S": np.diag([1, 1j]),
    "Sdg": np.diag([1, -1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes over ``num_qubits`` qubits.

    The amplitude array is read-only; every operation returns a new state.
    """

    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        m = self.num_qubits
        _check_count(m)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (2**m,):
            raise SimulationError(f"expected {2**m} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > 1e-9:
            raise SimulationError(f"state is not normalized (norm {norm})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def _trusted(cls, num_qubits: int, amps: np.ndarray) -> "StateVector":
        # Renormalize to keep accumulated rounding below NORM_TOL.
        amps = amps / np.linalg.norm(amps)
        return cls(num_qubits, amps)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2,) * num_qubits``; axis ``q-1`` is qubit ``q``."""
        return self.amps.reshape((2,) * self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor_product(self, other: "StateVector") -> "StateVector":
        """``self ⊗ other``; ``other``'s qubits are appended after ``self``'s."""
        return StateVector(self.num_qubits + other.num_qubits, np.kron(self.amps, other.amps))

    __matmul__ = tensor_product

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits}, amps={np.array2string(self.amps, precision=4)})"


@dataclass(frozen=True)
class MeasurementOutcome:
    eigenvalue: int
    probability: float

    @property
    def bit(self) -> int:
        """0 for the +1 eigenvalue, 1 for -1."""
        return 0 if self.eigenvalue == 1 else 1


@dataclass
class Sample:
    """Sampling policy driven by a seeded generator.

    Repeated measurements with the same ``Sample`` instance draw from one
    stream, so two instances built from the same seed reproduce the same
    outcome sequence.
    """

    seed: int | None = None

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)


@dataclass(frozen=True)
class Postselect:
    eigenvalue: int

    def __post_init__(self):
        if self.eigenvalue not in (1, -1):
            raise SimulationError(f"postselected eigenvalue must be +1 or -1, got {self.eigenvalue}")


Policy = Union[Sample, Postselect]


def make_basis_state(m: int, bits: str) -> StateVector:
    _check_count(m)
    if len(bits) != m or set(bits) - {"0", "1"}:
        raise SimulationError(f"bitstring {bits!r} is not a length-{m} binary string")
    amps = np.zeros(2**m, dtype=complex)
    amps[int(bits, 2)] = 1
    return StateVector(m, amps)


NAMED_STATES = {
    "zero": (1, 0),
    "one": (0, 1),
    "plus": (SQRT1_2, SQRT1_2),
    "minus": (SQRT1_2, -SQRT1_2),
    "plus_i": (SQRT1_2, 1j * SQRT1_2),
    "minus_i": (SQRT1_2, -1j * SQRT1_2),
}


def make_named_state(name: str) -> StateVector:
    try:
        return StateVector(1, np.array(NAMED_STATES[name], dtype=complex))
    except KeyError:
        raise SimulationError(f"unknown state name {name!r}; expected one of {sorted(NAMED_STATES)}") from None


def product_state(*states: StateVector | str) -> StateVector:
    """Tensor product of states, given as ``StateVector``s or named-state strings."""
    if not states:
        raise SimulationError("product_state needs at least one factor")
    factors = [make_named_state(s) if isinstance(s, str) else s for s in states]
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out


def random_state(m: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state on ``m`` qubits."""
    _check_count(m)
    v = rng.normal(size=2**m) + 1j * rng.normal(size=2**m)
    return StateVector(m, v / np.linalg.norm(v))


def _check_qubits(m: int, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 1 <= q <= m:
            raise SimulationError(f"qubit index {q} out of range [1, {m}]")
    if len(set(qubits)) != len(qubits):
        raise SimulationError(f"repeated qubit index in {list(qubits)}")


def _all_ones_slice(m: int, qubits: Sequence[int]) -> tuple:
    idx = [slice(None)] * m
    for q in qubits:
        idx[q - 1] = 1
    return tuple(idx)


def apply_matrix(state: StateVector, matrix: np.ndarray, qubit: int) -> StateVector:
    """Apply an arbitrary 2x2 matrix to one qubit (no unitarity check)."""
    _check_qubits(state.num_qubits, [qubit])
    t = np.tensordot(matrix, state.tensor, axes=([1], [qubit - 1]))
    t = np.moveaxis(t, 0, qubit - 1)
    return StateVector._trusted(state.num_qubits, t.reshape(-1))


def apply_gate(state: StateVector, gate: "Gate") -> StateVector:
    """Return ``gate`` applied to ``state``."""
    m = state.num_qubits
    qubits = list(gate.qubits)
    _check_qubits(m, qubits)
    kind = gate.kind
    if kind in SINGLE_QUBIT_MATRICES:
        return apply_matrix(state, SINGLE_QUBIT_MATRICES[kind], qubits[0])

    t = np.array(state.tensor)
    if kind in ("CZ", "CCZ"):
        t[_all_ones_slice(m, qubits)] *= -1
    elif kind == "CS":
        t[_all_ones_slice(m, qubits)] *= 1j
    elif kind == "SWAP":
        t = np.swapaxes(t, qubits[0] - 1, qubits[1] - 1)
    else:
        raise SimulationError(f"unsupported gate kind {kind!r}")
    return StateVector._trusted(m, t.reshape(-1))


def outcome_probabilities(state: StateVector, qubit: int, basis: PauliBasis | str) -> tuple[float, float]:
    """Probabilities of the +1 and -1 outcomes."""
    branches = _project_both(state, qubit, PauliBasis(basis))
    p_plus = float(np.vdot(branches[0], branches[0]).real)
    return p_plus, max(0.0, 1.0 - p_plus)


def _project_both(state: StateVector, qubit: int, basis: PauliBasis) -> list[np.ndarray]:
    # Unnormalized projections onto the +1 / -1 eigenspaces, qubit kept in place.
    _check_qubits(state.num_qubits, [qubit])
    t = state.tensor
    out = []
    for vec in EIGENVECTORS[basis]:
        proj = np.outer(vec, vec.conj())
        p = np.moveaxis(np.tensordot(proj, t, axes=([1], [qubit - 1])), 0, qubit - 1)
        out.append(p.reshape(-1))
    return out


def _choose(p_plus: float, policy: Policy, what: str) -> int:
    if isinstance(policy, Postselect):
        p = p_plus if policy.eigenvalue == 1 else 1 - p_plus
        if p <= NORM_TOL:
            raise SimulationError(f"postselected outcome {policy.eigenvalue:+d} on {what} has probability {p:.3g}")
        return policy.eigenvalue
    if isinstance(policy, Sample):
        return 1 if policy.rng.random() < p_plus else -1
    raise SimulationError(f"unknown measurement policy {policy!r}")


def measure_pauli(
    state: StateVector, qubit: int, basis: PauliBasis | str, policy: Policy
) -> tuple[MeasurementOutcome, StateVector]:
    """Measure one qubit in a Pauli basis.

    The measured qubit stays in the register, collapsed onto the eigenvector
    of the observed outcome.
    """
    basis = PauliBasis(basis)
    plus, minus = _project_both(state, qubit, basis)
    p_plus = min(1.0, float(np.vdot(plus, plus).real))
    eig = _choose(p_plus, policy, f"qubit {qubit} ({basis.value})")
    branch = plus if eig == 1 else minus
    prob = p_plus if eig == 1 else 1 - p_plus
    return MeasurementOutcome(eig, prob), StateVector._trusted(state.num_qubits, branch)


def remove_qubit(state: StateVector, qubit: int, vec: np.ndarray) -> StateVector:
    """Contract ``qubit`` against the single-qubit state ``vec`` and drop it.

    Intended for qubits already collapsed onto ``vec``; the remainder is
    renormalized.
    """
    if state.num_qubits < 2:
        raise SimulationError("cannot remove the last qubit of a register")
    _check_qubits(state.num_qubits, [qubit])
    t = np.tensordot(np.conj(vec), state.tensor, axes=([0], [qubit - 1]))
    flat = t.reshape(-1)
    n = np.linalg.norm(flat)
    if n <= NORM_TOL:
        raise SimulationError(f"qubit {qubit} has no overlap with the given vector")
    return StateVector(state.num_qubits - 1, flat / n)


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.num_qubits != b.num_qubits:
        raise SimulationError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2``."""
    _check_same_size(a, b)
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def global_phase_distance(a: StateVector | np.ndarray, b: StateVector | np.ndarray) -> float:
    """``min over |lam|=1 of ||a - lam*b||`` with ``lam`` fixed by the largest entry of ``b``."""
    a = a.amps if isinstance(a, StateVector) else np.asarray(a)
    b = b.amps if isinstance(b, StateVector) else np.asarray(b)
    if a.shape != b.shape:
        raise SimulationError(f"shape mismatch: {a.shape} vs {b.shape}")
    k = int(np.argmax(np.abs(b)))
    if abs(b.flat[k]) == 0 or abs(a.flat[k]) == 0:
        return float(np.linalg.norm(a - b))
    ratio = a.flat[k] / b.flat[k]
    lam = ratio / abs(ratio)
    return float(np.linalg.norm(a - lam * b))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    _check_same_size(a, b)
    return global_phase_distance(a, b) <= tol


def is_real_state(state: StateVector, tol: float = 1e-9) -> bool:
    amps = state.amps
    k = int(np.argmax(np.abs(amps)))
    phase = amps[k] / abs(amps[k])
    return float(np.max(np.abs((amps / phase).imag))) <= tol


def qubit_marginal(state: StateVector, qubit: int) -> np.ndarray:
    """Reduced density matrix of one qubit."""
    _check_qubits(state.num_qubits, [qubit])
    t = np.moveaxis(state.tensor, qubit - 1, 0).reshape(2, -1)
    return t @ t.conj().T


def factor_distance(state: StateVector, qubits: Sequence[int], target: StateVector) -> float:
    """Distance of ``state`` from ``rest ⊗ target`` on ``qubits`` (in the order given).

    Zero iff the listed qubits are in product with the rest and hold
    ``target``; used for catalyst-conservation checks.
    """
    _check_qubits(state.num_qubits, qubits)
    if len(qubits) != target.num_qubits or len(qubits) >= state.num_qubits:
        raise SimulationError("factor qubits must match the target size and leave at least one qubit")
    axes = [q - 1 for q in qubits]
    rest = [i for i in range(state.num_qubits) if i not in axes]
    t = np.transpose(state.tensor, rest + axes).reshape(2 ** len(rest), -1)
    coeffs = t @ target.amps.conj()
    return float(np.linalg.norm(t - np.outer(coeffs, target.amps)))
