"""Catalytic compilation: {H, CS} -> {H, S, CCZ} -> {H, CCZ} driven by one |+i>.

Register layout of a compiled program on ``n`` logical qubits::

    1 .. n   logical qubits
    n + 1    flag, prepared to |1> once at the start
    n + 2    catalyst, supplied as |+i> and returned unchanged

The compiled circuit expects ``|0^(n+1)> ⊗ |+i>`` as input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from catalytic.circuits import (
    Circuit,
    Gate,
    catalytic_s_gadget,
    controlled_s_gadget,
    duplicate_plus_i_gadget,
    embed,
    prepare_one_gadget,
    run,
)
from catalytic.statevec import (
    StateVector,
    factor_distance,
    global_phase_distance,
    make_basis_state,
    product_state,
)

MAX_PARALLEL = 16


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class CatalyticProgram:
    inner: Circuit
    n: int
    s_gate_count: int
    # (start, stop) gate-index spans of each emitted gadget; stop is exclusive.
    gadget_spans: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    @property
    def flag_qubit(self) -> int:
        return self.n + 1

    @property
    def catalyst_qubit(self) -> int:
        return self.n + 2

    def input_state(self, logical: StateVector | None = None) -> StateVector:
        """``logical ⊗ |0> ⊗ |+i>``; ``logical`` defaults to ``|0^n>``."""
        if logical is None:
            logical = make_basis_state(self.n, "0" * self.n)
        return product_state(logical, "zero", "plus_i")

    def boundaries(self) -> list[int]:
        """Gate indices (number of gates applied) at every gadget boundary after preparation."""
        return sorted({stop for _, stop in self.gadget_spans} | {start for start, _ in self.gadget_spans[1:]})

    def to_dict(self) -> dict:
        return {
            "inner": self.inner.to_dict(),
            "n": self.n,
            "catalyst_qubit": self.catalyst_qubit,
            "flag_qubit": self.flag_qubit,
            "s_gate_count": self.s_gate_count,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "CatalyticProgram":
        return cls(Circuit.from_dict(data["inner"]), int(data["n"]), int(data["s_gate_count"]))


def lower_cs(c: Circuit) -> Circuit:
    """Replace every CS with the H/S/CCZ gadget on a shared |0> ancilla (qubit ``n+1``).

    The ancilla returns to |0>, so ``|phi>|0> -> (U|phi>)|0>``.
    """
    if c.alphabet != "HCS":
        raise CompileError(f"lower_cs expects an HCS circuit, got alphabet {c.alphabet}")
    n = c.num_qubits
    anc = n + 1
    gadget = controlled_s_gadget()
    out: list[Gate] = []
    for g in c.gates:
        if g.kind == "CS":
            out += embed(gadget, (*g.qubits, anc), anc)
        else:
            out.append(g)
    return Circuit(anc, tuple(out), "HSCCZ")


def compile_catalytic(c: Circuit) -> CatalyticProgram:
    """Eliminate S gates from an {H, S, CCZ} circuit.

    The flag qubit is turned into |1> by running the prepare-one gadget on
    qubits ``(n+1, n, n-1)`` before any logical gate, while ``n`` and ``n-1``
    still hold |0>. Each ``S`` on ``q`` becomes the catalytic gadget on
    ``(n+1, n+2, q)``.
    """
    if c.alphabet not in ("HCCZ", "HSCCZ"):
        raise CompileError(f"compile_catalytic expects an HSCCZ circuit, got alphabet {c.alphabet}")
    if c.kinds() - {"H", "S", "CCZ"}:
        raise CompileError(f"gates outside {{H, S, CCZ}}: {sorted(c.kinds() - {'H', 'S', 'CCZ'})}")
    n = c.num_qubits
    if n < 2:
        raise CompileError("compile_catalytic needs n >= 2 logical qubits")
    total = n + 2
    flag, cat = n + 1, n + 2

    gates: list[Gate] = embed(prepare_one_gadget(), (flag, n, n - 1), total)
    spans = [(0, len(gates))]
    s_count = 0
    cat_gadget = catalytic_s_gadget()
    for g in c.gates:
        if g.kind == "S":
            q = g.qubits[0]
            if q > n:
                raise CompileError(f"S on qubit {q} outside the logical register")
            start = len(gates)
            gates += embed(cat_gadget, (flag, cat, q), total)
            spans.append((start, len(gates)))
            s_count += 1
        else:
            gates.append(g)
    return CatalyticProgram(Circuit(total, tuple(gates), "HCCZ"), n, s_count, tuple(spans))


def compile_strict(c: Circuit) -> CatalyticProgram:
    """{H, CS} circuit -> catalytic {H, CCZ} program.

    The lowering ancilla becomes logical qubit ``n+1`` of the catalytic
    program, so the result has ``n + 3`` qubits and ``program.n == n + 1``.
    """
    return compile_catalytic(lower_cs(c))


def catalyst_deviations(program: CatalyticProgram, logical: StateVector | None = None) -> list[float]:
    """Distance from ``rest ⊗ |1> ⊗ |+i>`` at every gadget boundary after preparation."""
    target = product_state("one", "plus_i")
    qubits = (program.flag_qubit, program.catalyst_qubit)
    marks = set(program.boundaries())
    state = program.input_state(logical)
    out = []
    for i, g in enumerate(program.inner.gates, start=1):
        state = run(Circuit(state.num_qubits, (g,)), state)
        if i in marks:
            out.append(factor_distance(state, qubits, target))
    return out


@dataclass(frozen=True)
class DuplicationStep:
    flag: int
    zero: int
    catalyst: int

    @property
    def slots(self) -> tuple[int, int, int]:
        return (self.flag, self.zero, self.catalyst)


@dataclass(frozen=True)
class ParallelPlan:
    """Chain of duplications producing ``k`` catalysts from one.

    Step ``j`` copies the catalyst produced by step ``j-1`` into fresh
    zero-ancilla ``j``.
    """

    k: int
    flag_qubit: int
    catalyst_qubit: int
    zero_ancillas: tuple[int, ...]
    schedule: tuple[DuplicationStep, ...]

    @property
    def extra_zero_ancillas(self) -> int:
        return len(self.zero_ancillas)

    @property
    def catalysts(self) -> tuple[int, ...]:
        return (self.catalyst_qubit, *self.zero_ancillas)

    def to_circuit(self, num_qubits: int | None = None) -> Circuit:
        m = num_qubits or max(self.flag_qubit, *self.catalysts)
        gadget = duplicate_plus_i_gadget()
        gates: list[Gate] = []
        for step in self.schedule:
            gates += embed(gadget, step.slots, m)
        return Circuit(m, tuple(gates), "HCCZ")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "flag_qubit": self.flag_qubit,
            "catalyst_qubit": self.catalyst_qubit,
            "extra_zero_ancillas": self.extra_zero_ancillas,
            "duplication_schedule": [
                {"flag": s.flag, "zero": s.zero, "catalyst": s.catalyst} for s in self.schedule
            ],
        }


def plan_parallel(k: int, flag_qubit: int = 1, catalyst_qubit: int = 2, first_ancilla: int | None = None) -> ParallelPlan:
    """Plan ``k - 1`` chained duplications.

    Ancillas default to the qubits right after ``max(flag, catalyst)``.
    """
    if not 1 <= k <= MAX_PARALLEL:
        raise CompileError(f"k must be in [1, {MAX_PARALLEL}], got {k}")
    if flag_qubit == catalyst_qubit:
        raise CompileError("flag and catalyst must be different qubits")
    start = first_ancilla if first_ancilla is not None else max(flag_qubit, catalyst_qubit) + 1
    ancillas = tuple(range(start, start + k - 1))
    if {flag_qubit, catalyst_qubit} & set(ancillas):
        raise CompileError("zero ancillas overlap the flag or catalyst")
    schedule = []
    current = catalyst_qubit
    for a in ancillas:
        schedule.append(DuplicationStep(flag_qubit, a, current))
        current = a
    return ParallelPlan(k, flag_qubit, catalyst_qubit, ancillas, tuple(schedule))


def run_parallel_plan(plan: ParallelPlan) -> StateVector:
    """Simulate ``plan`` on |1> (flag), |+i> (catalyst) and |0> ancillas."""
    m = max(plan.flag_qubit, *plan.catalysts)
    labels = ["zero"] * m
    labels[plan.flag_qubit - 1] = "one"
    labels[plan.catalyst_qubit - 1] = "plus_i"
    return run(plan.to_circuit(m), product_state(*labels))


def logical_reference(c: Circuit, logical: StateVector | None = None) -> StateVector:
    """Direct simulation of ``c`` with native gates (the soundness oracle)."""
    if logical is None:
        logical = make_basis_state(c.num_qubits, "0" * c.num_qubits)
    return run(c, logical)


def expected_output(program: CatalyticProgram, logical_out: StateVector) -> StateVector:
    return product_state(logical_out, "one", "plus_i")


def verify_program(program: CatalyticProgram, source: Circuit) -> float:
    """Phase-insensitive deviation of the compiled output from the native-gate reference.

    ``source`` is the circuit that was compiled (HSCCZ, or HCS for strict
    programs); checked on ``|0^n>``.
    """
    ref = logical_reference(source)
    if ref.num_qubits < program.n:
        ref = product_state(ref, *["zero"] * (program.n - ref.num_qubits))
    out = run(program.inner, program.input_state())
    return global_phase_distance(out, expected_output(program, ref))
