import json

import numpy as np
import pytest

from catalytic.circuits import Circuit, circuit, random_circuit, run
from catalytic.compiler import (
    CatalyticProgram,
    CompileError,
    catalyst_deviations,
    compile_catalytic,
    compile_strict,
    lower_cs,
    plan_parallel,
    run_parallel_plan,
    verify_program,
)
from catalytic.statevec import (
    StateVector,
    equal_up_to_global_phase,
    global_phase_distance,
    Postselect,
    make_basis_state,
    measure_pauli,
    product_state,
    random_state,
)

CS = np.diag([1, 1, 1, 1j])
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def native_hcs(c, state):
    # Oracle with its own CS and H matrices, independent of apply_gate.
    n = c.num_qubits
    t = state.reshape((2,) * n)
    for g in c.gates:
        if g.kind == "H":
            t = np.moveaxis(np.tensordot(H, t, axes=([1], [g.qubits[0] - 1])), 0, g.qubits[0] - 1)
        else:
            a, b = g.qubits
            t = np.array(t)
            idx = [slice(None)] * n
            idx[a - 1] = idx[b - 1] = 1
            t[tuple(idx)] *= 1j
    return t.reshape(-1)


def test_lower_cs_single_gate():
    low = lower_cs(circuit(2, [("CS", 1, 2)], "HCS"))
    assert low.num_qubits == 3 and low.alphabet == "HSCCZ"
    for bits in ("00", "01", "10", "11"):
        out = run(low, make_basis_state(3, bits + "0"))
        expected = np.kron(CS @ make_basis_state(2, bits).amps, [1, 0])
        np.testing.assert_allclose(out.amps, expected, atol=1e-12)


def test_lower_cs_passthrough():
    low = lower_cs(circuit(2, [("H", 1)], "HCS"))
    assert low == circuit(3, [("H", 1)], "HSCCZ")


def test_lower_cs_random(rng):
    for _ in range(10):
        c = random_circuit(rng, 3, 10, "HCS")
        out = run(lower_cs(c), make_basis_state(4, "0000"))
        expected = np.kron(native_hcs(c, make_basis_state(3, "000").amps), [1, 0])
        assert global_phase_distance(out.amps, expected) < 1e-9


def test_lower_cs_wrong_alphabet():
    with pytest.raises(CompileError):
        lower_cs(circuit(2, [("H", 1)], "HSCCZ"))


def test_compile_h_s():
    prog = compile_catalytic(circuit(2, [("H", 1), ("S", 1)], "HSCCZ"))
    assert prog.inner.num_qubits == 4 and prog.s_gate_count == 1
    out = run(prog.inner, prog.input_state())
    assert equal_up_to_global_phase(out, product_state("plus_i", "zero", "one", "plus_i"), 1e-10)


def test_compile_empty_runs_only_preparation():
    prog = compile_catalytic(Circuit(3, (), "HSCCZ"))
    out = run(prog.inner, prog.input_state())
    np.testing.assert_allclose(out.amps, product_state("zero", "zero", "zero", "one", "plus_i").amps, atol=1e-12)
    assert len(prog.inner) == 30


def test_compile_reuses_catalyst():
    prog = compile_catalytic(circuit(2, [("S", 1), ("S", 1)], "HSCCZ"))
    assert prog.s_gate_count == 2 and prog.inner.num_qubits == 4
    out = run(prog.inner, prog.input_state())
    assert equal_up_to_global_phase(out, product_state("zero", "zero", "one", "plus_i"), 1e-10)


def test_compile_s_on_superposition():
    # S^2 = Z acting on |+> gives |->; checks more than a trivially invariant |0>.
    prog = compile_catalytic(circuit(2, [("H", 1), ("S", 1), ("S", 1)], "HSCCZ"))
    out = run(prog.inner, prog.input_state())
    assert equal_up_to_global_phase(out, product_state("minus", "zero", "one", "plus_i"), 1e-10)


def test_compile_errors():
    with pytest.raises(CompileError):
        compile_catalytic(circuit(1, [("S", 1)], "HSCCZ"))
    with pytest.raises(CompileError):
        compile_catalytic(circuit(2, [("CS", 1, 2)], "HCS"))
    with pytest.raises(CompileError):
        compile_catalytic(circuit(2, [("T", 1)], "FULL"))


def test_size_law(rng):
    for s_gates in (0, 1, 5, 20):
        c = circuit(3, [("S", 1 + i % 3) for i in range(s_gates)], "HSCCZ")
        prog = compile_catalytic(c)
        assert prog.inner.num_qubits == 5
        assert prog.s_gate_count == s_gates
        assert prog.flag_qubit == 4 and prog.catalyst_qubit == 5


def test_soundness_random(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        c = random_circuit(rng, n, int(rng.integers(1, 26)), "HSCCZ")
        prog = compile_catalytic(c)
        assert prog.inner.kinds() <= {"H", "CCZ"}
        assert verify_program(prog, c) < 1e-9


def test_soundness_on_nonzero_logical_input(rng):
    # Works for any logical input as long as qubits n-1, n start in |0>.
    c = random_circuit(rng, 3, 15, "HSCCZ")
    prog = compile_catalytic(c)
    logical = product_state(random_state(1, rng), "zero", "zero")
    out = run(prog.inner, prog.input_state(logical))
    expected = product_state(run(c, logical), "one", "plus_i")
    assert global_phase_distance(out, expected) < 1e-9


def test_catalyst_conserved_at_boundaries(rng):
    c = circuit(3, [("H", 1), ("S", 1), ("CCZ", 1, 2, 3), ("H", 3), ("S", 3), ("S", 2)], "HSCCZ")
    prog = compile_catalytic(c)
    devs = catalyst_deviations(prog)
    # End of preparation, then start and end of each S gadget; the last two gadgets are adjacent.
    assert prog.boundaries() == [30, 31, 47, 49, 65, 81]
    assert len(devs) == 6
    assert max(devs) < 1e-10


def test_strict_examples():
    prog = compile_strict(circuit(2, [("CS", 1, 2)], "HCS"))
    out = run(prog.inner, prog.input_state())
    assert equal_up_to_global_phase(out, product_state("zero", "zero", "zero", "one", "plus_i"), 1e-10)

    c = circuit(2, [("H", 1), ("H", 2), ("CS", 1, 2)], "HCS")
    prog = compile_strict(c)
    assert prog.inner.kinds() <= {"H", "CCZ"}
    logical = StateVector(2, np.array([1, 1, 1, 1j]) / 2)
    out = run(prog.inner, prog.input_state())
    assert equal_up_to_global_phase(out, product_state(logical, "zero", "one", "plus_i"), 1e-10)


def test_strict_random(rng):
    for _ in range(10):
        c = random_circuit(rng, int(rng.integers(2, 4)), 12, "HCS")
        prog = compile_strict(c)
        ref = np.kron(native_hcs(c, make_basis_state(c.num_qubits, "0" * c.num_qubits).amps), [1, 0])
        expected = product_state(StateVector(c.num_qubits + 1, ref), "one", "plus_i")
        assert global_phase_distance(run(prog.inner, prog.input_state()), expected) < 1e-9


def test_program_json():
    prog = compile_catalytic(circuit(2, [("S", 2)], "HSCCZ"))
    data = json.loads(prog.to_json())
    assert set(data) == {"inner", "n", "catalyst_qubit", "flag_qubit", "s_gate_count"}
    assert data["catalyst_qubit"] == 4 and data["flag_qubit"] == 3
    again = CatalyticProgram.from_dict(data)
    assert again.inner == prog.inner and again.s_gate_count == 1


# -- parallel catalysts --------------------------------------------------------------


def test_plan_sizes():
    assert plan_parallel(1).schedule == ()
    p2 = plan_parallel(2)
    assert p2.extra_zero_ancillas == 1 and len(p2.schedule) == 1
    for k in range(1, 17):
        p = plan_parallel(k)
        assert p.extra_zero_ancillas == k - 1 == len(p.schedule)
    for bad in (0, 17):
        with pytest.raises(CompileError):
            plan_parallel(bad)


def test_plan_is_a_chain():
    p = plan_parallel(4)
    for prev, step in zip(p.schedule, p.schedule[1:]):
        assert step.catalyst == prev.zero
    assert p.schedule[0].catalyst == p.catalyst_qubit


@pytest.mark.parametrize("k", [2, 3, 4])
def test_plan_produces_catalysts(k):
    p = plan_parallel(k)
    state = run_parallel_plan(p)
    for q in p.catalysts:
        outcome, state = measure_pauli(state, q, "Y", Postselect(1))
        assert outcome.probability == pytest.approx(1, abs=1e-10)


def test_plan_custom_layout():
    p = plan_parallel(3, flag_qubit=3, catalyst_qubit=1, first_ancilla=4)
    assert p.catalysts == (1, 4, 5)
    state = run_parallel_plan(p)
    assert equal_up_to_global_phase(state, product_state("plus_i", "zero", "one", "plus_i", "plus_i"), 1e-10)
