import json

import numpy as np
import pytest

from catalytic.circuits import Gate
from catalytic.mbqc import (
    AdaptRule,
    Correction,
    MeasurementPattern,
    MeasurementStep,
    PatternError,
    PauliFrame,
    apply_frame,
    execute,
    teleportation_pattern,
    y_injection_pattern,
    y_injection_resource,
)
from catalytic.statevec import (
    PauliBasis,
    Sample,
    SimulationError,
    StateVector,
    apply_gate,
    equal_up_to_global_phase,
    fidelity,
    make_named_state,
    product_state,
    random_state,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def _cz_psi_plus(psi):
    return apply_gate(product_state(psi, "plus"), Gate("CZ", (1, 2)))


def _teleport_oracle(psi_amps, sign):
    # <±|_1 CZ (|psi>|+>) by direct projection, then undo X^s.
    cz = np.diag([1, 1, 1, -1]) @ np.kron(psi_amps, [1, 1]) / np.sqrt(2)
    bra = np.array([1, sign]) / np.sqrt(2)
    q2 = bra @ cz.reshape(2, 2)
    q2 = q2 / np.linalg.norm(q2)
    return q2 if sign == 1 else np.array([[0, 1], [1, 0]]) @ q2


def test_teleportation_both_branches(rng):
    for _ in range(50):
        psi = random_state(1, rng)
        expected = H @ psi.amps
        for eig in (1, -1):
            r = execute(_cz_psi_plus(psi), teleportation_pattern(), [eig])
            assert r.residual.num_qubits == 1 and r.qubit_map == {2: 1}
            oracle = StateVector(1, _teleport_oracle(psi.amps, eig))
            assert equal_up_to_global_phase(oracle, StateVector(1, expected), 1e-10)
            assert equal_up_to_global_phase(r.corrected(), StateVector(1, expected), 1e-10)


def test_teleportation_deterministic_after_correction(rng):
    psi = random_state(1, rng)
    outs = [execute(_cz_psi_plus(psi), teleportation_pattern(), [e]).corrected() for e in (1, -1)]
    assert equal_up_to_global_phase(outs[0], outs[1], 1e-10)


@pytest.mark.parametrize("eig", [1, -1])
def test_y_injection_pattern(eig):
    res, st = y_injection_resource()
    r = execute(st, y_injection_pattern(), [eig], res)
    assert r.bits == ((1 - eig) // 2,)
    assert bool(r.frame) == (eig == -1)
    assert fidelity(r.corrected(), make_named_state("plus_i")) >= 1 - 1e-10


def test_y_injection_frequency():
    res, st = y_injection_resource()
    policy = Sample(2024)
    shots = 10_000
    plus = sum(execute(st, y_injection_pattern(), policy, res).bits[0] == 0 for _ in range(shots))
    assert abs(plus / shots - 0.5) <= 0.02


def test_empty_pattern():
    s = product_state("plus", "one")
    r = execute(s, [], [])
    np.testing.assert_array_equal(r.residual.amps, s.amps)
    assert not r.frame and r.qubit_map == {1: 1, 2: 2}


def test_adaptive_flip():
    # Measure qubit 1 of |1>|0> in Z (outcome -1), then qubit 2 in Z flipped by step 0:
    # -Z on |0> gives eigenvalue -1.
    s = product_state("one", "zero", "plus")
    steps = [
        MeasurementStep(1, PauliBasis.Z),
        MeasurementStep(2, PauliBasis.Z, adapt=(AdaptRule((0,)),)),
    ]
    r = execute(s, steps, Sample(0))
    assert r.bits == (1, 1)
    assert r.records[1].flipped and r.records[1].to_dict()["basis"] == "-Z"


def test_adaptive_postselect_refers_to_flipped_observable():
    s = product_state("one", "zero", "plus")
    steps = [MeasurementStep(1, "Z"), MeasurementStep(2, "Z", adapt=(AdaptRule((0,)),))]
    r = execute(s, steps, [-1, -1])
    assert r.bits == (1, 1)
    with pytest.raises(SimulationError):
        execute(s, steps, [-1, 1])


def test_pattern_validation():
    s = product_state("plus", "plus", "plus")
    with pytest.raises(PatternError):
        execute(s, [MeasurementStep(1, "X"), MeasurementStep(1, "Z")], Sample(0))
    with pytest.raises(PatternError):
        execute(s, [MeasurementStep(1, "X", adapt=(AdaptRule((0,)),))], Sample(0))
    with pytest.raises(PatternError):
        execute(s, [MeasurementStep(1, "X", correct=(Correction((1,), "Z", 2),))], Sample(0))
    with pytest.raises(PatternError):
        execute(s, [MeasurementStep(4, "X")], Sample(0))
    res, st = y_injection_resource()
    with pytest.raises(PatternError):
        execute(st, [MeasurementStep(1, "X")], Sample(0), res)  # output vertex
    with pytest.raises(SimulationError):
        execute(product_state("zero", "plus"), [MeasurementStep(1, "Z")], [-1])


def test_apply_frame_examples(rng):
    s = random_state(2, rng)
    np.testing.assert_array_equal(apply_frame(s, PauliFrame()).amps, s.amps)
    out = apply_frame(make_named_state("plus_i"), PauliFrame({1: (False, True)}))
    np.testing.assert_allclose(out.amps, make_named_state("minus_i").amps, atol=1e-15)
    with pytest.raises(SimulationError):
        apply_frame(s, PauliFrame({3: (True, False)}))


@pytest.mark.parametrize("flips", [{1: (True, False)}, {2: (False, True)}, {1: (True, True), 2: (True, False)}])
def test_frame_involution(rng, flips):
    for _ in range(20):
        s = random_state(2, rng)
        twice = apply_frame(apply_frame(s, PauliFrame(flips)), PauliFrame(flips))
        np.testing.assert_allclose(twice.amps, s.amps, atol=1e-12)


def test_frame_toggle_and_remap():
    f = PauliFrame().toggle(3, "X").toggle(3, "Z").toggle(1, "Z").toggle(1, "Z")
    assert f.flips == {3: (True, True)}
    assert f.remap({3: 1}).flips == {1: (True, True)}
    assert f.remap({2: 1}).flips == {}


def test_reindexing_commutes_with_frame(rng):
    # Remove-then-frame equals frame-on-survivors-then-remove.
    s = apply_gate(product_state(random_state(1, rng), "plus", "plus"), Gate("CZ", (1, 2)))
    s = apply_gate(s, Gate("CZ", (2, 3)))
    steps = [MeasurementStep(2, "X", correct=(Correction((0,), "Z", 1), Correction((0,), "X", 3)))]
    r = execute(s, steps, [-1])
    path_a = r.corrected()
    framed = apply_frame(s, r.frame)
    r2 = execute(framed, steps, [-1])
    path_b = r2.residual
    assert equal_up_to_global_phase(path_a, path_b, 1e-10)


def test_pattern_json_round_trip():
    res, _ = y_injection_resource()
    pat = MeasurementPattern(tuple(y_injection_pattern()), res)
    data = json.loads(json.dumps(pat.to_dict()))
    assert data["steps"] == [{"qubit": 2, "basis": "Y", "adapt": [], "correct": [{"on": [0], "pauli": "Z", "target": 1}]}]
    assert MeasurementPattern.from_dict(data) == pat
    with pytest.raises(PatternError):
        MeasurementPattern.from_json('{"steps": [{"basis": "Y"}]}')


def test_outcome_log_lines():
    res, st = y_injection_resource()
    r = execute(st, y_injection_pattern(), [1], res)
    (line,) = r.log_lines()
    assert json.loads(line)["eigenvalue"] == 1
