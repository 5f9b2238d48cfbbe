"""Named verification checks for every gadget identity, grouped into suites."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from catalytic import __version__
from catalytic.circuits import (
    catalytic_s_gadget,
    catalytic_swap_part,
    circuit,
    controlled_s_gadget,
    cz_from_ccz_gadget,
    duplicate_plus_i_gadget,
    prepare_one_gadget,
    random_circuit,
    run,
    unitary_of,
)
from catalytic.compiler import (
    catalyst_deviations,
    compile_catalytic,
    compile_strict,
    plan_parallel,
    run_parallel_plan,
    verify_program,
)
from catalytic.counts import ResourceParams, max_under_budget, qubits_rnq1, qubits_rnq2
from catalytic.hypergraph import Hypergraph, build_state, transformed_demo_resource, y_inject
from catalytic.mbqc import execute, y_injection_pattern, y_injection_resource
from catalytic.statevec import (
    EIGENVECTORS,
    SINGLE_QUBIT_MATRICES,
    PauliBasis,
    Sample,
    StateVector,
    fidelity,
    global_phase_distance,
    is_real_state,
    make_basis_state,
    make_named_state,
    product_state,
    qubit_marginal,
    random_state,
    remove_qubit,
)

SUITES = ("appendixA", "appendixB", "appendixC", "hypergraph", "compiler", "counts")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    deviation: float
    tolerance: float
    seconds: float

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "suite": self.suite,
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "deviation": self.deviation,
            "tolerance": self.tolerance,
        }
        if timings:
            d["seconds"] = round(self.seconds, 6)
        return d


# Each check takes an RNG and returns (deviation, tolerance); it passes iff deviation <= tolerance.
Check = Callable[[np.random.Generator], tuple[float, float]]
REGISTRY: dict[str, list[tuple[str, Check]]] = {s: [] for s in SUITES}


def check(suite: str, name: str):
    def deco(fn: Check) -> Check:
        REGISTRY[suite].append((name, fn))
        return fn

    return deco


def _s(psi: StateVector) -> StateVector:
    return StateVector(1, SINGLE_QUBIT_MATRICES["S"] @ psi.amps)


def _cs_oracle(state: StateVector) -> StateVector:
    # Native controlled-S on qubits 1, 2 of a 3-qubit register.
    amps = np.array(state.amps)
    amps[0b110] *= 1j
    amps[0b111] *= 1j
    return StateVector(3, amps)


# -- Appendix A -----------------------------------------------------------------


@check("appendixA", "controlled-S gadget |jk>|0> -> (CS|jk>)|0>, phase i iff j=k=1")
def _appendix_a(rng):
    dev = 0.0
    for bits in ("000", "010", "100", "110"):
        s = make_basis_state(3, bits)
        out = run(controlled_s_gadget(), s)
        dev = max(dev, float(np.linalg.norm(out.amps - _cs_oracle(s).amps)))
    return dev, 1e-10


# -- Appendix B -----------------------------------------------------------------


@check("appendixB", "[(I⊗I⊗H)CCZ]^4 = Λ(Z)⊗I")
def _cz_identity(rng):
    expected = np.diag([1, 1, 1, 1, 1, 1, -1, -1]).astype(complex)
    return float(np.max(np.abs(unitary_of(cz_from_ccz_gadget()) - expected))), 1e-12


@check("appendixB", "|000> -> |100>")
def _prepare_one(rng):
    out = run(prepare_one_gadget(), make_basis_state(3, "000"))
    return 1 - fidelity(out, make_basis_state(3, "100")), 1e-12


@check("appendixB", "prepare-one leaves qubits 2,3 in |0> (population of 1)")
def _prepare_one_residual(rng):
    out = run(prepare_one_gadget(), make_basis_state(3, "000"))
    p1 = sum(float(qubit_marginal(out, q)[1, 1].real) for q in (2, 3))
    return p1, 1e-20


@check("appendixB", "|1>|+i>|psi> -> |1>|+i>(S|psi>), 100 random |psi>")
def _catalytic_s(rng):
    dev = 0.0
    for _ in range(100):
        psi = random_state(1, rng)
        out = run(catalytic_s_gadget(), product_state("one", "plus_i", psi))
        dev = max(dev, global_phase_distance(out, product_state("one", "plus_i", _s(psi))))
    return dev, 1e-10


@check("appendixB", "three-CZ latter part = SWAP on the |1>-control subspace")
def _swap_part(rng):
    u = unitary_of(catalytic_swap_part())[4:, 4:]
    swap = np.eye(4)[:, [0, 2, 1, 3]]
    return float(np.max(np.abs(u - swap))), 1e-12


# -- Appendix C -----------------------------------------------------------------


@check("appendixC", "|1>|0>|+i> -> |1>|+i>|+i>")
def _duplicate(rng):
    out = run(duplicate_plus_i_gadget(), product_state("one", "zero", "plus_i"))
    return float(np.max(np.abs(out.amps - product_state("one", "plus_i", "plus_i").amps))), 1e-12


@check("appendixC", "chained duplication gives k=4 catalysts, each |+i>")
def _chain(rng):
    plan = plan_parallel(4)
    out = run_parallel_plan(plan)
    target = np.outer(EIGENVECTORS[PauliBasis.Y][0], EIGENVECTORS[PauliBasis.Y][0].conj())
    dev = 0.0
    for q in plan.catalysts:
        dev = max(dev, 1 - float(np.real(np.trace(qubit_marginal(out, q) @ target))))
    return dev, 1e-10


# -- Fig. 4(b) gadget and real states --------------------------------------------------


@check("hypergraph", "Y-injection on CZ|++>, outcome +1 -> |+i>")
def _inject_plus(rng):
    res, st = y_injection_resource()
    r = execute(st, y_injection_pattern(), [1], res)
    return 1 - fidelity(r.corrected(), make_named_state("plus_i")), 1e-10


@check("hypergraph", "Y-injection on CZ|++>, outcome -1 + Z correction -> |+i>")
def _inject_minus(rng):
    res, st = y_injection_resource()
    r = execute(st, y_injection_pattern(), [-1], res)
    return 1 - fidelity(r.corrected(), make_named_state("plus_i")), 1e-10


@check("hypergraph", "Y-injection +1 frequency over 10^4 shots")
def _inject_frequency(rng):
    res, st = y_injection_resource()
    policy = Sample(int(rng.integers(2**63)))
    hits = sum(execute(st, y_injection_pattern(), policy, res).bits[0] == 0 for _ in range(10_000))
    return abs(hits / 10_000 - 0.5), 0.02


@check("hypergraph", "demo resource: injected |+i> drives a compiled S")
def _demo_resource(rng):
    sections, st = transformed_demo_resource()
    inj = y_inject(st, 4, 3, Sample(int(rng.integers(2**63))))
    corrected = inj.corrected(3)
    ancilla_vec = EIGENVECTORS[PauliBasis.Y][inj.outcome.bit]
    three = remove_qubit(corrected, 4, ancilla_vec)
    # Qubits 1, 2 are untouched |+>; project them out to recover qubit 3.
    plus = EIGENVECTORS[PauliBasis.X][0]
    catalyst = remove_qubit(remove_qubit(three, 1, plus), 1, plus)
    source = circuit(2, [("H", 1), ("S", 1)], "HSCCZ")
    prog = compile_catalytic(source)
    inp = product_state(make_basis_state(3, "000"), catalyst)
    out = run(prog.inner, inp)
    expected = product_state("plus_i", "zero", "one", "plus_i")
    return global_phase_distance(out, expected), 1e-10


@check("hypergraph", "hypergraph states are real with |amp| = 2^(-m/2)")
def _hypergraph_real(rng):
    dev = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 7))
        pairs = [(a, b) for a in range(1, m + 1) for b in range(a + 1, m + 1)]
        triples = [(a, b, c) for a in range(1, m + 1) for b in range(a + 1, m + 1) for c in range(b + 1, m + 1)]
        e2 = [p for p in pairs if rng.random() < 0.5]
        e3 = [t for t in triples if rng.random() < 0.5]
        st = build_state(Hypergraph(m, e2, e3))
        if not is_real_state(st, 1e-12):
            return float("inf"), 1e-12
        dev = max(dev, float(np.max(np.abs(np.abs(st.amps) - 2 ** (-m / 2)))))
    return dev, 1e-12


@check("hypergraph", "{H,CCZ} outputs are real (200 circuits, n in 2..4)")
def _realness(rng):
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 5))
        c = random_circuit(rng, n, int(rng.integers(0, 41)), "HCCZ")
        out = run(c, make_basis_state(n, "0" * n))
        k = int(np.argmax(np.abs(out.amps)))
        worst = max(worst, float(np.max(np.abs((out.amps * np.conj(out.amps[k]) / abs(out.amps[k])).imag))))
    return worst, 1e-9


@check("hypergraph", "fidelity with (|0^n>+i|1^n>)/sqrt2 <= 1/2 (200 circuits)")
def _fidelity_bound(rng):
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 5))
        c = random_circuit(rng, n, int(rng.integers(0, 41)), "HCCZ")
        out = run(c, make_basis_state(n, "0" * n))
        amps = np.zeros(2**n, dtype=complex)
        amps[0], amps[-1] = 2**-0.5, 1j * 2**-0.5
        worst = max(worst, fidelity(out, StateVector(n, amps)))
    return max(0.0, worst - 0.5), 1e-12


# -- compiler -----------------------------------------------------------------------------


def random_hsccz(rng: np.random.Generator):
    n = int(rng.integers(2, 5))
    while True:
        c = random_circuit(rng, n, int(rng.integers(1, 26)), "HSCCZ")
        if c.count("S"):
            return c


@check("compiler", "catalytic compilation matches native S (50 circuits)")
def _soundness(rng):
    dev = 0.0
    for _ in range(50):
        c = random_hsccz(rng)
        prog = compile_catalytic(c)
        if prog.inner.kinds() - {"H", "CCZ"} or prog.inner.num_qubits != c.num_qubits + 2:
            return float("inf"), 1e-9
        dev = max(dev, verify_program(prog, c))
    return dev, 1e-9


@check("compiler", "flag and catalyst stay |1>|+i> at every gadget boundary")
def _conservation(rng):
    dev = 0.0
    for _ in range(10):
        prog = compile_catalytic(random_hsccz(rng))
        dev = max(dev, *catalyst_deviations(prog))
    return dev, 1e-10


@check("compiler", "strict {H,CS} pipeline matches native CS (20 circuits)")
def _strict(rng):
    dev = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 4))
        c = random_circuit(rng, n, int(rng.integers(1, 16)), "HCS")
        prog = compile_strict(c)
        if prog.inner.kinds() - {"H", "CCZ"}:
            return float("inf"), 1e-9
        dev = max(dev, verify_program(prog, c))
    return dev, 1e-9


# -- Appendix D ---------------------------------------------------------------------------


@check("counts", "rnq1(n=6, d=5) = 7495")
def _rnq1(rng):
    return float(abs(qubits_rnq1(ResourceParams(6, 5)) - 7495)), 0.0


@check("counts", "rnq2(n=6, d=5) = 607")
def _rnq2(rng):
    return float(abs(qubits_rnq2(ResourceParams(6, 5)) - 607)), 0.0


@check("counts", "1121-qubit budget (rnq2): n_max = 26, d_max = 28")
def _budget(rng):
    r = max_under_budget(1121, "rnq2")
    return float(abs(r.n_max - 26) + abs(r.d_max - 28)), 0.0


def run_suite(suite: str = "all", seed: int = 0) -> list[CheckResult]:
    """Run one suite (or all) with a fresh generator per check, so results do not depend on selection."""
    if suite != "all" and suite not in REGISTRY:
        raise KeyError(f"unknown suite {suite!r}")
    names = SUITES if suite == "all" else (suite,)
    results = []
    for s in names:
        for i, (name, fn) in enumerate(REGISTRY[s]):
            rng = np.random.default_rng([seed, SUITES.index(s), i])
            t0 = time.perf_counter()
            dev, tol = fn(rng)
            results.append(CheckResult(s, name, bool(dev <= tol), float(dev), float(tol), time.perf_counter() - t0))
    return results


def report(results: list[CheckResult], seed: int, timings: bool = False) -> dict:
    return {
        "environment": {"seed": seed, "version": __version__, "precision": "complex128"},
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict(timings) for r in results],
    }
