"""``catalytic`` command line: verify, compile, simulate, counts.

Exit codes: 0 success, 1 failed verification checks, 2 usage error,
3 bad input (malformed JSON or alphabet violation), 4 compiled program
does not match its source, 5 simulator size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

import numpy as np

from catalytic.circuits import Circuit, CircuitError, run
from catalytic.compiler import CompileError, compile_catalytic, compile_strict, verify_program
from catalytic.counts import LABELS, CountError, count, max_under_budget
from catalytic.hypergraph import HypergraphError, build_state
from catalytic.mbqc import MeasurementPattern, PatternError, execute
from catalytic.statevec import (
    MAX_QUBITS,
    NAMED_STATES,
    QubitCapError,
    Sample,
    SimulationError,
    make_basis_state,
    product_state,
)
from catalytic.verify import SUITES, report, run_suite

SEED_ENV = "CATALYTIC_SEED"
MAX_VERIFY_QUBITS = 8
VERIFY_TOL = 1e-9

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_MISMATCH, EXIT_CAP = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON: {exc}", EXIT_INPUT) from exc
    if not isinstance(data, dict):
        raise CliError(f"{path}: expected a JSON object", EXIT_INPUT)
    return data


def _load_circuit(data: dict) -> Circuit:
    if data.get("num_qubits", 0) > MAX_QUBITS:
        raise CliError(f"circuit has {data['num_qubits']} qubits; the simulator cap is {MAX_QUBITS}", EXIT_CAP)
    try:
        return Circuit.from_dict(data)
    except CircuitError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def _parse_input_state(spec: str | None, m: int):
    """``None`` -> |0^m>; a bitstring; or comma-separated state names (zero, one, plus, ...)."""
    if spec is None:
        return make_basis_state(m, "0" * m)
    if set(spec) <= {"0", "1"}:
        return make_basis_state(m, spec)
    names = [s.strip() for s in spec.split(",")]
    unknown = [s for s in names if s not in NAMED_STATES]
    if unknown:
        raise CliError(f"unknown input state names {unknown}; use {sorted(NAMED_STATES)} or a bitstring", EXIT_INPUT)
    if len(names) != m:
        raise CliError(f"input state has {len(names)} qubits, expected {m}", EXIT_INPUT)
    return product_state(*names)


def _amplitudes(amps: np.ndarray, m: int, cutoff: float = 1e-12) -> list[dict]:
    out = []
    for i, a in enumerate(amps):
        if abs(a) > cutoff:
            out.append({"basis": format(i, f"0{m}b"), "re": float(np.round(a.real, 15)), "im": float(np.round(a.imag, 15))})
    return out


# -- subcommands --------------------------------------------------------------------


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    results = run_suite(args.suite, seed)
    rep = report(results, seed, timings=args.timings)
    if args.json:
        print(_dump(rep))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.suite:<10}  {r.name:<{width}}  dev={r.deviation:.3e}  tol={r.tolerance:.1e}  {r.seconds:.3f}s")
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed (seed {seed})")
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_compile(args) -> int:
    source = _load_circuit(_read_json(args.input))
    try:
        program = compile_strict(source) if args.mode == "strict" else compile_catalytic(source)
    except (CompileError, CircuitError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    result = program.to_dict()
    if args.verify:
        if source.num_qubits > MAX_VERIFY_QUBITS:
            raise CliError(f"--verify is limited to {MAX_VERIFY_QUBITS} logical qubits", EXIT_CAP)
        dev = verify_program(program, source)
        result["verification"] = {"deviation": dev, "tolerance": VERIFY_TOL, "passed": dev <= VERIFY_TOL}
    text = _dump(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.verify and not result["verification"]["passed"]:
        print(f"verification failed: deviation {result['verification']['deviation']:.3e}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _simulate_circuit(c: Circuit, args) -> dict:
    state = run(c, _parse_input_state(args.input_state, c.num_qubits))
    return {"kind": "circuit", "num_qubits": c.num_qubits, "amplitudes": _amplitudes(state.amps, c.num_qubits)}


def _simulate_pattern(pattern: MeasurementPattern, args, seed: int) -> dict:
    if pattern.resource is None:
        raise CliError("pattern JSON needs a 'resource' hypergraph to simulate", EXIT_INPUT)
    try:
        resource = build_state(pattern.resource.hypergraph)
    except HypergraphError as exc:
        raise CliError(str(exc), EXIT_CAP) from exc
    if args.postselect:
        policy = [int(v) for v in args.postselect.split(",")]
        shots = 1
    else:
        policy = Sample(seed)
        shots = args.shots
    runs = [execute(resource, pattern.steps, policy, pattern.resource) for _ in range(shots)]
    if shots == 1:
        r = runs[0]
        return {
            "kind": "pattern",
            "outcomes": [rec.to_dict() for rec in r.records],
            "frame": r.frame.to_dict(),
            "qubit_map": {str(k): v for k, v in r.qubit_map.items()},
            "residual": _amplitudes(r.residual.amps, r.residual.num_qubits),
            "corrected": _amplitudes(r.corrected().amps, r.residual.num_qubits),
        }
    tally = Counter("".join(map(str, r.bits)) for r in runs)
    plus = [sum(r.bits[i] == 0 for r in runs) / shots for i in range(len(pattern.steps))]
    return {
        "kind": "pattern",
        "shots": shots,
        "seed": seed,
        "outcome_counts": dict(sorted(tally.items())),
        "plus_one_frequency": plus,
    }


def cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    data = _read_json(args.input)
    try:
        if "steps" in data:
            try:
                pattern = MeasurementPattern.from_dict(data)
            except HypergraphError as exc:
                raise CliError(str(exc), EXIT_INPUT) from exc
            out = _simulate_pattern(pattern, args, seed)
        else:
            out = _simulate_circuit(_load_circuit(data), args)
    except (PatternError, CircuitError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    except QubitCapError as exc:
        raise CliError(str(exc), EXIT_CAP) from exc
    except (SimulationError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    print(_dump(out))
    return EXIT_OK


def cmd_counts(args) -> int:
    try:
        if args.budget is not None:
            out = max_under_budget(args.budget, args.formula).to_dict()
        else:
            if args.n is None or args.d is None:
                raise CliError("counts needs --n and --d, or --budget", EXIT_USAGE)
            out = {"formula": args.formula, "n": args.n, "d": args.d,
                   "qubits": count(args.formula, args.n, args.d), "label": LABELS[args.formula]}
    except CountError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    if args.json:
        print(_dump(out))
    elif "qubits" in out:
        print(f"{out['formula']}  n={out['n']}  d={out['d']}  qubits={out['qubits']} ({out['label']})")
    else:
        print(f"{out['formula']} ({out['label']}), budget {out['budget']}: "
              f"n_max={out['n_max']} (d={out['d_at_n_max']}), d_max={out['d_max']} (n={out['n_at_d_max']})")
        print("   n  max d")
        for n, d in out["frontier"]:
            print(f"{n:>4}  {d:>5}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catalytic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the identity checks")
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    v.add_argument("--json", action="store_true")
    v.add_argument("--timings", action="store_true", help="include wall times in JSON (breaks byte-identity)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compile", help="compile a circuit to a catalytic {H, CCZ} program")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--mode", choices=("catalytic", "strict"), default="catalytic")
    c.add_argument("--out")
    c.add_argument("--verify", action="store_true")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("simulate", help="simulate a circuit or measurement pattern")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--input", dest="input_state", help="bitstring or comma-separated state names")
    s.add_argument("--postselect", help="comma-separated +1/-1 per step")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--shots", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("counts", help="resource qubit counts")
    k.add_argument("--n", type=int)
    k.add_argument("--d", type=int)
    k.add_argument("--formula", choices=("rnq1", "rnq2"), default="rnq2")
    k.add_argument("--budget", type=int)
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_counts)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
