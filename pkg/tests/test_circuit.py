import json
import zlib
from itertools import product

import numpy as np
import pytest

from corpus import corpus, random_point
from msq.circuit import (Circuit, CircuitError, MeasurementSpec, case_catalog, composed_target_rule,
                         extract, gate, oracle_numeric, run_symbolic, statevector, symbol_bindings)
from msq.circuit.oracle import apply_numeric, numeric_input
from msq.circuit.symbolic import ExtractionTooLarge
from msq.expr import A, B, INV_SQRT2, Expr, compile_expr
from msq.simplify import simplify
from msq.vqa import CHEMISTRY

CORPUS = corpus()


# -- IR ---------------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [
    {"qubits": 2, "gates": [{"g": "cnot", "c": 1, "t": 1}]},
    {"qubits": 2, "gates": [{"g": "h", "t": 3}]},
    {"qubits": 2, "gates": [{"g": "t", "t": 1}]},
    {"qubits": 2, "gates": [{"g": "ry", "t": 1}]},
    {"qubits": 2, "gates": [{"g": "h", "t": 1, "p": "x"}]},
    {"qubits": 2, "input": [1, 0, 0], "gates": []},
    {"gates": []},
])
def test_invalid_circuits_rejected(bad):
    with pytest.raises(CircuitError):
        Circuit.from_json(bad)


def test_unbound_parameter_name():
    with pytest.raises(CircuitError):
        Circuit(1, [gate("ry", 1, param="t")], params=("u",))


def test_circuit_json_round_trip():
    for item in CORPUS:
        c = item.circuit
        assert Circuit.loads(c.dumps()) == c


def test_spec_json_round_trip():
    for spec in (MeasurementSpec.prob_zero(2), MeasurementSpec.amp0n(),
                 MeasurementSpec.pauli_string("XZ")):
        assert MeasurementSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_malformed_pauli():
    c = Circuit(2, [gate("h", 1)])
    for p in ("XZZ", "AB", ""):
        with pytest.raises(CircuitError):
            extract(c, MeasurementSpec.pauli_string(p))


def test_prob_zero_qubit_range():
    with pytest.raises(CircuitError):
        extract(Circuit(2, []), MeasurementSpec.prob_zero(3))


# -- symbolic simulation -------------------------------------------------------------------

def test_empty_circuit_state():
    st = run_symbolic(Circuit(2, []))
    assert st[0] == Expr.const(1)
    assert all(a.is_zero() for a in st.amplitudes[1:])


def test_hadamard_amplitudes():
    st = run_symbolic(Circuit(1, [gate("h", 1)]))
    assert st[0] == Expr.const(INV_SQRT2) and st[1] == Expr.const(INV_SQRT2)


def test_cnot_flips_target_when_control_set():
    st = run_symbolic(Circuit(2, [gate("cnot", 2, 1)], "separable"))
    assert st[0b11] == B(1) * A(2)
    assert st[0b10] == B(1) * B(2)


def test_h_rule_and_bell_rule():
    h = Circuit(2, [gate("h", 1)], "separable")
    assert simplify(extract(h, MeasurementSpec.prob_zero(1))).same_value(
        Expr.const("1/2") + A(1) * B(1))
    bell = Circuit(2, [gate("h", 1), gate("cnot", 2, 1)], "separable")
    out = simplify(extract(bell, MeasurementSpec.prob_zero(2)))
    assert str(out) == "1/2 + a1*b1*(a2^2 - b2^2)"


def test_case1_target_rule():
    case = case_catalog()[0]
    e = extract(case.stage("P1"), MeasurementSpec.prob_zero(2))
    assert simplify(e).same_value(A(1) ** 2 * A(2) ** 2 + B(1) ** 2 * B(2) ** 2)


def test_case2_composes_target_rule():
    case = next(c for c in case_catalog() if c.name == "case2")
    e = extract(case.stage("P2"), MeasurementSpec.prob_zero(2))
    assert e == composed_target_rule(1, 3, 2)


# classical model: a CNOT-only circuit permutes basis labels
def _classical_prob_zero(circuit: Circuit, qubit: int) -> Expr:
    n = circuit.n_qubits
    total = Expr()
    for bits in product((0, 1), repeat=n):
        amp = Expr.const(1)
        for q, b in enumerate(bits, start=1):
            amp = amp * (B(q) if b else A(q))
        out = list(bits)
        for g in circuit.gates:
            if all(out[c - 1] for c in g.controls):
                out[g.target - 1] ^= 1
        if out[qubit - 1] == 0:
            total = total + amp * amp
    return total


@pytest.mark.parametrize("case", [c for c in case_catalog() if c.family == "cnot"],
                         ids=lambda c: c.name)
def test_catalog_matches_classical_permutation(case):
    for stage in case.stages:
        circ = case.stage(stage)
        for q in range(1, circ.n_qubits + 1):
            assert extract(circ, MeasurementSpec.prob_zero(q)) == _classical_prob_zero(circ, q)


def test_catalog_pinned_forms():
    for case in case_catalog():
        for (stage, q), (want, text) in case.expected.items():
            got = simplify(extract(case.stage(stage), MeasurementSpec.prob_zero(q)))
            assert got.same_value(want), (case.name, stage, q)
            assert str(got) == text


def test_case6_block_has_order_three():
    case = next(c for c in case_catalog() if c.name == "case6")
    rng = np.random.default_rng(4)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    block = case.circuit.with_input(tuple(int(k == 0) for k in range(8)))
    for reps, same in ((1, False), (2, False), (3, True)):
        out = statevector(block.repeated(reps), input=v)
        assert np.allclose(out, v) is same


# -- oracle agreement and invariants --------------------------------------------------------------

def _bindings(item, theta, amps):
    return symbol_bindings(item.symbolic_circuit, theta, amps)


@pytest.mark.parametrize("item", CORPUS, ids=lambda it: it.name)
def test_symbolic_matches_oracle(item):
    e = extract(item.circuit, item.spec)
    plan = compile_expr(e)
    rng = np.random.default_rng(zlib.crc32(item.name.encode()))
    for _ in range(30):
        theta, amps = random_point(item, rng)
        want = oracle_numeric(item.circuit, item.spec, item.split_theta(theta), amps)
        got = plan.run(_bindings(item, theta, amps))
        assert abs(got - want) <= 1e-9


@pytest.mark.parametrize("item", [it for it in CORPUS if it.spec.kind != "kernel"],
                         ids=lambda it: it.name)
def test_norm_reduces_to_one(item):
    assert simplify(run_symbolic(item.circuit).norm2()) == Expr.const(1)


def test_pauli_expectations_are_real():
    for item in CORPUS:
        if item.spec.kind == "pauli":
            spec = MeasurementSpec("pauli", pauli=item.spec.pauli, complex_valued=True)
            assert extract(item.circuit, spec).imag_part().is_zero()


def test_oracle_gates_preserve_norm():
    rng = np.random.default_rng(9)
    for item in CORPUS:
        c = item.circuit.with_input("zeros")
        angles = rng.uniform(0, 2 * np.pi, c.n_params)
        psi = numeric_input(c)
        for g in c.gates:
            a = angles[c.param_index(g.param)] if g.param else None
            psi = apply_numeric(psi, c.n_qubits, g, a)
            assert abs(np.linalg.norm(psi) - 1) <= 1e-12


def test_oracle_empty_circuit():
    assert oracle_numeric(Circuit(3, []), MeasurementSpec.prob_zero(2)) == 1.0


def test_bell_against_frozen(frozen):
    bell = Circuit(2, [gate("h", 1), gate("cnot", 2, 1)], "separable")
    e = extract(bell, MeasurementSpec.prob_zero(2))
    for row in frozen["bell"]["points"]:
        b = symbol_bindings(bell, (), row["amplitudes"])
        assert e.eval(b).real == pytest.approx(row["prob_zero_2"], abs=1e-12)


def test_extraction_work_cap():
    with pytest.raises(ExtractionTooLarge):
        extract(CHEMISTRY.circuit, MeasurementSpec.prob_zero(1), max_work=1000)


def test_symbolic_qubit_cap():
    with pytest.raises(CircuitError):
        run_symbolic(Circuit(13, []))
