"""Exact statevector simulation over polynomial amplitudes."""
from __future__ import annotations

from dataclasses import dataclass

from ..expr.coeff import INV_SQRT2, ONE, Coeff, I
from ..expr.poly import Expr, add_terms, mul_terms
from ..expr.symbols import Sym, mono_of
from .ir import MAX_SYMBOLIC_QUBITS, Circuit, CircuitError, Gate

_H = INV_SQRT2


def _const(c: Coeff) -> dict:
    return {0: c} if c else {}


def _sym(kind: str, k: int, c: Coeff = ONE) -> dict:
    return {mono_of(Sym(kind, k)): c}


def gate_matrix(g: Gate, k: int | None) -> tuple:
    """2x2 matrix of term dicts for the base gate; ``k`` is the parameter index."""
    b = g.base
    if b == "h":
        m = (_const(_H), _const(_H), _const(_H), _const(-_H))
    elif b == "x":
        m = ({}, _const(ONE), _const(ONE), {})
    elif b == "y":
        m = ({}, _const(-I), _const(I), {})
    elif b == "z":
        m = (_const(ONE), {}, {}, _const(-ONE))
    elif b == "s":
        m = (_const(ONE), {}, {}, _const(I))
    elif b == "sdg":
        m = (_const(ONE), {}, {}, _const(-I))
    elif b == "ry":
        m = (_sym("c", k), _sym("s", k, -ONE), _sym("s", k), _sym("c", k))
    elif b == "rx":
        m = (_sym("c", k), _sym("s", k, -I), _sym("s", k, -I), _sym("c", k))
    elif b == "rz":
        m = (add_terms(_sym("c", k), _sym("s", k, -I)), {}, {},
             add_terms(_sym("c", k), _sym("s", k, I)))
    else:
        raise CircuitError(f"unsupported gate {b!r}")
    if g.dagger:
        conj = [{mm: c.conj() for mm, c in t.items()} for t in m]
        m = (conj[0], conj[2], conj[1], conj[3])
    return m


def _scale(terms: dict, factor: dict) -> dict:
    if not factor or not terms:
        return {}
    if len(factor) == 1:
        (fm, fc), = factor.items()
        if fc == ONE:
            return {m + fm: c for m, c in terms.items()} if fm else terms
        return {m + fm: c * fc for m, c in terms.items()}
    return mul_terms(terms, factor)


def _combine(u: dict, a: dict, v: dict, b: dict) -> dict:
    return add_terms(_scale(a, u), _scale(b, v))


@dataclass(frozen=True)
class SymState:
    """2^n amplitudes as exact expressions, qubit 1 = most significant bit."""
    n_qubits: int
    amplitudes: tuple

    def __getitem__(self, index: int) -> Expr:
        return self.amplitudes[index]

    def norm2(self) -> Expr:
        total: dict = {}
        for a in self.amplitudes:
            total = add_terms(total, a.abs2().terms)
        return Expr(total)


def initial_amplitudes(c: Circuit) -> list:
    dim = 2 ** c.n_qubits
    if c.input == "zeros":
        amps = [{} for _ in range(dim)]
        amps[0] = _const(ONE)
        return amps
    if c.input == "separable":
        amps = []
        n = c.n_qubits
        for idx in range(dim):
            m = 0
            for q in range(1, n + 1):
                bit = (idx >> (n - q)) & 1
                m += mono_of(Sym("b" if bit else "a", q))
            amps.append({m: ONE})
        return amps
    return [_const(v) for v in c.input]


def apply_gate(amps: list, n: int, g: Gate, k: int | None) -> list:
    u00, u01, u10, u11 = gate_matrix(g, k)
    tbit = 1 << (n - g.target)
    cmask = 0
    for q in g.controls:
        cmask |= 1 << (n - q)
    out = list(amps)
    permute = not u00 and not u11 and u01 == _const(ONE) and u10 == _const(ONE)
    for i in range(len(amps)):
        if i & tbit or (i & cmask) != cmask:
            continue
        j = i | tbit
        a, b = amps[i], amps[j]
        if permute:
            out[i], out[j] = b, a
        else:
            out[i] = _combine(u00, a, u01, b)
            out[j] = _combine(u10, a, u11, b)
    return out


def run_symbolic(c: Circuit) -> SymState:
    if c.n_qubits > MAX_SYMBOLIC_QUBITS:
        raise CircuitError(f"symbolic runs are capped at {MAX_SYMBOLIC_QUBITS} qubits")
    amps = initial_amplitudes(c)
    for g in c.gates:
        k = c.param_index(g.param) if g.param is not None else None
        amps = apply_gate(amps, c.n_qubits, g, k)
    return SymState(c.n_qubits, tuple(Expr(a) for a in amps))


# -- measurement specs --------------------------------------------------------------

PAULI_BASE = {"X": "x", "Y": "y", "Z": "z"}


@dataclass(frozen=True)
class MeasurementSpec:
    kind: str                      # prob_zero | amp0n | pauli | kernel
    qubit: int | None = None
    pauli: str | None = None
    other: Circuit | None = None   # kernel partner circuit U(x_j)
    complex_valued: bool = False

    @staticmethod
    def prob_zero(qubit: int) -> "MeasurementSpec":
        return MeasurementSpec("prob_zero", qubit=qubit)

    @staticmethod
    def amp0n() -> "MeasurementSpec":
        return MeasurementSpec("amp0n", complex_valued=True)

    @staticmethod
    def pauli_string(p: str) -> "MeasurementSpec":
        return MeasurementSpec("pauli", pauli=p)

    @staticmethod
    def kernel(other: Circuit) -> "MeasurementSpec":
        return MeasurementSpec("kernel", other=other)

    def validate(self, c: Circuit) -> None:
        if self.kind == "prob_zero":
            if not isinstance(self.qubit, int) or not 1 <= self.qubit <= c.n_qubits:
                raise CircuitError(f"prob_zero qubit {self.qubit} outside [1, {c.n_qubits}]")
        elif self.kind == "pauli":
            check_pauli(self.pauli, c.n_qubits)
        elif self.kind == "kernel":
            if self.other is None or self.other.n_qubits != c.n_qubits:
                raise CircuitError("kernel entry needs a partner circuit on the same qubit count")
        elif self.kind != "amp0n":
            raise CircuitError(f"unknown measurement kind {self.kind!r}")

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.qubit is not None:
            d["qubit"] = self.qubit
        if self.pauli is not None:
            d["pauli"] = self.pauli
        if self.other is not None:
            d["other"] = self.other.to_json()
        return d

    @staticmethod
    def from_json(d: dict) -> "MeasurementSpec":
        kind = d.get("kind")
        other = Circuit.from_json(d["other"]) if "other" in d else None
        return MeasurementSpec(kind, d.get("qubit"), d.get("pauli"), other,
                               kind == "amp0n")

    @staticmethod
    def parse(text: str) -> "MeasurementSpec":
        """Short CLI form: ``prob_zero:2``, ``amp0n``, ``pauli:IZZI``."""
        head, _, arg = text.partition(":")
        head = head.strip().lower()
        if head in ("prob_zero", "probzero", "q"):
            try:
                return MeasurementSpec.prob_zero(int(arg))
            except ValueError:
                raise CircuitError(f"bad qubit in measurement {text!r}") from None
        if head == "amp0n":
            return MeasurementSpec.amp0n()
        if head == "pauli":
            return MeasurementSpec.pauli_string(arg.strip())
        raise CircuitError(f"unknown measurement {text!r}")


def check_pauli(p, n: int) -> str:
    if not isinstance(p, str) or len(p) != n or any(ch not in "IXYZ" for ch in p):
        raise CircuitError(f"malformed Pauli string {p!r} for {n} qubits")
    return p


def pauli_gates(p: str, controls: tuple = ()) -> list:
    """Gates applying the Pauli string ``p`` (character k acts on qubit k+1)."""
    return [Gate(PAULI_BASE[ch], q, controls) for q, ch in enumerate(p, start=1) if ch != "I"]


class ExtractionTooLarge(CircuitError):
    """The expanded measurement polynomial would need more term products than allowed."""


def _check_work(pairs, max_work) -> None:
    if max_work is None:
        return
    work = sum(len(a) * len(b) for a, b in pairs)
    if work > max_work:
        raise ExtractionTooLarge(f"extraction needs {work} term products (limit {max_work})")


def _prob_zero(state: SymState, qubit: int, max_work=None) -> Expr:
    n = state.n_qubits
    bit = 1 << (n - qubit)
    kept = [a for idx, a in enumerate(state.amplitudes) if not idx & bit and a.terms]
    _check_work(((a.terms, a.terms) for a in kept), max_work)
    total: dict = {}
    for a in kept:
        total = add_terms(total, mul_terms(a.terms, a.conj().terms))
    return Expr(total)


def _pauli_expectation(state: SymState, p: str, complex_valued: bool, max_work=None) -> Expr:
    amps = [a.terms for a in state.amplitudes]
    for g in pauli_gates(p):
        amps = apply_gate(amps, state.n_qubits, g, None)
    _check_work(((a.terms, b) for a, b in zip(state.amplitudes, amps)), max_work)
    total: dict = {}
    for psi, phi in zip(state.amplitudes, amps):
        if psi.terms and phi:
            total = add_terms(total, mul_terms(psi.conj().terms, phi))
    value = Expr(total)
    if complex_valued:
        return value
    if not value.imag_part().is_zero():
        raise CircuitError(f"expectation of {p} has a nonzero imaginary part")
    return value.real_part()


def kernel_circuit(c: Circuit, other: Circuit) -> Circuit:
    """U(x_j)^dagger U(x_i) as one circuit on |0^n>."""
    return c.with_input("zeros").then(other.inverse().with_input("zeros"))


def extract(source, spec: MeasurementSpec, max_work: int | None = None) -> Expr:
    """Measurement expression from a circuit (or an already-run state for non-kernel specs).

    ``max_work`` caps the number of term-by-term products spent on squaring
    amplitudes; past it :class:`ExtractionTooLarge` is raised.
    """
    if isinstance(source, SymState):
        state, circuit = source, None
        n = state.n_qubits
    else:
        circuit = source
        spec.validate(circuit)
        n = circuit.n_qubits
        state = None
    if spec.kind == "kernel":
        if circuit is None:
            raise CircuitError("kernel entries need the circuit, not a state")
        amp = run_symbolic(kernel_circuit(circuit, spec.other))[0]
        _check_work([(amp.terms, amp.terms)], max_work)
        return amp.abs2()
    if state is None:
        state = run_symbolic(circuit)
    if spec.kind == "prob_zero":
        if not isinstance(spec.qubit, int) or not 1 <= spec.qubit <= n:
            raise CircuitError(f"prob_zero qubit {spec.qubit} outside [1, {n}]")
        return _prob_zero(state, spec.qubit, max_work)
    if spec.kind == "amp0n":
        return state[0]
    if spec.kind == "pauli":
        check_pauli(spec.pauli, n)
        return _pauli_expectation(state, spec.pauli, spec.complex_valued, max_work)
    raise CircuitError(f"unknown measurement kind {spec.kind!r}")


def input_syms(c: Circuit) -> list:
    if c.input != "separable":
        return []
    return [Sym(k, q) for q in range(1, c.n_qubits + 1) for k in ("a", "b")]


def param_syms(c: Circuit) -> list:
    return [Sym(k, i) for i in range(c.n_params) for k in ("c", "s")]


__all__ = ["ExtractionTooLarge", "SymState", "MeasurementSpec", "run_symbolic", "extract", "apply_gate",
           "gate_matrix", "pauli_gates", "check_pauli", "kernel_circuit"]
