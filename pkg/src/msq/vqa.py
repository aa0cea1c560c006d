"""Circuit families and their measurement pipelines.

Families: ``qdrl``, ``linear-entangled``, ``full-entangled``, ``vqls-ry-cz`` and
``pauli-feature-map``.  Rotation parameters are named ``t0, t1, ...`` unless
explicit names are supplied; the circuit parameter table follows gate order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit.ir import Circuit, CircuitError, gate
from .circuit.oracle import pauli_matrix_apply, statevector, symbol_bindings
from .circuit.symbolic import MeasurementSpec, check_pauli, extract, pauli_gates
from .expr.poly import Expr

FAMILIES = ("qdrl", "linear-entangled", "full-entangled", "vqls-ry-cz", "pauli-feature-map")


class _Names:
    def __init__(self, names=None, prefix: str = "t"):
        self.names = list(names) if names is not None else None
        self.prefix = prefix
        self.k = 0

    def __call__(self) -> str:
        if self.names is not None:
            if self.k >= len(self.names):
                raise CircuitError(f"only {len(self.names)} parameter names supplied")
            name = self.names[self.k]
        else:
            name = f"{self.prefix}{self.k}"
        self.k += 1
        return name


def _entangler(kind: str, n: int) -> list:
    if kind == "linear":
        return [gate("cnot", q + 1, q) for q in range(1, n)]
    if kind == "full":
        return [gate("cnot", t, c) for c in range(1, n + 1) for t in range(c + 1, n + 1)]
    if kind == "ring":
        pairs = [(q, q % n + 1) for q in range(1, n + 1)] if n > 2 else [(1, 2)]
        return [gate("cnot", t, c) for c, t in pairs]
    if kind == "cz-chain":
        return [gate("cz", q + 1, q) for q in range(1, n)]
    raise CircuitError(f"unknown entangler {kind!r}")


def _layered(n: int, layers: int, rotations, entangler: str, names) -> list:
    gates: list = []
    for layer in range(layers):
        for rot in rotations:
            gates += [gate(rot, q, param=names()) for q in range(1, n + 1)]
        if layer < layers - 1 and n > 1:
            gates += _entangler(entangler, n)
    return gates


def build_ansatz(family: str, n_qubits: int, n_layers: int = 1, names=None,
                 rotations: tuple = ("ry",)) -> Circuit:
    """Circuit on ``|0^n>`` for one of the supported families.

    ``linear-entangled`` and ``full-entangled`` apply a rotation layer per
    layer with an entangler between consecutive layers, so 4 qubits with two
    Ry layers carry 8 parameters and adding Rz doubles that.  ``qdrl`` is an
    Rx, Rz initializer followed by ``n_layers`` blocks of ring CNOTs and a
    per-qubit Rz Ry Rz triple.  ``vqls-ry-cz`` alternates Ry layers with a CZ
    chain.
    """
    if family not in FAMILIES:
        raise CircuitError(f"unknown ansatz family {family!r}")
    if not isinstance(n_qubits, int) or n_qubits < 1 or n_layers < 1:
        raise CircuitError("need at least one qubit and one layer")
    for rot in rotations:
        if rot not in ("rx", "ry", "rz"):
            raise CircuitError(f"rotation {rot!r} is not rx, ry or rz")
    nm = _Names(names)
    n = n_qubits
    if family == "linear-entangled":
        gates = _layered(n, n_layers, rotations, "linear", nm)
    elif family == "full-entangled":
        gates = _layered(n, n_layers, rotations, "full", nm)
    elif family == "vqls-ry-cz":
        gates = _layered(n, n_layers, ("ry",), "cz-chain", nm)
    elif family == "qdrl":
        gates = []
        for q in range(1, n + 1):
            gates += [gate("rx", q, param=nm()), gate("rz", q, param=nm())]
        for _ in range(n_layers):
            if n > 1:
                gates += _entangler("ring", n)
            for q in range(1, n + 1):
                gates += [gate("rz", q, param=nm()), gate("ry", q, param=nm()),
                          gate("rz", q, param=nm())]
    else:
        return pauli_feature_map(n).circuit
    return Circuit(n, gates)


@dataclass(frozen=True)
class Ansatz:
    family: str
    n_qubits: int
    n_layers: int = 1
    rotations: tuple = ("ry",)

    @property
    def circuit(self) -> Circuit:
        return build_ansatz(self.family, self.n_qubits, self.n_layers, rotations=self.rotations)

    @property
    def n_params(self) -> int:
        return self.circuit.n_params

    @staticmethod
    def from_json(d: dict) -> "Ansatz":
        return Ansatz(d.get("family", "vqls-ry-cz"), int(d.get("qubits", d.get("n", 1))),
                      int(d.get("layers", 1)), tuple(d.get("rotations", ("ry",))))

    def to_json(self) -> dict:
        return {"family": self.family, "qubits": self.n_qubits, "layers": self.n_layers,
                "rotations": list(self.rotations)}


PORTFOLIO = Ansatz("linear-entangled", 4, 2)
CHEMISTRY = Ansatz("linear-entangled", 4, 2, ("ry", "rz"))
QDRL = Ansatz("qdrl", 2, 1)


# -- Hamiltonians -------------------------------------------------------------------

@dataclass(frozen=True)
class Hamiltonian:
    terms: tuple       # ((coeff, pauli), ...)

    def __post_init__(self):
        terms = tuple((float(c), str(p).upper()) for c, p in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("empty Hamiltonian")
        n = len(terms[0][1])
        for c, p in terms:
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient for {p}")
            check_pauli(p, n)

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])

    @staticmethod
    def parse(text: str) -> "Hamiltonian":
        """Lines of ``coeff PAULISTRING``; blank lines and ``#`` comments skipped."""
        terms = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'coeff PAULISTRING', got {line!r}")
            try:
                terms.append((float(parts[0]), parts[1]))
            except ValueError:
                raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        return Hamiltonian(tuple(terms))

    def dumps(self) -> str:
        return "".join(f"{c!r} {p}\n" for c, p in self.terms)

    def matrix(self) -> np.ndarray:
        n = self.n_qubits
        dim = 2 ** n
        out = np.zeros((dim, dim), dtype=complex)
        for c, p in self.terms:
            for col in range(dim):
                e = np.zeros(dim, dtype=complex)
                e[col] = 1
                out[:, col] += c * pauli_matrix_apply(e, n, p)
        return out


def transition_circuit(u: Circuit, pauli: str) -> Circuit:
    """``U`` then ``P`` then ``U^dagger`` on ``|0^n>``; Amp0n is ``<0|U^dag P U|0>``."""
    body = Circuit(u.n_qubits, pauli_gates(pauli), "zeros", u.params)
    return u.with_input("zeros").then(body).then(u.inverse().with_input("zeros"))


def hamiltonian_expectation(h: Hamiltonian, u: Circuit, route: str = "transition",
                            max_work: int | None = None) -> list:
    """Per-term ``(coeff, pauli, Expr)`` with the Expr equal to ``<0|U^dag P U|0>``.

    ``route="transition"`` reads the first amplitude of the composite circuit;
    ``route="expectation"`` sums ``conj(psi) P psi`` over the statevector.  Both
    give the same polynomial.
    """
    if h.n_qubits != u.n_qubits:
        raise CircuitError(f"Hamiltonian acts on {h.n_qubits} qubits, circuit has {u.n_qubits}")
    out = []
    for c, p in h.terms:
        if route == "transition":
            amp = extract(transition_circuit(u, p), MeasurementSpec.amp0n(), max_work)
            if not amp.imag_part().is_zero():
                raise CircuitError(f"transition amplitude of {p} is not real")
            e = amp.real_part()
        elif route == "expectation":
            e = extract(u.with_input("zeros"), MeasurementSpec.pauli_string(p), max_work)
        else:
            raise ValueError(f"unknown route {route!r}")
        out.append((c, p, e))
    return out


def energy(terms: list, bindings: dict) -> float:
    """Classical linear combination of per-term values."""
    return float(sum(c * e.eval(bindings).real for c, _, e in terms))


def dense_energy(h: Hamiltonian, u: Circuit, theta) -> float:
    psi = statevector(u.with_input("zeros"), theta)
    return float(np.vdot(psi, h.matrix() @ psi).real)


# -- Pauli feature map and kernels -------------------------------------------------

@dataclass(frozen=True)
class FeatureMap:
    """One repetition of H, Rz(x_k) and Rz((pi - x_a)(pi - x_b)) ZZ blocks.

    ``rotations`` lists, in parameter order, the feature indices each
    rotation angle depends on: ``(k,)`` for single-qubit encodings and
    ``(a, b)`` for ZZ blocks.
    """
    circuit: Circuit
    rotations: tuple
    n_features: int

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    def angles(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n_features:
            raise ValueError(f"feature map takes {self.n_features} features, got {x.size}")
        out = []
        for deps in self.rotations:
            if len(deps) == 1:
                out.append(x[deps[0]])
            else:
                a, b = deps
                out.append((math.pi - x[a]) * (math.pi - x[b]))
        return np.array(out)

    @property
    def diagonal(self) -> Circuit:
        """Everything after the leading Hadamard layer (all gates diagonal)."""
        return Circuit(self.n_qubits, self.circuit.gates[self.n_qubits:], "zeros",
                       self.circuit.params)


def pauli_feature_map(n_qubits: int, entanglement: str = "circular",
                      prefix: str = "phi") -> FeatureMap:
    if n_qubits < 2:
        raise CircuitError("the Pauli feature map needs at least 2 qubits")
    n = n_qubits
    gates = [gate("h", q) for q in range(1, n + 1)]
    rotations: list = []
    names = _Names(prefix=prefix)
    for q in range(1, n + 1):
        gates.append(gate("rz", q, param=names()))
        rotations.append((q - 1,))
    if entanglement == "circular" and n > 2:
        pairs = [(q, q % n + 1) for q in range(1, n + 1)]
    elif entanglement in ("linear", "circular"):
        pairs = [(q, q + 1) for q in range(1, n)]
    elif entanglement == "full":
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    else:
        raise CircuitError(f"unknown entanglement {entanglement!r}")
    for a, b in pairs:
        gates += [gate("cnot", b, a), gate("rz", b, param=names()), gate("cnot", b, a)]
        rotations.append((a - 1, b - 1))
    return FeatureMap(Circuit(n, gates), tuple(rotations), n)


def kernel_circuit(fm: FeatureMap) -> Circuit:
    """``U(x_j)^dagger U(x_i)`` with the diagonal parts merged.

    Between the two Hadamard layers every gate is diagonal, so the composite
    is ``H D(phi_i - phi_j) H`` and each rotation carries one angle: the
    difference of its two feature-dependent angles.
    """
    hs = [gate("h", q) for q in range(1, fm.n_qubits + 1)]
    return Circuit(fm.n_qubits, hs + list(fm.diagonal.gates) + hs, "zeros", fm.circuit.params)


_KERNEL_CACHE: dict = {}


def kernel_expr(fm: FeatureMap) -> Expr:
    """``|Amp0n|^2`` of the merged kernel circuit, in the rotation half-angle symbols."""
    key = fm.circuit.dumps()
    if key not in _KERNEL_CACHE:
        amp = extract(kernel_circuit(fm), MeasurementSpec.amp0n())
        _KERNEL_CACHE[key] = amp.abs2().real_part()
    return _KERNEL_CACHE[key]


@dataclass(frozen=True)
class KernelEntry:
    expr: Expr
    value: float
    angles: np.ndarray


def kernel_entry(fm: FeatureMap, x_i, x_j) -> KernelEntry:
    delta = fm.angles(x_i) - fm.angles(x_j)
    e = kernel_expr(fm)
    value = e.eval(symbol_bindings(kernel_circuit(fm), delta)).real
    return KernelEntry(e, float(value), delta)


def kernel_matrix(fm: FeatureMap, xs) -> np.ndarray:
    xs = [np.asarray(x, dtype=float) for x in xs]
    k = np.empty((len(xs), len(xs)))
    for i, xi in enumerate(xs):
        for j in range(i, len(xs)):
            k[i, j] = k[j, i] = kernel_entry(fm, xi, xs[j]).value
    return k


def oracle_kernel(fm: FeatureMap, x_i, x_j) -> float:
    """Dense value of ``|<0|U(x_j)^dag U(x_i)|0>|^2`` with two separate circuits."""
    left = statevector(fm.circuit, fm.angles(x_i))
    right = statevector(fm.circuit, fm.angles(x_j))
    return float(abs(np.vdot(right, left)) ** 2)


__all__ = [
    "FAMILIES", "build_ansatz", "Ansatz", "PORTFOLIO", "CHEMISTRY", "QDRL", "Hamiltonian",
    "hamiltonian_expectation", "transition_circuit", "energy", "dense_energy",
    "FeatureMap", "pauli_feature_map", "kernel_circuit", "kernel_expr", "kernel_entry",
    "kernel_matrix", "oracle_kernel",
]
