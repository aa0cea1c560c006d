"""Dense complex128 statevector simulator.

Deliberately shares nothing with the symbolic path except the circuit IR:
gate matrices are written out numerically here and states are numpy arrays,
so agreement between the two is a real check.
"""
from __future__ import annotations

import numpy as np

from .ir import MAX_ORACLE_QUBITS, Circuit, CircuitError, Gate

_SQ = 1 / np.sqrt(2)
_FIXED = {
    "h": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def numeric_matrix(g: Gate, angle: float | None) -> np.ndarray:
    if g.base in _FIXED:
        m = _FIXED[g.base]
    else:
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        if g.base == "rx":
            m = np.array([[c, -1j * s], [-1j * s, c]])
        elif g.base == "ry":
            m = np.array([[c, -s], [s, c]], dtype=complex)
        elif g.base == "rz":
            m = np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]])
        else:
            raise CircuitError(f"unsupported gate {g.base!r}")
    return m.conj().T if g.dagger else m


def apply_numeric(psi: np.ndarray, n: int, g: Gate, angle: float | None) -> np.ndarray:
    """Apply one (controlled) gate; ``psi`` has shape (2**n,)."""
    u = numeric_matrix(g, angle)
    t = psi.reshape((2,) * n).copy()
    index: list = [slice(None)] * n
    for q in g.controls:
        index[q - 1] = 1
    sub = t[tuple(index)]
    # axis of the target inside the sliced view
    axis = (g.target - 1) - sum(1 for q in g.controls if q < g.target)
    moved = np.moveaxis(sub, axis, 0)
    updated = np.tensordot(u, moved, axes=(1, 0))
    t[tuple(index)] = np.moveaxis(updated, 0, axis)
    return t.reshape(-1)


def numeric_input(c: Circuit, input=None) -> np.ndarray:
    """Input statevector: |0^n>, product of (a_q, b_q) pairs, or an explicit vector."""
    dim = 2 ** c.n_qubits
    if input is not None and not (isinstance(input, str)):
        arr = np.asarray(input, dtype=complex)
        if arr.ndim == 2 and arr.shape == (c.n_qubits, 2):
            out = np.array([1.0 + 0j])
            for a, b in arr:
                out = np.kron(out, np.array([a, b]))
            return out
        if arr.shape != (dim,):
            raise CircuitError(f"input vector has shape {arr.shape}, expected ({dim},)")
        return arr
    if c.input == "zeros":
        out = np.zeros(dim, dtype=complex)
        out[0] = 1
        return out
    if c.input == "separable":
        raise CircuitError("separable input needs numeric (a_q, b_q) pairs")
    return np.array([complex(v) for v in c.input])


def statevector(c: Circuit, theta=(), input=None) -> np.ndarray:
    if c.n_qubits > MAX_ORACLE_QUBITS:
        raise CircuitError(f"oracle runs are capped at {MAX_ORACLE_QUBITS} qubits")
    angles = c.angles(theta) if c.n_params else np.zeros(0)
    psi = numeric_input(c, input)
    for g in c.gates:
        angle = angles[c.param_index(g.param)] if g.param is not None else None
        psi = apply_numeric(psi, c.n_qubits, g, angle)
    return psi


def pauli_matrix_apply(psi: np.ndarray, n: int, p: str) -> np.ndarray:
    out = psi
    for q, ch in enumerate(p, start=1):
        if ch != "I":
            out = apply_numeric(out, n, Gate(ch.lower(), q), None)
    return out


def oracle_numeric(c: Circuit, spec, theta=(), input=None):
    """Numeric value of a measurement spec by dense simulation.

    ``theta`` covers ``c``'s parameters; for kernel specs pass a pair
    ``(theta_i, theta_j)`` for the circuit and its partner.
    """
    spec.validate(c)
    n = c.n_qubits
    if spec.kind == "kernel":
        theta_i, theta_j = theta
        left = statevector(c.with_input("zeros"), theta_i)
        right = statevector(spec.other.with_input("zeros"), theta_j)
        return float(abs(np.vdot(right, left)) ** 2)
    psi = statevector(c, theta, input)
    if spec.kind == "prob_zero":
        probs = np.abs(psi.reshape((2,) * n)) ** 2
        return float(np.take(probs, 0, axis=spec.qubit - 1).sum())
    if spec.kind == "amp0n":
        return complex(psi[0])
    if spec.kind == "pauli":
        value = np.vdot(psi, pauli_matrix_apply(psi, n, spec.pauli))
        return complex(value) if spec.complex_valued else float(value.real)
    raise CircuitError(f"unknown measurement kind {spec.kind!r}")


def symbol_bindings(c: Circuit, theta=(), amplitudes=None) -> dict:
    """Numeric values for the symbols the symbolic path uses on circuit ``c``."""
    from ..expr.symbols import Sym

    out: dict = {}
    if c.n_params:
        for k, angle in enumerate(c.angles(theta)):
            out[Sym("c", k)] = float(np.cos(angle / 2))
            out[Sym("s", k)] = float(np.sin(angle / 2))
    if amplitudes is not None:
        for q, (a, b) in enumerate(amplitudes, start=1):
            out[Sym("a", q)] = a
            out[Sym("b", q)] = b
    return out


def random_separable(rng: np.random.Generator, n: int) -> np.ndarray:
    """Real normalized (a_q, b_q) pairs, as the separable symbolic input assumes."""
    phi = rng.uniform(0, 2 * np.pi, size=n)
    return np.stack([np.cos(phi), np.sin(phi)], axis=1)
