"""Circuit IR.

Qubits are labelled 1..n and qubit 1 is the most significant bit of the
basis index.  Every gate is a single-qubit base operation on ``target`` with
zero or more ``controls``; CNOT is a controlled X, CZ a controlled Z, and so
on.  Rotation angles are named parameters; parameter ``k`` in the table is
represented symbolically by the half-angle pair ``C(k)``, ``S(k)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..expr.coeff import Coeff

MAX_SYMBOLIC_QUBITS = 12
MAX_ORACLE_QUBITS = 24

BASE_GATES = {"h", "x", "y", "z", "s", "sdg", "rx", "ry", "rz"}
ROTATIONS = {"rx", "ry", "rz"}
SELF_INVERSE = {"h", "x", "y", "z"}

# alias -> (base gate, number of controls)
GATE_ALIASES = {
    "cnot": ("x", 1), "cx": ("x", 1), "cy": ("y", 1), "cz": ("z", 1),
    "ch": ("h", 1), "crx": ("rx", 1), "cry": ("ry", 1), "crz": ("rz", 1),
    "ccx": ("x", 2), "toffoli": ("x", 2), "ccz": ("z", 2),
}
_CANONICAL_NAME = {("x", 1): "cnot", ("y", 1): "cy", ("z", 1): "cz", ("h", 1): "ch",
                   ("rx", 1): "crx", ("ry", 1): "cry", ("rz", 1): "crz",
                   ("x", 2): "ccx", ("z", 2): "ccz"}


class CircuitError(ValueError):
    """Invalid circuit: bad qubit label, unknown gate, unbound parameter."""


@dataclass(frozen=True)
class Gate:
    base: str
    target: int
    controls: tuple = ()
    param: str | None = None
    dagger: bool = False

    @property
    def qubits(self) -> tuple:
        return (*self.controls, self.target)

    def adjoint(self) -> "Gate":
        if self.base in SELF_INVERSE:
            return self
        if self.base == "s":
            return replace(self, base="sdg")
        if self.base == "sdg":
            return replace(self, base="s")
        return replace(self, dagger=not self.dagger)

    def to_json(self) -> dict:
        name = self.base if not self.controls else _CANONICAL_NAME[(self.base, len(self.controls))]
        d: dict = {"g": name, "t": self.target}
        if self.controls:
            d["c"] = self.controls[0] if len(self.controls) == 1 else list(self.controls)
        if self.param is not None:
            d["p"] = self.param
        if self.dagger:
            d["dagger"] = True
        return d

    @staticmethod
    def from_json(d: dict) -> "Gate":
        try:
            name = str(d["g"]).lower()
            target = int(d["t"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CircuitError(f"gate {d!r} needs 'g' and integer 't'") from exc
        ctrl = d.get("c", [])
        controls = tuple(int(c) for c in (ctrl if isinstance(ctrl, list) else [ctrl]))
        if name in GATE_ALIASES:
            base, n_ctrl = GATE_ALIASES[name]
            if len(controls) != n_ctrl:
                raise CircuitError(f"gate {name!r} needs {n_ctrl} control(s), got {len(controls)}")
        elif name in BASE_GATES:
            base = name
        else:
            raise CircuitError(f"unsupported gate {name!r}")
        return Gate(base, target, controls, d.get("p"), bool(d.get("dagger", False)))


def gate(name: str, target: int, control=None, param: str | None = None) -> Gate:
    """Convenience constructor: ``gate("cnot", 2, 1)``, ``gate("ry", 1, param="t0")``."""
    d = {"g": name, "t": target}
    if control is not None:
        d["c"] = control
    if param is not None:
        d["p"] = param
    return Gate.from_json(d)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = ()
    input: object = "zeros"      # "zeros" | "separable" | tuple of Coeff
    params: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.params is None:
            seen: list = []
            for g in self.gates:
                if g.param is not None and g.param not in seen:
                    seen.append(g.param)
            object.__setattr__(self, "params", tuple(seen))
        else:
            object.__setattr__(self, "params", tuple(self.params))
        if isinstance(self.input, (list, tuple)):
            object.__setattr__(self, "input", tuple(Coeff.coerce(v) for v in self.input))
        self.validate()

    # -- validation -------------------------------------------------------------
    def validate(self) -> None:
        n = self.n_qubits
        if not isinstance(n, int) or n < 1:
            raise CircuitError(f"qubit count must be a positive int, got {n!r}")
        if isinstance(self.input, str):
            if self.input not in ("zeros", "separable"):
                raise CircuitError(f"unknown input spec {self.input!r}")
        elif len(self.input) != 2 ** n:
            raise CircuitError(f"explicit input needs {2 ** n} amplitudes, got {len(self.input)}")
        table = set(self.params)
        for k, g in enumerate(self.gates):
            if g.base not in BASE_GATES:
                raise CircuitError(f"gate {k}: unsupported gate {g.base!r}")
            for q in g.qubits:
                if not isinstance(q, int) or not 1 <= q <= n:
                    raise CircuitError(f"gate {k}: qubit {q} outside [1, {n}]")
            if g.target in g.controls:
                raise CircuitError(f"gate {k}: control equals target {g.target}")
            if len(set(g.controls)) != len(g.controls):
                raise CircuitError(f"gate {k}: repeated control qubit")
            if g.base in ROTATIONS:
                if g.param is None:
                    raise CircuitError(f"gate {k}: rotation {g.base} needs a parameter name")
                if g.param not in table:
                    raise CircuitError(f"gate {k}: unbound parameter name {g.param!r}")
            elif g.param is not None:
                raise CircuitError(f"gate {k}: {g.base} takes no parameter")

    # -- parameters ---------------------------------------------------------------
    @property
    def n_params(self) -> int:
        return len(self.params)

    def param_index(self, name: str) -> int:
        try:
            return self.params.index(name)
        except ValueError:
            raise CircuitError(f"unbound parameter name {name!r}") from None

    def angles(self, theta) -> np.ndarray:
        """Angles in parameter-table order from a sequence or a name->angle map."""
        if isinstance(theta, dict):
            missing = [p for p in self.params if p not in theta]
            if missing:
                raise CircuitError(f"missing angles for parameters {missing}")
            return np.array([float(theta[p]) for p in self.params])
        arr = np.asarray(theta, dtype=float).ravel()
        if arr.size != self.n_params:
            raise CircuitError(f"expected {self.n_params} angles, got {arr.size}")
        return arr

    # -- composition ----------------------------------------------------------------
    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(g.adjoint() for g in reversed(self.gates)),
                       self.input, self.params)

    def then(self, other: "Circuit") -> "Circuit":
        """This circuit followed by ``other``; parameter tables merge by name."""
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot compose circuits on different qubit counts")
        params = list(self.params) + [p for p in other.params if p not in self.params]
        return Circuit(self.n_qubits, self.gates + other.gates, self.input, tuple(params))

    def with_input(self, input) -> "Circuit":
        return Circuit(self.n_qubits, self.gates, input, self.params)

    def repeated(self, times: int) -> "Circuit":
        return Circuit(self.n_qubits, self.gates * times, self.input, self.params)

    def prefix(self, n_gates: int) -> "Circuit":
        return Circuit(self.n_qubits, self.gates[:n_gates], self.input, self.params)

    # -- JSON -------------------------------------------------------------------------
    def to_json(self) -> dict:
        d: dict = {"qubits": self.n_qubits}
        d["input"] = self.input if isinstance(self.input, str) else [c.to_strings() for c in self.input]
        d["gates"] = [g.to_json() for g in self.gates]
        if self.params != Circuit(self.n_qubits, self.gates).params:
            d["params"] = list(self.params)
        return d

    @staticmethod
    def from_json(d: dict) -> "Circuit":
        if not isinstance(d, dict) or "qubits" not in d:
            raise CircuitError("circuit JSON needs a 'qubits' field")
        raw_input = d.get("input", "zeros")
        if isinstance(raw_input, list):
            raw_input = tuple(_parse_amplitude(v) for v in raw_input)
        gates = tuple(Gate.from_json(g) for g in d.get("gates", []))
        return Circuit(int(d["qubits"]), gates, raw_input, d.get("params"))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @staticmethod
    def loads(text: str) -> "Circuit":
        return Circuit.from_json(json.loads(text))


def _parse_amplitude(v) -> Coeff:
    """Explicit amplitude: rational, rational string, [re, im] or four components."""
    if isinstance(v, float):
        if not math.isfinite(v):
            raise CircuitError("non-finite amplitude")
        return Coeff(Fraction(v))
    if isinstance(v, list):
        if len(v) == 2:
            return Coeff(_exact(v[0]), _exact(v[1]))
        if len(v) == 4:
            return Coeff(*(_exact(x) for x in v))
        raise CircuitError(f"amplitude {v!r} must have 2 or 4 components")
    return Coeff(_exact(v))


def _exact(x):
    return Fraction(x) if isinstance(x, float) else x
