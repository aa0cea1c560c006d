"""Variational quantum linear solver on Hadamard-test measurement expressions.

The ancilla is qubit 1 and the ``n`` system qubits are 2..n+1.  Two circuit
families feed the global cost ``1 - |<b|Psi>|^2 / <Psi|Psi>`` with
``|Psi> = A V(theta)|0>``:

* ``h_test(l, m)`` gives ``P0 = (1 + Re<psi|A_m A_l|psi>) / 2``;
* ``specialh_test(l)`` gives ``P0 = (1 + Re<b|A_l V|0>) / 2``; the imaginary
  variants put an S-dagger on the ancilla after the first H.

Three backends evaluate the same measurement probabilities: ``s0`` runs the
compiled canonical (expanded) expressions, ``s1`` the compiled simplified
ones and ``oracle`` simulates the circuits densely.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from operator import itemgetter
from statistics import median

import numpy as np
from scipy.optimize import minimize

from .circuit.ir import Circuit, CircuitError, Gate, gate
from .circuit.oracle import numeric_matrix, oracle_numeric, pauli_matrix_apply, statevector
from .circuit.symbolic import MeasurementSpec, check_pauli, extract, pauli_gates
from .expr.plan import compile_expr
from .expr.poly import Expr
from .expr.serialize import canonical_bytes
from .simplify import SimplifyConfig, simplify_report
from .vqa import Ansatz

BACKENDS = ("s0", "s1", "oracle")
DEGENERATE_NORM = 1e-14


class DegenerateOperatorError(ValueError):
    """<Psi|Psi> vanished: the decomposition annihilates the trial state."""


# -- problem --------------------------------------------------------------------------

@dataclass(frozen=True)
class VqlsProblem:
    n: int
    terms: tuple                       # ((c_l, pauli), ...)
    b: str = "hadamard"
    ansatz: Ansatz = field(default_factory=lambda: Ansatz("vqls-ry-cz", 3, 3))

    def __post_init__(self):
        terms = tuple((float(c), str(p).upper()) for c, p in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("the A decomposition needs at least one term")
        for _, p in terms:
            check_pauli(p, self.n)
        if self.b not in ("hadamard", "zeros"):
            raise ValueError(f"unknown b preparation {self.b!r}")
        if self.ansatz.n_qubits != self.n:
            raise ValueError(f"ansatz acts on {self.ansatz.n_qubits} qubits, problem has {self.n}")
        if self.n <= 10:
            s = np.linalg.svd(self.matrix(), compute_uv=False)
            if s[-1] <= 1e-12 * max(s[0], 1.0):
                raise ValueError(f"A is singular for the decomposition {list(terms)}")

    @staticmethod
    def reference_instance() -> "VqlsProblem":
        return VqlsProblem(3, ((0.45, "III"), (0.55, "IIZ")))

    @staticmethod
    def from_json(d: dict) -> "VqlsProblem":
        try:
            n = int(d["n"])
            terms = tuple((t["c"], t["p"]) for t in d["A"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"problem JSON needs 'n' and 'A' entries: {exc}") from exc
        ans = d.get("ansatz", {"family": "vqls-ry-cz", "layers": 3})
        ansatz = Ansatz(ans.get("family", "vqls-ry-cz"), int(ans.get("qubits", n)),
                        int(ans.get("layers", 3)), tuple(ans.get("rotations", ("ry",))))
        return VqlsProblem(n, terms, d.get("b", "hadamard"), ansatz)

    def to_json(self) -> dict:
        return {"n": self.n, "A": [{"c": c, "p": p} for c, p in self.terms], "b": self.b,
                "ansatz": {"family": self.ansatz.family, "layers": self.ansatz.n_layers}}

    @staticmethod
    def loads(text: str) -> "VqlsProblem":
        return VqlsProblem.from_json(json.loads(text))

    # dense references
    def matrix(self) -> np.ndarray:
        dim = 2 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        for c, p in self.terms:
            out += c * np.stack([pauli_matrix_apply(eye[:, k], self.n, p) for k in range(dim)], 1)
        return out

    @property
    def ub(self) -> Circuit:
        gates = [gate("h", q) for q in range(1, self.n + 1)] if self.b == "hadamard" else []
        return Circuit(self.n, gates)

    @property
    def v(self) -> Circuit:
        return self.ansatz.circuit

    @property
    def n_params(self) -> int:
        return self.v.n_params

    def b_vector(self) -> np.ndarray:
        return statevector(self.ub)

    def solution(self) -> np.ndarray:
        x = np.linalg.solve(self.matrix(), self.b_vector())
        return x / np.linalg.norm(x)


def dense_cost(p: VqlsProblem, theta) -> float:
    """Global cost straight from the 2^n matrix, no Hadamard tests involved."""
    psi = p.matrix() @ statevector(p.v, theta)
    norm = float(np.vdot(psi, psi).real)
    return 1.0 - abs(np.vdot(p.b_vector(), psi)) ** 2 / norm


def fidelity(p: VqlsProblem, theta) -> float:
    v = statevector(p.v, theta)
    return float(abs(np.vdot(p.solution(), v / np.linalg.norm(v))) ** 2)


# -- Hadamard tests ------------------------------------------------------------------

def _lift(gates, controls: tuple = ()) -> list:
    """Shift system gates onto qubits 2..n+1, optionally adding ancilla controls."""
    return [Gate(g.base, g.target + 1, tuple(controls) + tuple(c + 1 for c in g.controls),
                 g.param, g.dagger) for g in gates]


@dataclass(frozen=True)
class HadamardTestCircuit:
    kind: str            # h_test | specialh_test
    operands: tuple      # Pauli strings (A_l, A_m) or (A_l,)
    circuit: Circuit
    imag: bool = False

    @property
    def spec(self) -> MeasurementSpec:
        return MeasurementSpec.prob_zero(1)

    def decode(self, p0: float) -> float:
        """Recovered Re (or Im) part from the ancilla zero-probability."""
        return 2.0 * p0 - 1.0


def _head(imag: bool) -> list:
    return [gate("h", 1)] + ([gate("sdg", 1)] if imag else [])


def build_h_test(p: VqlsProblem, l: int, m: int, imag: bool = False) -> HadamardTestCircuit:
    al, am = p.terms[l][1], p.terms[m][1]
    v = p.v
    gates = _head(imag) + _lift(v.gates) + _lift(pauli_gates(al), (1,)) \
        + _lift(pauli_gates(am), (1,)) + [gate("h", 1)]
    return HadamardTestCircuit("h_test", (al, am), Circuit(p.n + 1, gates, "zeros", v.params), imag)


def build_specialh_test(p: VqlsProblem, l: int, imag: bool = False) -> HadamardTestCircuit:
    al = p.terms[l][1]
    v = p.v
    ub_dag = p.ub.inverse()
    gates = _head(imag) + _lift(v.gates, (1,)) + _lift(pauli_gates(al), (1,)) \
        + _lift(ub_dag.gates, (1,)) + [gate("h", 1)]
    return HadamardTestCircuit("specialh_test", (al,), Circuit(p.n + 1, gates, "zeros", v.params),
                               imag)


# -- evaluation model -----------------------------------------------------------------

class _Compiled:
    """Generated plan fed directly from the cos/sin half-angle vector."""

    def __init__(self, e: Expr, n_params: int):
        self.expr = e
        if e.is_constant():
            value = complex(e.constant_value()).real
            self.fn = lambda cs, _v=value: _v
            self.op_count = 1
            return
        plan = compile_expr(e)
        self.op_count = plan.op_count
        pos = [s.index + (0 if s.kind == "c" else n_params) for s in plan.inputs]
        fn = plan.function
        if len(pos) == 1:
            k = pos[0]
            self.fn = lambda cs: fn((cs[k],)).real
        else:
            get = itemgetter(*pos)
            self.fn = lambda cs: fn(get(cs)).real


@dataclass
class MeasurementTerm:
    test: HadamardTestCircuit
    raw: Expr
    simplified: Expr
    simplify_seconds: float
    budget_exceeded: bool


class VqlsModel:
    """All measurement expressions of one problem, compiled once per backend."""

    def __init__(self, p: VqlsProblem, cfg: SimplifyConfig | None = None,
                 backends=BACKENDS):
        self.problem = p
        self.m = p.n_params
        self.cfg = cfg or SimplifyConfig()
        t0 = time.perf_counter()
        L = len(p.terms)
        self.h_keys = [(l, m) for l in range(L) for m in range(l + 1, L)]
        tests = [build_h_test(p, l, m) for l, m in self.h_keys]
        tests += [build_specialh_test(p, l, imag) for imag in (False, True) for l in range(L)]
        self.terms: list = []
        for t in tests:
            raw = extract(t.circuit, t.spec)
            if "s1" in backends:
                rep = simplify_report(raw, self.cfg)
                self.terms.append(MeasurementTerm(t, raw, rep.expr, rep.seconds,
                                                  rep.budget_exceeded))
            else:
                self.terms.append(MeasurementTerm(t, raw, raw, 0.0, False))
        self.setup_seconds = {"extract+simplify": time.perf_counter() - t0}
        self.compiled: dict = {}
        for b in backends:
            t1 = time.perf_counter()
            if b == "s0":
                self.compiled[b] = [_Compiled(t.raw, self.m) for t in self.terms]
            elif b == "s1":
                self.compiled[b] = [_Compiled(t.simplified, self.m) for t in self.terms]
            elif b != "oracle":
                raise ValueError(f"unknown backend {b!r}")
            self.setup_seconds[f"compile-{b}"] = time.perf_counter() - t1
        self.coeffs = [c for c, _ in p.terms]

    # probabilities of ancilla zero for every measurement term, in order
    def probabilities(self, theta, backend: str) -> list:
        theta = np.asarray(theta, dtype=float)
        if backend == "oracle":
            return [oracle_numeric(t.test.circuit, t.test.spec, theta) for t in self.terms]
        half = 0.5 * theta
        cs = list(np.cos(half)) + list(np.sin(half))
        return [c.fn(cs) for c in self.compiled[backend]]

    def assemble(self, probs) -> float:
        c = self.coeffs
        L = len(c)
        h = dict(zip(self.h_keys, probs))
        rest = probs[len(self.h_keys):]
        ov_re = [2.0 * q - 1.0 for q in rest[:L]]
        ov_im = [2.0 * q - 1.0 for q in rest[L:]]
        den = sum(ci * ci for ci in c)
        for (l, m), q in h.items():
            den += 2.0 * c[l] * c[m] * (2.0 * q - 1.0)
        if den < DEGENERATE_NORM:
            raise DegenerateOperatorError(
                f"<Psi|Psi> = {den:.3e} for the decomposition {list(self.problem.terms)}")
        re = sum(ci * x for ci, x in zip(c, ov_re))
        im = sum(ci * x for ci, x in zip(c, ov_im))
        value = 1.0 - (re * re + im * im) / den
        return 0.0 if value < 0.0 else value

    def cost(self, theta, backend: str = "s1") -> float:
        return self.assemble(self.probabilities(theta, backend))

    def sizes(self) -> list:
        rows = []
        for t, c0, c1 in zip(self.terms, self.compiled.get("s0", [None] * len(self.terms)),
                             self.compiled.get("s1", [None] * len(self.terms))):
            before, after = t.raw.leafcount(), t.simplified.leafcount()
            rows.append({
                "kind": t.test.kind, "operands": list(t.test.operands), "imag": t.test.imag,
                "leafcount_before": before, "leafcount_after": after,
                "improvement": before / after,
                "bytes_before": canonical_bytes(t.raw), "bytes_after": canonical_bytes(t.simplified),
                "ops_before": c0.op_count if c0 else None, "ops_after": c1.op_count if c1 else None,
                "simplify_seconds": t.simplify_seconds, "budget_exceeded": t.budget_exceeded,
            })
        return rows


_MODELS: dict = {}


def model_for(p: VqlsProblem, backends=BACKENDS, cfg: SimplifyConfig | None = None) -> VqlsModel:
    """Process-wide cache: expression setup is one-time work per problem."""
    key = (json.dumps(p.to_json(), sort_keys=True), tuple(sorted(backends)), cfg)
    if key not in _MODELS:
        _MODELS[key] = VqlsModel(p, cfg, backends)
    return _MODELS[key]


# -- optimization -------------------------------------------------------------------

@dataclass
class RunRecord:
    backend: str
    seed: int
    iterations: list = field(default_factory=list)
    costs: list = field(default_factory=list)
    times: list = field(default_factory=list)          # seconds since loop start
    theta: list = field(default_factory=list)
    final_cost: float = float("nan")
    loop_seconds: float = 0.0
    fidelity: float | None = None
    evaluations: int = 0

    def to_json(self) -> dict:
        return {"backend": self.backend, "seed": self.seed, "iterations": self.iterations,
                "costs": self.costs, "times": self.times, "theta": self.theta,
                "final_cost": self.final_cost, "loop_seconds": self.loop_seconds,
                "fidelity": self.fidelity, "evaluations": self.evaluations}

    @staticmethod
    def from_json(d: dict) -> "RunRecord":
        return RunRecord(**d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "cost"])
        for k, c in zip(self.iterations, self.costs):
            w.writerow([k, repr(c)])
        return buf.getvalue()


def initial_theta(seed: int, m: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, size=m)


def _simplex(theta0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([theta0] + [theta0 + step * e for e in np.eye(len(theta0))])


def optimize(p: VqlsProblem, backend: str = "s1", seed: int = 0, max_iters: int = 300,
             model: VqlsModel | None = None, step: float = 0.5) -> RunRecord:
    """Adaptive Nelder-Mead from a seeded uniform start.

    Iteration 0 is the starting point; iteration k is the best cost after the
    k-th simplex update.  ``evaluations`` counts every cost call.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    model = model or model_for(p, (backend,))
    theta0 = initial_theta(seed, model.m)
    rec = RunRecord(backend, seed)
    start = time.perf_counter()
    first = model.cost(theta0, backend)
    rec.iterations.append(0)
    rec.costs.append(first)
    rec.times.append(time.perf_counter() - start)
    theta = theta0
    calls = [1]

    def f(x):
        calls[0] += 1
        return model.cost(x, backend)

    def log(intermediate_result):
        rec.iterations.append(len(rec.iterations))
        rec.costs.append(float(intermediate_result.fun))
        rec.times.append(time.perf_counter() - start)

    if first > 1e-15:
        res = minimize(f, theta0, method="Nelder-Mead", callback=log,
                       options={"maxiter": max_iters, "maxfev": 50 * max_iters,
                                "adaptive": True, "initial_simplex": _simplex(theta0, step),
                                "xatol": 1e-12, "fatol": 1e-15})
        if res.fun < first:
            theta = res.x
    rec.loop_seconds = time.perf_counter() - start
    rec.evaluations = calls[0]
    rec.final_cost = min(rec.costs)
    rec.theta = [float(t) for t in theta]
    rec.fidelity = fidelity(p, theta) if p.n <= 10 else None
    return rec


def trajectories_agree(a: RunRecord, b: RunRecord, tol: float = 1e-6) -> bool:
    if len(a.costs) != len(b.costs):
        return False
    return all(abs(x - y) <= tol for x, y in zip(a.costs, b.costs))


@dataclass
class BackendComparison:
    records: dict                 # backend -> [RunRecord]
    sizes: list
    setup_seconds: dict

    def loop_times(self, backend: str) -> list:
        return [r.loop_seconds for r in self.records.get(backend, [])]

    @property
    def speedup(self) -> float | None:
        if "s0" not in self.records or "s1" not in self.records:
            return None
        return float(np.mean(self.loop_times("s0")) / np.mean(self.loop_times("s1")))

    @property
    def median_speedup(self) -> float | None:
        if "s0" not in self.records or "s1" not in self.records:
            return None
        return median(self.loop_times("s0")) / median(self.loop_times("s1"))

    def diverging_seeds(self, tol: float = 1e-6) -> list:
        if "s0" not in self.records or "s1" not in self.records:
            return []
        return [a.seed for a, b in zip(self.records["s0"], self.records["s1"])
                if not trajectories_agree(a, b, tol)]

    def to_json(self) -> dict:
        out: dict = {
            "backends": {b: {"mean_loop_seconds": float(np.mean(self.loop_times(b))),
                             "median_loop_seconds": median(self.loop_times(b)),
                             "converged": sum(r.final_cost < 1e-3 for r in rs),
                             "runs": len(rs)}
                         for b, rs in self.records.items()},
            "sizes": self.sizes,
            "setup_seconds": self.setup_seconds,
            "diverging_seeds": self.diverging_seeds(),
        }
        if self.speedup is not None:
            out["speedup"] = self.speedup
            out["median_speedup"] = self.median_speedup
        return out


def compare_backends(p: VqlsProblem, seeds, iters: int = 300, backends=BACKENDS,
                     cfg: SimplifyConfig | None = None) -> BackendComparison:
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    model = model_for(p, backends, cfg)
    records = {b: [optimize(p, b, s, iters, model) for s in seeds] for b in backends}
    return BackendComparison(records, model.sizes(), model.setup_seconds)


__all__ = [
    "VqlsProblem", "HadamardTestCircuit", "build_h_test", "build_specialh_test", "VqlsModel",
    "model_for", "RunRecord", "optimize", "compare_backends", "BackendComparison",
    "dense_cost", "fidelity", "DegenerateOperatorError", "BACKENDS", "trajectories_agree",
    "initial_theta", "CircuitError", "numeric_matrix",
]
