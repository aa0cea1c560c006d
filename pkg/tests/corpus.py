"""Circuit/measurement pairs shared by the equivalence tests."""
from dataclasses import dataclass

import numpy as np

from msq.circuit import Circuit, MeasurementSpec, case_catalog, gate, random_separable
from msq.circuit.symbolic import kernel_circuit
from msq.vqa import Ansatz, build_ansatz, pauli_feature_map, transition_circuit
from msq.vqls import VqlsProblem, build_h_test, build_specialh_test


@dataclass(frozen=True)
class Item:
    name: str
    circuit: Circuit
    spec: MeasurementSpec
    family: str

    @property
    def symbolic_circuit(self) -> Circuit:
        if self.spec.kind == "kernel":
            return kernel_circuit(self.circuit, self.spec.other)
        return self.circuit

    def split_theta(self, theta):
        """Oracle argument for one parameter vector of the symbolic circuit."""
        if self.spec.kind == "kernel":
            m = self.circuit.n_params
            return (theta[:m], theta[m:])
        return theta


def _mixed() -> Circuit:
    gates = [gate("h", 1), gate("rx", 2, param="u"), gate("cy", 3, 1), gate("s", 2),
             gate("ch", 1, 3), gate("cry", 2, 3, param="v"), gate("rz", 1, param="w"),
             gate("sdg", 3), gate("y", 1), gate("cz", 2, 1)]
    return Circuit(3, gates)


def corpus() -> list:
    items = []
    for case in case_catalog():
        last = case.circuit.n_qubits
        for q in range(1, last + 1):
            items.append(Item(f"{case.name}/q{q}", case.circuit, MeasurementSpec.prob_zero(q),
                              case.family))
    qd = build_ansatz("qdrl", 2, 1)
    items += [Item("qdrl/q1", qd, MeasurementSpec.prob_zero(1), "qdrl"),
              Item("qdrl/q2", qd, MeasurementSpec.prob_zero(2), "qdrl"),
              Item("qdrl/amp0n", qd, MeasurementSpec.amp0n(), "qdrl")]
    lin = build_ansatz("linear-entangled", 3, 2)
    items += [Item("linear/ZZI", lin, MeasurementSpec.pauli_string("ZZI"), "linear-entangled"),
              Item("linear/XIY", lin, MeasurementSpec.pauli_string("XIY"), "linear-entangled"),
              Item("linear/transition-IZX", transition_circuit(lin, "IZX"),
                   MeasurementSpec.amp0n(), "linear-entangled")]
    full = build_ansatz("full-entangled", 3, 2, rotations=("ry", "rz"))
    items += [Item("full/q2", full, MeasurementSpec.prob_zero(2), "full-entangled"),
              Item("full/YZX", full, MeasurementSpec.pauli_string("YZX"), "full-entangled")]
    vq = build_ansatz("vqls-ry-cz", 3, 3)
    items += [Item("vqls-ansatz/q3", vq, MeasurementSpec.prob_zero(3), "vqls-ry-cz")]
    p = VqlsProblem(2, ((0.7, "II"), (0.3, "XZ")), ansatz=Ansatz("vqls-ry-cz", 2, 2))
    items += [Item("h_test/re", build_h_test(p, 0, 1).circuit, MeasurementSpec.prob_zero(1),
                   "vqls-ry-cz"),
              Item("specialh_test/im", build_specialh_test(p, 1, imag=True).circuit,
                   MeasurementSpec.prob_zero(1), "vqls-ry-cz")]
    fm = pauli_feature_map(3).circuit
    other = Circuit(3, fm.gates, "zeros", fm.params)
    renamed = Circuit.from_json({**other.to_json(), "gates": [
        {**g, "p": "o_" + g["p"]} if "p" in g else g for g in other.to_json()["gates"]]})
    items += [Item("feature-map/amp0n", fm, MeasurementSpec.amp0n(), "pauli-feature-map"),
              Item("feature-map/kernel", fm, MeasurementSpec.kernel(renamed), "pauli-feature-map")]
    items += [Item("mixed/q1", _mixed(), MeasurementSpec.prob_zero(1), "mixed"),
              Item("mixed/XYZ", _mixed(), MeasurementSpec.pauli_string("XYZ"), "mixed")]
    return items


def random_point(item: Item, rng: np.random.Generator):
    """(theta, amplitudes or None) for one evaluation."""
    c = item.symbolic_circuit
    theta = rng.uniform(0, 2 * np.pi, c.n_params)
    amps = random_separable(rng, c.n_qubits) if c.input == "separable" else None
    return theta, amps
