"""Circuit IR, exact symbolic simulation, measurement extraction and a numeric oracle."""
from .catalog import CatalogCase, case_catalog, composed_target_rule
from .ir import (MAX_ORACLE_QUBITS, MAX_SYMBOLIC_QUBITS, Circuit, CircuitError, Gate, gate)
from .oracle import oracle_numeric, random_separable, statevector, symbol_bindings
from .symbolic import (MeasurementSpec, SymState, extract, input_syms, kernel_circuit,
                       param_syms, run_symbolic)

__all__ = [
    "Circuit", "Gate", "gate", "CircuitError", "MAX_SYMBOLIC_QUBITS", "MAX_ORACLE_QUBITS",
    "MeasurementSpec", "SymState", "run_symbolic", "extract", "kernel_circuit",
    "input_syms", "param_syms", "oracle_numeric", "statevector", "symbol_bindings",
    "random_separable", "CatalogCase", "case_catalog", "composed_target_rule",
]
