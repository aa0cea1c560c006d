"""Regression corpus of small CNOT and H+CNOT circuits on separable inputs.

Each case carries its stages (gate prefixes P0, P1, P2) and the closed forms
that are pinned exactly.  Forms not pinned here are checked in the tests
against a classical bit-permutation model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..expr import A, B, Expr
from .ir import Circuit, gate

HALF = Expr.const("1/2")


@dataclass(frozen=True)
class CatalogCase:
    name: str
    circuit: Circuit
    # (stage, qubit) -> (closed form, its printed simplified rendering)
    expected: dict = field(default_factory=dict)
    # cases whose gate block has a finite order as a basis permutation
    block_order: int | None = None
    family: str = "cnot"

    @property
    def stages(self) -> list:
        return [f"P{k}" for k in range(len(self.circuit.gates) + 1)]

    def stage(self, label: str) -> Circuit:
        return self.circuit.prefix(int(label[1:]))


def _forms(pairs: dict) -> dict:
    return {k: (v, str(v)) if isinstance(v, Expr) else v for k, v in pairs.items()}


def _cnot_case(name: str, second: tuple, expected: dict,
               block_order: int | None = None) -> CatalogCase:
    c, t = second
    circ = Circuit(3, [gate("cnot", 2, 1), gate("cnot", t, c)], "separable")
    return CatalogCase(name, circ, _forms(expected), block_order)


def case_catalog() -> list:
    a1, a2, b1, b2 = A(1), A(2), B(1), B(2)
    target_rule = a1**2 * a2**2 + b1**2 * b2**2
    early = {("P0", 1): a1**2, ("P1", 1): a1**2, ("P1", 2): target_rule}
    control = {**early, ("P2", 1): a1**2}
    cases = [
        _cnot_case("case1", (2, 3), control),
        _cnot_case("case2", (3, 2), control),
        _cnot_case("case3", (1, 3), control),
        _cnot_case("case4", (3, 1), early),
        _cnot_case("case5", (1, 2), {**control, ("P2", 2): a2**2}, block_order=1),
        _cnot_case("case6", (2, 1), {**early, ("P2", 1): a2**2}, block_order=3),
    ]
    h_rule = Circuit(2, [gate("h", 1)], "separable")
    bell = Circuit(2, [gate("h", 1), gate("cnot", 2, 1)], "separable")
    cases.append(CatalogCase("h-rule", h_rule, _forms({
        ("P0", 1): a1**2, ("P1", 1): HALF + a1 * b1}), family="h+cnot"))
    cases.append(CatalogCase("bell", bell, _forms({
        ("P1", 1): HALF + a1 * b1,
        ("P2", 2): (HALF + a1 * b1 * (a2**2 - b2**2), "1/2 + a1*b1*(a2^2 - b2^2)")}),
        family="h+cnot"))
    return cases


def composed_target_rule(first_control: int, second_control: int, target: int) -> Expr:
    """ProbZero(target) after two CNOTs onto ``target``, by composing the one-CNOT rule."""
    a = {q: A(q) ** 2 for q in (first_control, second_control, target)}
    b = {q: B(q) ** 2 for q in (first_control, second_control, target)}
    # after the first CNOT the target marginals are p0 and p1
    p0 = a[first_control] * a[target] + b[first_control] * b[target]
    p1 = a[first_control] * b[target] + b[first_control] * a[target]
    return a[second_control] * p0 + b[second_control] * p1


__all__ = ["CatalogCase", "case_catalog", "composed_target_rule"]
