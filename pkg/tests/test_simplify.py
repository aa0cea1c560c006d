import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import constrained_bindings, exprs
from msq.circuit import MeasurementSpec, case_catalog, extract
from msq.expr import A, B, C, S, Expr
from msq.simplify import (RULES, SimplifyConfig, factor_group, improvement_factor,
                          pythagorean_reduce, simplify, simplify_report)
from msq.simplify.rules import CONSTRAINT, IDENTITY
from msq.vqa import QDRL

SMALL = SimplifyConfig(intensity=2, budget=5.0)


def _agree(e1: Expr, e2: Expr, n: int = 100, seed: int = 0, tol: float = 1e-10) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(n):
        b = constrained_bindings(e1 + e2, rng)
        v1, v2 = e1.eval(b), e2.eval(b)
        if abs(v1 - v2) > tol * max(1.0, abs(v1)):
            return False
    return True


# -- pinned examples --------------------------------------------------------------------

def test_four_term_sum_is_one():
    e = (A(1) ** 2 * A(2) ** 2 + A(1) ** 2 * B(2) ** 2 + B(1) ** 2 * A(2) ** 2
         + B(1) ** 2 * B(2) ** 2)
    assert simplify(e) == Expr.const(1)


def test_target_rule_is_left_alone():
    e = A(1) ** 2 * A(2) ** 2 + B(1) ** 2 * B(2) ** 2
    out = simplify(e)
    assert out.same_value(e)
    assert out.leafcount() == e.leafcount()


def test_case6_q1():
    case = next(c for c in case_catalog() if c.name == "case6")
    raw = extract(case.stage("P2"), MeasurementSpec.prob_zero(1))
    assert simplify(raw).same_value(A(2) ** 2)


def test_reduce_single_square():
    assert pythagorean_reduce(S(0) ** 2, "eliminate_s") == 1 - C(0) ** 2


def test_reduce_pair_sum():
    assert pythagorean_reduce(A(1) ** 2 + B(1) ** 2) == Expr.const(1)


def test_reduce_fourth_power():
    assert pythagorean_reduce(S(0) ** 4, "eliminate_s") == 1 - 2 * C(0) ** 2 + C(0) ** 4


@pytest.mark.parametrize("direction,banned", [("eliminate_s", S(0)), ("eliminate_c", C(0)),
                                              ("eliminate_b", B(1)), ("eliminate_a", A(1))])
def test_direction_removes_squares(direction, banned):
    e = (C(0) ** 3 * S(0) ** 2 + A(1) ** 2 * B(1) ** 4 * C(0) - S(0) ** 2 * B(1) ** 2
         + A(1) ** 3)
    out = pythagorean_reduce(e, direction)
    sym = next(iter(banned.free_syms()))
    from msq.expr.symbols import exponent
    assert all(exponent(m, sym) < 2 for m in out.terms)
    assert _agree(e, out)


def test_unknown_direction():
    with pytest.raises(ValueError):
        pythagorean_reduce(A(1), "sideways")


def test_factor_common_monomial():
    e = A(1) ** 2 * A(2) ** 2 + A(1) ** 2 * B(2) ** 2
    f = factor_group(e)
    assert str(f) == "a1^2*(a2^2 + b2^2)"
    assert f.same_value(e)


def test_factor_difference_of_squares():
    f = factor_group(C(0) ** 2 - S(0) ** 2)
    assert str(f) == "(c0 - s0)*(c0 + s0)"


def test_factor_random_triple_product():
    rng = np.random.default_rng(11)
    atoms = [C(0), S(0), C(1), A(1), B(1)]
    for _ in range(10):
        prod = Expr.const(1)
        for _ in range(3):
            f = Expr()
            for _ in range(3):
                t = Expr.const(int(rng.integers(1, 4)) * (1 if rng.random() < .5 else -1))
                for _ in range(2):
                    t = t * atoms[int(rng.integers(len(atoms)))]
                f = f + t
            prod = prod * f
        out = factor_group(prod)
        assert out.same_value(prod)
        assert out.leafcount() <= prod.leafcount()


def test_improvement_factor_values():
    e = A(1) + B(1)
    assert improvement_factor(e, e) == 1
    assert float(Fraction(2273, 757)) == pytest.approx(3.003, abs=1e-3)


# -- config and driver contract ---------------------------------------------------------------

def test_intensity_zero_is_identity():
    e = A(1) ** 2 + B(1) ** 2
    assert simplify(e, SimplifyConfig(intensity=0)) is e


def test_trivial_inputs_short_circuit():
    for e in (Expr.const(3), A(1), Expr()):
        assert simplify(e) is e


def test_bad_config():
    with pytest.raises(ValueError):
        SimplifyConfig(intensity=-1)
    with pytest.raises(ValueError):
        SimplifyConfig(target="bytes")


def test_zero_budget_flags_best_so_far():
    e = extract(QDRL.circuit, MeasurementSpec.prob_zero(1))
    rep = simplify_report(e, SimplifyConfig(budget=0.0))
    assert rep.budget_exceeded
    assert rep.after <= rep.before
    assert _agree(e, rep.expr, n=20)


def test_trace_is_json():
    e = (C(0) ** 2 - S(0) ** 2) * A(1) ** 2 + B(1) ** 2 * (C(0) ** 2 - S(0) ** 2)
    rep = simplify_report(e, SimplifyConfig(trace=True))
    steps = json.loads(rep.trace_json())
    assert steps and {"rule", "leafcount", "accepted"} <= set(steps[0])
    accepted = [s["leafcount"] for s in steps if s["accepted"]]
    assert accepted == sorted(accepted, reverse=True)


# -- properties -----------------------------------------------------------------------------------

@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.name)
def test_rule_soundness(rule):
    rng = np.random.default_rng(5)
    atoms = [C(0), S(0), C(1), S(1), A(1), B(1)]
    hits = 0
    for _ in range(30):
        e = Expr()
        for _ in range(int(rng.integers(2, 7))):
            t = Expr.const(Fraction(int(rng.integers(-5, 6)) or 1, int(rng.integers(1, 4))))
            for _ in range(int(rng.integers(1, 6))):
                t = t * atoms[int(rng.integers(len(atoms)))]
            e = e + t
        # plant a mergeable pair so every rule has something to match
        e = e + t * (C(1) ** 2 + S(1) ** 2) * atoms[int(rng.integers(len(atoms)))]
        out = rule.apply(e)
        if out is None:
            continue
        hits += 1
        assert _agree(e, out), rule.name
    assert hits > 0
    assert rule.soundness in (IDENTITY, CONSTRAINT)


@settings(max_examples=40, deadline=None)
@given(exprs(max_terms=5))
def test_simplify_sound_and_monotone(e):
    out = simplify(e, SMALL)
    assert out.leafcount() <= e.leafcount()
    assert _agree(e, out, n=25)


@settings(max_examples=25, deadline=None)
@given(exprs(max_terms=5))
def test_simplify_idempotent(e):
    once = simplify_report(e, SMALL)
    if once.budget_exceeded:
        return
    twice = simplify(once.expr, SMALL)
    assert twice.same_value(once.expr)
    assert twice.leafcount() == once.expr.leafcount()


@settings(max_examples=25, deadline=None)
@given(exprs(max_terms=5))
def test_factor_group_contract(e):
    f = factor_group(e)
    assert f.same_value(e)
    assert f.leafcount() <= e.leafcount()


def test_intensity_monotone_on_corpus():
    for case in case_catalog():
        for (stage, qubit) in case.expected:
            raw = extract(case.stage(stage), MeasurementSpec.prob_zero(qubit))
            counts = [simplify(raw, SimplifyConfig(intensity=k)).leafcount() for k in range(4)]
            assert counts == sorted(counts, reverse=True), (case.name, stage, counts)


def test_intensity_monotone_on_qdrl():
    raw = extract(QDRL.circuit, MeasurementSpec.prob_zero(1))
    counts = [simplify(raw, SimplifyConfig(intensity=k)).leafcount() for k in range(4)]
    assert counts == sorted(counts, reverse=True)
