import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import exprs, free_bindings
from msq.expr import (A, B, C, I, INV_SQRT2, ONE, S, SQRT2, X, Coeff, Expr, Sym,
                      UnboundSymbolError, compile_expr, dag_size, dumps, eval_numeric, leafcount,
                      loads)
from msq.expr.symbols import EXP_MASK, unpack


# -- Coeff -----------------------------------------------------------------------------

def test_sqrt2_squared_is_two():
    assert SQRT2 * SQRT2 == Coeff(2)
    assert Coeff(0, 0, 1, 0) * Coeff(0, 0, 1, 0) == Coeff(2, 0, 0, 0)


def test_inverse_of_sqrt2():
    assert INV_SQRT2 * SQRT2 == ONE
    assert complex(INV_SQRT2) == pytest.approx(1 / math.sqrt(2))


def test_i_squared():
    assert I * I == Coeff(-1)


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ONE / Coeff(0)


@given(st.fractions(), st.integers(1, 40))
def test_repeated_sum_is_exact(q, b):
    part = Coeff(q) / Coeff(b)
    total = Coeff(0)
    for _ in range(b):
        total = total + part
    assert total == Coeff(q)


coeffs = st.builds(Coeff, *(st.fractions(min_value=-100, max_value=100, max_denominator=50)
                            for _ in range(4)))


@given(coeffs, coeffs, coeffs)
def test_coeff_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if a:
        assert a * a.inverse() == ONE


@given(coeffs, coeffs)
def test_coeff_conj_is_multiplicative(a, b):
    assert (a * b).conj() == a.conj() * b.conj()


def test_coeff_string_round_trip():
    c = Coeff(Fraction(1, 3), -2, Fraction(5, 7), 0)
    assert Coeff.from_strings(c.to_strings()) == c


# -- canonical form -------------------------------------------------------------------

def test_construction_order_is_irrelevant():
    e1 = A(1) ** 2 + B(1) ** 2
    e2 = B(1) * B(1) + A(1) * A(1)
    assert e1 == e2
    assert hash(e1) == hash(e2)


def test_difference_of_squares_expands():
    assert (C(0) + S(0)) * (C(0) - S(0)) == C(0) ** 2 - S(0) ** 2


def test_zero_coefficients_dropped():
    e = A(1) - A(1)
    assert e.is_zero() and len(e.terms) == 0


def test_symbols_are_interned():
    assert Sym("c", 3) is Sym("c", 3)
    assert Sym("a", 1) < Sym("b", 1) < Sym("x", 0)
    assert Sym("c", 0) < Sym("s", 0) < Sym("c", 1)


def test_symbol_pickle_keeps_identity():
    import pickle
    assert pickle.loads(pickle.dumps(Sym("s", 7))) is Sym("s", 7)


def test_exponent_overflow_rejected():
    with pytest.raises((OverflowError, ValueError)):
        A(1) ** (EXP_MASK + 1)


@settings(max_examples=60, deadline=None)
@given(exprs(), exprs(), exprs())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(exprs(), st.randoms(use_true_random=False))
def test_leafcount_invariant_under_rebuild_order(e, rnd):
    items = list(e.terms.items())
    rnd.shuffle(items)
    rebuilt = Expr()
    for m, c in items:
        rebuilt = rebuilt + Expr({m: c})
    assert rebuilt == e
    assert rebuilt.leafcount() == e.leafcount()


# -- leafcount ---------------------------------------------------------------------------

def test_leafcount_atom():
    assert leafcount(A(1)) == 1


def test_leafcount_sum_of_squares():
    assert leafcount(A(1) ** 2 + B(1) ** 2) == 7


def test_leafcount_negation_and_constants():
    # neg head over one symbol
    assert leafcount(-A(1)) == 2
    assert leafcount(Expr.const(3)) == 1
    assert leafcount(Expr.const(SQRT2)) >= 1


# -- numeric evaluation ---------------------------------------------------------------------

def test_eval_pythagorean_values():
    assert eval_numeric(A(1) ** 2 + B(1) ** 2, {A(1): 0.6, B(1): 0.8}) == pytest.approx(1.0)


def test_eval_sqrt2_constant():
    assert eval_numeric(Expr.const(SQRT2)).real == pytest.approx(1.41421356237, rel=1e-11)


def test_unbound_symbol_named():
    with pytest.raises(UnboundSymbolError) as info:
        (A(1) * B(2)).eval({A(1): 1.0})
    assert "B(2)" in str(info.value)


def _reference_sum(e: Expr, bindings: dict) -> complex:
    """Monomial-by-monomial sum in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    values = {s.slot: mpmath.mpf(v) for s, v in bindings.items()}
    total = mpmath.mpc(0)
    for m, c in e.terms.items():
        p0, p1, p2, p3 = (mpmath.mpf(int(x.numerator)) / int(x.denominator) for x in c.components())
        r2 = mpmath.sqrt(2)
        term = mpmath.mpc(p0 + p2 * r2, p1 + p3 * r2)
        for s, k in unpack(m):
            term *= values[s.slot] ** k
        total += term
    return complex(total)


def _random_poly(rng, degree: int = 6, n_terms: int = 25) -> Expr:
    syms = [C(0), S(0), C(1), S(1), A(1), B(1), X(0)]
    e = Expr()
    for _ in range(n_terms):
        m = Expr.const(Coeff(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))),
                             0, Fraction(int(rng.integers(-3, 4)), 2), int(rng.integers(-1, 2))))
        for _ in range(int(rng.integers(0, degree + 1))):
            m = m * syms[int(rng.integers(len(syms)))]
        e = e + m
    return e


def test_eval_matches_extended_precision_reference():
    rng = np.random.default_rng(7)
    e = _random_poly(rng)
    for _ in range(20):
        b = free_bindings(e, rng)
        ref = _reference_sum(e, b)
        assert abs(e.eval(b) - ref) <= 1e-12 * max(1.0, abs(ref))


# -- compilation ------------------------------------------------------------------------------

def test_compile_constant_is_single_op():
    plan = compile_expr(Expr.const(5))
    assert plan.op_count == 1
    assert plan.run({}) == 5


def test_compile_shares_repeated_factor():
    u = A(1) + B(1)
    tree = ("mul", (u.tree(), u.tree()))
    e = (u * u).with_form(tree)
    plan = compile_expr(e)
    # a1, b1 loads, one add, one mul
    assert plan.op_count == 4
    assert plan.run({A(1): 0.3, B(1): 0.5}) == pytest.approx(0.64)


@settings(max_examples=60, deadline=None)
@given(exprs(max_terms=8), st.integers(0, 2**32 - 1))
def test_compiled_plan_matches_eval(e, seed):
    rng = np.random.default_rng(seed)
    plan = compile_expr(e)
    b = free_bindings(e, rng)
    ref = e.eval(b)
    assert abs(plan.run(b) - ref) <= 1e-12 * max(1.0, abs(ref))
    x = plan.input_vector(b)
    assert abs(plan.function(x) - ref) <= 1e-12 * max(1.0, abs(ref))
    assert plan.op_count <= dag_size(e.tree())


def test_compile_is_deterministic():
    e = _random_poly(np.random.default_rng(3))
    assert compile_expr(e) == compile_expr(e)


def test_plan_with_caller_registers():
    e = (A(1) + 2) * B(1)
    plan = compile_expr(e)
    scratch = [0j] * plan.n_registers
    assert plan.run({A(1): 1.0, B(1): 2.0}, scratch) == pytest.approx(6.0)


# -- serialization -----------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(exprs())
def test_json_round_trip(e):
    assert loads(dumps(e)) == e


def test_json_shape():
    node = json.loads(dumps(Expr.const(Coeff(Fraction(1, 2))) * C(3)))
    text = json.dumps(node)
    assert '"sym": "c"' in text and '"idx": 3' in text and '"1/2"' in text


def test_overlay_survives_round_trip():
    from msq.simplify import factor_group
    f = factor_group(C(0) ** 2 - S(0) ** 2)
    back = loads(dumps(f))
    assert back.same_value(f)
    assert back.leafcount() == f.leafcount()
