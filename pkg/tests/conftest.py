import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from msq.expr import A, B, C, S, X, Expr, Sym

DATA = Path(__file__).with_name("data")


@pytest.fixture(scope="session")
def frozen():
    return json.loads((DATA / "frozen.json").read_text())


def constrained_bindings(e: Expr, rng: np.random.Generator) -> dict:
    """Random values with c^2 + s^2 = 1 and a^2 + b^2 = 1 for every pair in ``e``."""
    out = {}
    for sym in e.free_syms():
        if sym in out:
            continue
        t = rng.uniform(0, 2 * np.pi)
        if sym.kind in "cs":
            out[Sym("c", sym.index)], out[Sym("s", sym.index)] = np.cos(t), np.sin(t)
        elif sym.kind in "ab":
            out[Sym("a", sym.index)], out[Sym("b", sym.index)] = np.cos(t), np.sin(t)
        else:
            out[sym] = rng.uniform(-2, 2)
    return out


def free_bindings(e: Expr, rng: np.random.Generator) -> dict:
    return {s: rng.uniform(-1.5, 1.5) for s in e.free_syms()}


_atoms = st.sampled_from([C(0), S(0), C(1), S(1), A(1), B(1), A(2), B(2), X(0)])
_consts = st.sampled_from(["1", "-1", "1/2", "3", "-2/3", "sqrt2", "i"])


def _const(tag: str) -> Expr:
    from msq.expr import I, SQRT2
    if tag == "sqrt2":
        return Expr.const(SQRT2)
    if tag == "i":
        return Expr.const(I)
    return Expr.const(tag)


@st.composite
def monomials(draw):
    e = _const(draw(_consts))
    for atom in draw(st.lists(_atoms, min_size=0, max_size=4)):
        e = e * atom
    return e


@st.composite
def exprs(draw, max_terms: int = 6):
    total = Expr()
    for m in draw(st.lists(monomials(), min_size=1, max_size=max_terms)):
        total = total + m
    return total
