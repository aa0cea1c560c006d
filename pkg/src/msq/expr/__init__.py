"""Exact symbolic expressions: coefficients, symbols, polynomials, plans."""
from .coeff import I, INV_SQRT2, ONE, SQRT2, ZERO, Coeff
from .plan import EvalPlan, compile_expr, run
from .poly import Expr, UnboundSymbolError, sym_expr
from .serialize import canonical_bytes, dumps, from_json, loads, to_json
from .symbols import Sym
from .tree import dag_size, leafcount as tree_leafcount


def C(k: int) -> Expr:
    return sym_expr("c", k)


def S(k: int) -> Expr:
    return sym_expr("s", k)


def A(i: int) -> Expr:
    return sym_expr("a", i)


def B(i: int) -> Expr:
    return sym_expr("b", i)


def X(d: int) -> Expr:
    return sym_expr("x", d)


def leafcount(e: Expr) -> int:
    return e.leafcount()


def eval_numeric(e: Expr, bindings: dict | None = None) -> complex:
    return e.eval(bindings)


compile = compile_expr  # noqa: A001  (module-level alias mirrors the operation name)

__all__ = [
    "Coeff", "ONE", "ZERO", "I", "SQRT2", "INV_SQRT2", "Sym", "Expr",
    "UnboundSymbolError", "EvalPlan", "compile_expr", "run", "leafcount",
    "eval_numeric", "dumps", "loads", "to_json", "from_json", "canonical_bytes",
    "dag_size", "tree_leafcount", "C", "S", "A", "B", "X",
]
