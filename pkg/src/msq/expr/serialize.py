"""JSON tree format for expressions.

Nodes: ``{"op": "add"|"mul"|"neg", "args": [...]}``,
``{"op": "pow", "args": [base], "exp": k}``, ``{"sym": "c", "idx": 3}`` and
``{"coeff": ["p0", "p1", "p2", "p3"]}`` with rational strings.  Decoding
re-expands the tree; a tree identical to the canonical rendering comes back
without an overlay, so ``loads(dumps(e)) == e`` holds structurally.
"""
from __future__ import annotations

import json

from .coeff import Coeff
from .poly import Expr, add_terms, mul_terms
from .symbols import Sym, mono_of
from .tree import render_poly


def tree_to_json(tree) -> dict:
    tag = tree[0]
    if tag == "sym":
        return {"sym": tree[1].kind, "idx": tree[1].index}
    if tag == "const":
        return {"coeff": tree[1].to_strings()}
    if tag == "pow":
        return {"op": "pow", "args": [tree_to_json(tree[1])], "exp": tree[2]}
    if tag == "neg":
        return {"op": "neg", "args": [tree_to_json(tree[1])]}
    return {"op": tag, "args": [tree_to_json(a) for a in tree[1]]}


def tree_from_json(node) -> tuple:
    if not isinstance(node, dict):
        raise ValueError(f"expression node must be an object, got {node!r}")
    if "sym" in node:
        return ("sym", Sym(node["sym"], int(node["idx"])))
    if "coeff" in node:
        return ("const", Coeff.from_strings(node["coeff"]))
    op = node.get("op")
    args = node.get("args")
    if not isinstance(args, list):
        raise ValueError(f"node {op!r} needs an 'args' list")
    if op == "pow":
        exp = node.get("exp")
        if len(args) != 1 or not isinstance(exp, int) or exp < 0:
            raise ValueError("pow node needs one arg and a nonnegative int 'exp'")
        return ("pow", tree_from_json(args[0]), exp)
    if op == "neg":
        if len(args) != 1:
            raise ValueError("neg node takes exactly one arg")
        return ("neg", tree_from_json(args[0]))
    if op in ("add", "mul"):
        if len(args) < 2:
            raise ValueError(f"{op} node needs at least two args")
        return (op, tuple(tree_from_json(a) for a in args))
    raise ValueError(f"unknown expression op {op!r}")


def expand_tree(tree, _memo=None) -> dict:
    """Canonical terms of any rendered tree."""
    memo = {} if _memo is None else _memo
    hit = memo.get(tree)
    if hit is not None:
        return hit
    tag = tree[0]
    if tag == "sym":
        out = {mono_of(tree[1]): Coeff(1)}
    elif tag == "const":
        out = {0: tree[1]} if tree[1] else {}
    elif tag == "neg":
        out = {m: -c for m, c in expand_tree(tree[1], memo).items()}
    elif tag == "pow":
        out = (Expr(expand_tree(tree[1], memo)) ** tree[2]).terms
    elif tag == "add":
        out = {}
        for a in tree[1]:
            out = add_terms(out, expand_tree(a, memo))
    else:
        out = {0: Coeff(1)}
        for a in tree[1]:
            out = mul_terms(out, expand_tree(a, memo))
    memo[tree] = out
    return out


def from_tree(tree) -> Expr:
    e = Expr(expand_tree(tree))
    return e.with_form(tree)


def to_json(e: Expr) -> dict:
    return tree_to_json(e.tree())


def from_json(node) -> Expr:
    return from_tree(tree_from_json(node))


def dumps(e: Expr) -> str:
    """Canonical serialization: compact separators, stable key order."""
    return json.dumps(to_json(e), separators=(",", ":"), sort_keys=True)


def loads(text: str) -> Expr:
    return from_json(json.loads(text))


def canonical_bytes(e: Expr) -> int:
    return len(dumps(e).encode())


__all__ = ["dumps", "loads", "to_json", "from_json", "from_tree", "expand_tree",
           "tree_to_json", "tree_from_json", "canonical_bytes", "render_poly"]
