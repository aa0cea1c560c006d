"""Rendered expression trees and the leafcount metric.

Trees are plain nested tuples so they hash, compare and serialize cheaply::

    ("add", (t, ...))   ("mul", (t, ...))   ("pow", t, k)
    ("neg", t)          ("sym", Sym)        ("const", Coeff)

Leafcount counts every head and every atom.  Rendering conventions are
fixed so the count is deterministic: exponent 1 never gets a power head,
negative constants become a negation head over the magnitude, and a
coefficient with several nonzero components is its own sum subtree.
"""
from __future__ import annotations

from .coeff import ONE, Coeff
from .symbols import grlex_key, unpack

# atoms needed to spell each unit of Q(i, sqrt2)
_UNIT_ATOMS = (0, 1, 1, 2)


def _component_count(q, unit: int) -> int:
    neg = 1 if q < 0 else 0
    mag = -q if q < 0 else q
    if unit == 0:
        return 1 + neg
    atoms = _UNIT_ATOMS[unit]
    if mag == 1:
        body = atoms if atoms == 1 else 1 + atoms
    else:
        body = 1 + 1 + atoms
    return body + neg


def coeff_leafcount(c: Coeff) -> int:
    parts = [(q, u) for u, q in enumerate(c.components()) if q]
    if not parts:
        return 1
    if len(parts) == 1:
        return _component_count(*parts[0])
    return 1 + sum(_component_count(q, u) for q, u in parts)


def _single_sign(c: Coeff):
    """(sign, magnitude) if ``c`` has exactly one nonzero component."""
    if c.nonzero_count() != 1:
        return None
    q = next(q for q in c.components() if q)
    return (-1, -c) if q < 0 else (1, c)


def factor_nodes(pairs) -> list:
    return [("sym", s) if e == 1 else ("pow", ("sym", s), e) for s, e in pairs]


def render_term(mono: int, c: Coeff):
    factors = factor_nodes(unpack(mono))
    if not factors:
        return ("const", c)
    split = _single_sign(c)
    if split is None:
        return ("mul", (("const", c), *factors))
    sign, mag = split
    if mag.is_one():
        body = factors[0] if len(factors) == 1 else ("mul", tuple(factors))
    else:
        body = ("mul", (("const", mag), *factors))
    return ("neg", body) if sign < 0 else body


def sorted_terms(terms: dict) -> list:
    return sorted(terms.items(), key=lambda kv: grlex_key(kv[0]))


def render_poly(terms: dict):
    if not terms:
        return ("const", Coeff())
    items = sorted_terms(terms)
    if len(items) == 1:
        return render_term(*items[0])
    return ("add", tuple(render_term(m, c) for m, c in items))


def term_leafcount(mono: int, c: Coeff) -> int:
    pairs = unpack(mono)
    if not pairs:
        return coeff_leafcount(c)
    fac = sum(1 if e == 1 else 3 for _, e in pairs)
    split = _single_sign(c)
    if split is None:
        return 1 + coeff_leafcount(c) + fac
    sign, mag = split
    if mag.is_one():
        body = fac if len(pairs) == 1 else 1 + fac
    else:
        body = 1 + coeff_leafcount(mag) + fac
    return body + (1 if sign < 0 else 0)


def poly_leafcount(terms: dict) -> int:
    """Leafcount of ``render_poly(terms)`` without building the tree."""
    if not terms:
        return 1
    total = sum(term_leafcount(m, c) for m, c in terms.items())
    return total + (1 if len(terms) > 1 else 0)


def leafcount(tree) -> int:
    tag = tree[0]
    if tag == "sym":
        return 1
    if tag == "const":
        return coeff_leafcount(tree[1])
    if tag == "pow":
        return 2 + leafcount(tree[1])
    if tag == "neg":
        return 1 + leafcount(tree[1])
    return 1 + sum(leafcount(t) for t in tree[1])


def dag_size(tree) -> int:
    """Node count of the shared binary DAG of ``tree``.

    Identical subtrees count once.  A k-ary sum or product counts as k - 1
    binary nodes and ``x^k`` as its square-and-multiply chain, which is the
    shape a straight-line evaluator executes.
    """
    seen = set()
    total = 0

    def visit(t):
        nonlocal total
        if t in seen:
            return
        seen.add(t)
        tag = t[0]
        if tag in ("sym", "const"):
            total += 1
        elif tag == "pow":
            visit(t[1])
            k = t[2]
            total += max(k.bit_length() - 1 + bin(k).count("1") - 1, 0) if k else 1
        elif tag == "neg":
            visit(t[1])
            total += 1
        else:
            for a in t[1]:
                visit(a)
            total += len(t[1]) - 1

    visit(tree)
    return total


# -- smart constructors used by the simplifier ------------------------------

def make_add(args):
    flat = []
    for a in args:
        if a[0] == "add":
            flat.extend(a[1])
        else:
            flat.append(a)
    if len(flat) == 1:
        return flat[0]
    return ("add", tuple(flat))


def make_mul(args):
    flat = []
    for a in args:
        if a[0] == "mul":
            flat.extend(a[1])
        elif a[0] == "const" and a[1] == ONE:
            continue
        else:
            flat.append(a)
    if not flat:
        return ("const", ONE)
    if len(flat) == 1:
        return flat[0]
    return ("mul", tuple(flat))


def make_neg(arg):
    if arg[0] == "neg":
        return arg[1]
    return ("neg", arg)


# -- printing ---------------------------------------------------------------

def to_str(tree) -> str:
    tag = tree[0]
    if tag == "sym":
        return tree[1].name
    if tag == "const":
        return str(tree[1])
    if tag == "pow":
        base = to_str(tree[1])
        if tree[1][0] not in ("sym",):
            base = f"({base})"
        return f"{base}^{tree[2]}"
    if tag == "neg":
        inner = to_str(tree[1])
        if tree[1][0] == "add":
            inner = f"({inner})"
        return f"-{inner}"
    if tag == "mul":
        parts = []
        for a in tree[1]:
            s = to_str(a)
            if a[0] in ("add", "neg") or (a[0] == "const" and a[1].nonzero_count() > 1):
                s = f"({s})"
            parts.append(s)
        return "*".join(parts)
    out = ""
    for k, a in enumerate(tree[1]):
        s = to_str(a)
        if k == 0:
            out = s
        elif a[0] == "neg":
            inner = to_str(a[1])
            if a[1][0] == "add":
                inner = f"({inner})"
            out += f" - {inner}"
        else:
            out += f" + {s}"
    return out
