"""Partial factorization: content, difference of squares, trial division.

This is not a complete multivariate factorizer.  It looks for the factors
that circuit probabilities actually carry: monomial content, constraint
sums ``u^2 + v^2`` and linear ``u +- v`` over partner symbols, and binomial
differences of squares.
"""
from __future__ import annotations

from gmpy2 import is_square, isqrt, mpq

from ..expr.coeff import ONE, Coeff
from ..expr.poly import Expr, add_terms, mul_terms
from ..expr.symbols import EXP_BITS, EXP_MASK, divides, mono_gcd, mono_of, unpack
from ..expr.tree import coeff_leafcount
from .collect import collect, monomial_part, rational_content, tree_mul
from .rules import constraint_pairs

TRIAL_DIVISION_LIMIT = 600


def _lex_key(order):
    def key(m):
        return tuple((m >> (s.slot * EXP_BITS)) & EXP_MASK for s in order)
    return key


def divide_exact(p: dict, d: dict):
    """Quotient ``p / d`` if ``d`` divides ``p`` exactly, else None."""
    if not d:
        raise ZeroDivisionError("division by the zero polynomial")
    syms = set()
    for m in list(p) + list(d):
        syms.update(s for s, _ in unpack(m))
    key = _lex_key(sorted(syms, key=lambda s: s.order))
    lead_d = max(d, key=key)
    inv = d[lead_d].inverse()
    rem = dict(p)
    quot: dict = {}
    while rem:
        lead = max(rem, key=key)
        if not divides(lead_d, lead):
            return None
        m = lead - lead_d
        c = rem[lead] * inv
        quot[m] = c
        rem = add_terms(rem, {mm + m: cc * c for mm, cc in d.items()}, -1)
    return quot


def _square_root_term(m: int, c: Coeff):
    """``(m', c')`` with ``c' m'`` squared equal to ``c m`` (rational c > 0 only)."""
    if c.p1 or c.p2 or c.p3 or c.p0 <= 0:
        return None
    pairs = unpack(m)
    if any(e % 2 for _, e in pairs):
        return None
    q = c.p0
    num, den = int(q.numerator), int(q.denominator)
    if not (is_square(num) and is_square(den)):
        return None
    root = 0
    for s, e in pairs:
        root += mono_of(s, e // 2)
    return root, Coeff(mpq(int(isqrt(num)), int(isqrt(den))))


def _difference_of_squares(p: dict):
    if len(p) != 2:
        return None
    (m1, c1), (m2, c2) = sorted(p.items(), key=lambda kv: -(kv[1].p0 > 0))
    r1 = _square_root_term(m1, c1)
    r2 = _square_root_term(m2, -c2)
    if r1 is None or r2 is None:
        return None
    u = {r1[0]: r1[1]}
    v = {r2[0]: r2[1]}
    return [add_terms(u, v, -1), add_terms(u, v)]


def _candidates(p: dict) -> list:
    out = []
    for u, v in constraint_pairs(p):
        mu, mv = mono_of(u), mono_of(v)
        out.append({mono_of(u, 2): ONE, mono_of(v, 2): ONE})
        out.append({mu: ONE, mv: -ONE})
        out.append({mu: ONE, mv: ONE})
    return out


def factor_terms(p: dict) -> tuple:
    """``(scale, monomial, [factor term dicts])`` with product equal to ``p``."""
    g = mono_gcd(p)
    k = rational_content(p)
    scale = Coeff(k) if k is not None and k != 1 else ONE
    inv = scale.inverse()
    rest = {m - g: c * inv for m, c in p.items()}
    factors: list = []
    if 1 < len(rest) <= TRIAL_DIVISION_LIMIT:
        for d in _candidates(rest):
            while len(rest) > 1:
                q = divide_exact(rest, d)
                if q is None:
                    break
                factors.append(d)
                rest = q
    pending = [rest] if rest != {0: ONE} else []
    while pending:
        f = pending.pop()
        split = _difference_of_squares(f)
        if split is None:
            factors.append(f)
        else:
            pending.extend(reversed(split))
    return scale, g, factors


def factored_tree(scale: Coeff, g: int, factors: list):
    parts = []
    if scale != ONE:
        parts.append((("const", scale), coeff_leafcount(scale)))
    parts.extend(monomial_part(g))
    seen: dict = {}
    order = []
    for f in factors:
        key = frozenset(f.items())
        if key not in seen:
            order.append(key)
            seen[key] = [f, 0]
        seen[key][1] += 1
    for key in order:
        f, mult = seen[key]
        tree, count = collect(f)
        if mult > 1:
            tree, count = ("pow", tree, mult), count + 2
        parts.append((tree, count))
    return tree_mul(parts)


def factor_group(e: Expr) -> Expr:
    """Factored overlay when it renders no larger than ``e``; otherwise ``e``."""
    if len(e.terms) < 2:
        return e
    scale, g, factors = factor_terms(e.terms)
    tree, count = factored_tree(scale, g, factors)
    if count <= e.leafcount():
        product = {0: scale} if scale else {}
        product = {m + g: c for m, c in product.items()}
        for f in factors:
            product = mul_terms(product, f)
        assert product == e.terms, "factorization lost terms"
        return Expr(e.terms).with_form(tree)
    return e


__all__ = ["factor_group", "factor_terms", "divide_exact", "factored_tree"]
