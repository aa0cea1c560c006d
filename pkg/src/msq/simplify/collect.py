"""Nested (Horner-style) rendering of canonical polynomials.

``collect`` never changes the polynomial, only how it is drawn: it pulls out
monomial and rational content and recursively splits on the most frequent
symbol, keeping the flat rendering whenever that is smaller.
"""
from __future__ import annotations

from collections import Counter
from math import gcd, lcm

from gmpy2 import mpq

from ..expr.coeff import ONE, Coeff
from ..expr.symbols import EXP_BITS, EXP_MASK, mono_gcd, mono_of, sym_at_slot, unpack
from ..expr.tree import (coeff_leafcount, factor_nodes, make_add, make_mul,
                         make_neg, poly_leafcount, render_poly, render_term, term_leafcount)


def tree_add(parts):
    """Sum node over ``(tree, count)`` pairs, with flattening."""
    if len(parts) == 1:
        return parts[0]
    tree = make_add([t for t, _ in parts])
    count = 1 + sum(c - 1 if t[0] == "add" else c for t, c in parts)
    return tree, count


def tree_mul(parts):
    parts = [(t, c) for t, c in parts if not (t[0] == "const" and t[1] == ONE)]
    if not parts:
        return ("const", ONE), 1
    if len(parts) == 1:
        return parts[0]
    tree = make_mul([t for t, _ in parts])
    count = 1 + sum(c - 1 if t[0] == "mul" else c for t, c in parts)
    return tree, count


def tree_neg(part):
    t, c = part
    if t[0] == "neg":
        return t[1], c - 1
    return make_neg(t), c + 1


def monomial_part(mono: int):
    nodes = factor_nodes(unpack(mono))
    return [(n, 1 if n[0] == "sym" else 3) for n in nodes]


def _rational_gcd(values) -> mpq:
    num, den = 0, 1
    for q in values:
        num = gcd(num, int(q.numerator))
        den = lcm(den, int(q.denominator))
    return mpq(num, den)


def rational_content(terms: dict):
    """Positive rational gcd of the coefficients, or None if any is irrational."""
    values = []
    for c in terms.values():
        if c.p1 or c.p2 or c.p3:
            return None
        values.append(c.p0)
    return _rational_gcd(values)


def _split_symbol(terms: dict):
    counts: Counter = Counter()
    for m in terms:
        slot = 0
        while m:
            if m & EXP_MASK:
                counts[slot] += 1
            m >>= EXP_BITS
            slot += 1
    if not counts:
        return None
    best = max(counts.values())
    if best < 2:
        return None
    sym = min((sym_at_slot(s) for s, n in counts.items() if n == best), key=lambda s: s.order)
    return sym


_HALF = Coeff(mpq(1, 2))


def _pair_basis(terms: dict):
    """Best rewrite ``u Qu + v Qv + R -> (u + v) P + (u - v) M + R`` over partner pairs.

    Only pairs appearing linearly qualify, and only rewrites that leave fewer
    terms in the coefficient polynomials are considered.
    """
    slots: dict = {}
    for m in terms:
        slot = 0
        while m:
            e = m & EXP_MASK
            if e:
                prev = slots.get(slot, 0)
                slots[slot] = e if e > prev else prev
            m >>= EXP_BITS
            slot += 1
    best = None
    for slot, top in slots.items():
        u = sym_at_slot(slot)
        if top != 1 or u.kind not in ("c", "a"):
            continue
        v = u.partner()
        if slots.get(v.slot) != 1:
            continue
        mu, mv = mono_of(u), mono_of(v)
        su, sv = u.slot * EXP_BITS, v.slot * EXP_BITS
        qu, qv, r = {}, {}, {}
        for m, c in terms.items():
            if (m >> su) & EXP_MASK:
                qu[m - mu] = c
            elif (m >> sv) & EXP_MASK:
                qv[m - mv] = c
            else:
                r[m] = c
        if not qu or not qv:
            continue
        plus: dict = {}
        minus: dict = {}
        for m in qu.keys() | qv.keys():
            a, b = qu.get(m), qv.get(m)
            if a is None:
                a = Coeff()
            if b is None:
                b = Coeff()
            p = (a + b) * _HALF
            d = (a - b) * _HALF
            if p:
                plus[m] = p
            if d:
                minus[m] = d
        saved = len(qu) + len(qv) - len(plus) - len(minus)
        if saved > 0 and (best is None or saved > best[0]):
            best = (saved, u, v, plus, minus, r)
    return best


def _linear_factor(u, v, sign):
    terms = {mono_of(u): ONE, mono_of(v): ONE if sign > 0 else -ONE}
    return render_poly(terms), poly_leafcount(terms)


def collect(terms: dict):
    """Smallest nested rendering found; returns ``(tree, leafcount)``."""
    n = len(terms)
    if n == 0:
        return ("const", Coeff()), 1
    if n == 1:
        (m, c), = terms.items()
        return render_term(m, c), term_leafcount(m, c)
    flat_count = poly_leafcount(terms)
    best = None
    g = mono_gcd(terms)
    sign = -1 if all(_is_negative(c) for c in terms.values()) else 1
    k = rational_content(terms)
    scale = None
    if k is not None and k != 1:
        before = sum(coeff_leafcount(c) for c in terms.values())
        kc = Coeff(k)
        after = sum(coeff_leafcount(c / kc) for c in terms.values())
        if before - after > coeff_leafcount(kc) + 1:
            scale = kc
    if g or sign < 0 or scale is not None:
        factor = Coeff(-1 if sign < 0 else 1) * (scale or ONE)
        inv = factor.inverse()
        inner = {m - g: c * inv for m, c in terms.items()}
        body = tree_mul([*([(("const", scale), coeff_leafcount(scale))] if scale else []),
                         *monomial_part(g), collect(inner)])
        best = tree_neg(body) if sign < 0 else body
    elif (basis := _pair_basis(terms)) is not None:
        _, u, v, plus, minus, r = basis
        parts = [collect(r)] if r else []
        if plus:
            parts.append(tree_mul([_linear_factor(u, v, 1), collect(plus)]))
        if minus:
            parts.append(tree_mul([_linear_factor(u, v, -1), collect(minus)]))
        best = tree_add(parts)
    else:
        sym = _split_symbol(terms)
        if sym is not None:
            shift = sym.slot * EXP_BITS
            kmin = min(e for e in ((m >> shift) & EXP_MASK for m in terms) if e)
            unit = mono_of(sym, kmin)
            q, r = {}, {}
            for m, c in terms.items():
                if (m >> shift) & EXP_MASK:
                    q[m - unit] = c
                else:
                    r[m] = c
            prod = tree_mul([*monomial_part(unit), collect(q)])
            best = tree_add([collect(r), prod])
    if best is None or best[1] >= flat_count:
        return render_poly(terms), flat_count
    return best


def _is_negative(c: Coeff) -> bool:
    return c.nonzero_count() == 1 and next(q for q in c.components() if q) < 0
