"""Rewrite rules over canonical polynomials.

Two families of constraint-using rewrites drive the reduction, both valid
modulo ``C(k)^2 + S(k)^2 = 1`` and ``A(i)^2 + B(i)^2 = 1``:

* elimination replaces every ``v^2`` of one member of a constraint pair by
  ``1 - u^2`` (so ``S(0)^4`` becomes ``1 - 2 C(0)^2 + C(0)^4``);
* pair merging collapses ``c*m*u^2 + c*m*v^2`` into ``c*m`` wherever both
  terms are present with the same coefficient.  This is how factorizable
  probabilities lose their ``(a^2 + b^2)`` factors without being rewritten
  into the other basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable

from ..expr.poly import Expr
from ..expr.symbols import EXP_BITS, EXP_MASK, PARTNER, Sym, mono_of, sym_at_slot

IDENTITY = "identity-preserving"
CONSTRAINT = "constraint-using"


@dataclass(frozen=True)
class RewriteRule:
    name: str
    matcher: Callable[[Expr], bool]
    rewriter: Callable[[Expr], Expr]
    soundness: str

    def apply(self, e: Expr) -> Expr | None:
        if not self.matcher(e):
            return None
        out = self.rewriter(e)
        return None if out.terms == e.terms and out.form == e.form else out


def constraint_pairs(terms: dict) -> list:
    """Constraint pairs ``(first, second)`` with a symbol present, in global order."""
    present = set()
    for m in terms:
        slot = 0
        while m:
            if m & EXP_MASK:
                present.add(sym_at_slot(slot))
            m >>= EXP_BITS
            slot += 1
    pairs = {}
    for s in present:
        if s.kind in PARTNER:
            first = s if s.kind in ("c", "a") else s.partner()
            pairs[first.pair_key] = (first, first.partner())
    return [pairs[k] for k in sorted(pairs)]


def _exp(m: int, s: Sym) -> int:
    return (m >> (s.slot * EXP_BITS)) & EXP_MASK


def eliminate_square(terms: dict, sym: Sym) -> dict:
    """Rewrite every ``sym^(2q+r)`` as ``sym^r (1 - partner^2)^q``."""
    partner = sym.partner()
    unit = mono_of(sym)
    p2 = mono_of(partner, 2)
    out: dict = {}
    for m, c in terms.items():
        e = _exp(m, sym)
        if e < 2:
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
            continue
        q, r = divmod(e, 2)
        base = m - (e - r) * unit
        for j in range(q + 1):
            k = comb(q, j) * (-1 if j & 1 else 1)
            mm = base + j * p2
            add = c * k
            prev = out.get(mm)
            out[mm] = add if prev is None else prev + add
    return {m: c for m, c in out.items() if c}


def merge_pairs(terms: dict, pair) -> dict:
    """Collapse ``c m u^2 + c m v^2 -> c m`` for one constraint pair, to a fixpoint."""
    u, v = pair
    u2, v2 = mono_of(u, 2), mono_of(v, 2)
    out = dict(terms)
    changed = True
    while changed:
        changed = False
        for m in sorted(out, key=lambda mm: (_exp(mm, u), mm), reverse=True):
            c = out.get(m)
            if c is None or _exp(m, u) < 2:
                continue
            partner = m - u2 + v2
            if out.get(partner) != c:
                continue
            base = m - u2
            del out[m]
            del out[partner]
            prev = out.get(base)
            total = c if prev is None else prev + c
            if total:
                out[base] = total
            else:
                out.pop(base, None)
            changed = True
    return out


def merge_all(terms: dict) -> dict:
    out = terms
    while True:
        before = len(out)
        for pair in constraint_pairs(out):
            out = merge_pairs(out, pair)
        if len(out) == before:
            return out


DIRECTIONS = ("eliminate_s", "eliminate_b", "eliminate_c", "eliminate_a", "best")


def pythagorean_reduce(e: Expr, direction: str = "best") -> Expr:
    """Eliminate squares of one member of each constraint pair.

    ``eliminate_s``/``eliminate_c`` act on the trig pairs, ``eliminate_b``/
    ``eliminate_a`` on the input-amplitude pairs.  ``best`` treats every pair
    independently, trying both members and keeping the smaller canonical
    leafcount (ties go to eliminating S or B).
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    terms = e.terms
    kinds = {"eliminate_s": "s", "eliminate_b": "b", "eliminate_c": "c", "eliminate_a": "a"}
    if direction != "best":
        kind = kinds[direction]
        for first, second in constraint_pairs(terms):
            target = first if first.kind == kind else second if second.kind == kind else None
            if target is not None:
                terms = eliminate_square(terms, target)
        return Expr(terms)
    for first, second in constraint_pairs(terms):
        # second is S or B: the preferred member to eliminate on ties
        keep_first = eliminate_square(terms, second)
        keep_second = eliminate_square(terms, first)
        if Expr(keep_second).canonical_leafcount() < Expr(keep_first).canonical_leafcount():
            terms = keep_second
        else:
            terms = keep_first
    return Expr(terms)


def _has_pair(e: Expr) -> bool:
    return bool(constraint_pairs(e.terms))


RULES = (
    RewriteRule("merge-pythagorean-pairs", _has_pair,
                lambda e: Expr(merge_all(e.terms)), CONSTRAINT),
    RewriteRule("eliminate-s-squared", _has_pair,
                lambda e: pythagorean_reduce(e, "eliminate_s"), CONSTRAINT),
    RewriteRule("eliminate-c-squared", _has_pair,
                lambda e: pythagorean_reduce(e, "eliminate_c"), CONSTRAINT),
    RewriteRule("eliminate-b-squared", _has_pair,
                lambda e: pythagorean_reduce(e, "eliminate_b"), CONSTRAINT),
    RewriteRule("eliminate-a-squared", _has_pair,
                lambda e: pythagorean_reduce(e, "eliminate_a"), CONSTRAINT),
    RewriteRule("pythagorean-best-of-both", _has_pair,
                lambda e: pythagorean_reduce(e, "best"), CONSTRAINT),
)
