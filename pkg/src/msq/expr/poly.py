"""Canonical sparse polynomials over Q(i, sqrt2)."""
from __future__ import annotations

from math import gcd

from gmpy2 import mpq

from .coeff import ONE, ZERO, Coeff
from .symbols import EXP_BITS, EXP_MASK, MAX_EXPONENT, Sym, mono_of, unpack
from . import tree as _tree


_Q0 = mpq(0)


class UnboundSymbolError(KeyError):
    def __init__(self, sym: Sym):
        super().__init__(f"no binding for symbol {sym!r}")
        self.sym = sym


def _clean(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if c}


def add_terms(t1: dict, t2: dict, sign: int = 1) -> dict:
    out = dict(t1)
    for m, c in t2.items():
        prev = out.get(m)
        if prev is None:
            out[m] = c if sign > 0 else -c
        else:
            s = prev + c if sign > 0 else prev - c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


# unit_a * unit_b = scale * unit_c over the basis (1, i, sqrt2, i*sqrt2)
_UNIT_PRODUCT = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (1, 3), (2, 2): (2, 0), (2, 3): (2, 1),
    (3, 0): (1, 3), (3, 1): (-1, 2), (3, 2): (2, 1), (3, 3): (-2, 0),
}


def split_terms(terms: dict) -> list:
    """Terms over Q(i, sqrt2) -> four rational polynomials, one per basis unit."""
    parts: list = [{}, {}, {}, {}]
    for m, c in terms.items():
        if c.p0:
            parts[0][m] = c.p0
        if c.p1:
            parts[1][m] = c.p1
        if c.p2:
            parts[2][m] = c.p2
        if c.p3:
            parts[3][m] = c.p3
    return parts


def join_terms(parts: list) -> dict:
    out: dict = {}
    zero = _Q0
    for unit, part in enumerate(parts):
        for m, q in part.items():
            if not q:
                continue
            c = out.get(m)
            comps = [zero, zero, zero, zero] if c is None else list(c.components())
            comps[unit] = q
            out[m] = Coeff._raw(*comps)
    return out


def _integer_form(d: dict):
    den = 1
    for q in d.values():
        qd = int(q.denominator)
        if den % qd:
            den = den * qd // gcd(den, qd)
    return {m: int(q.numerator) * (den // int(q.denominator)) for m, q in d.items()}, den


def _rational_product(d1: dict, d2: dict) -> dict:
    if len(d1) < len(d2):
        d1, d2 = d2, d1
    n1, den1 = _integer_form(d1)
    n2, den2 = _integer_form(d2)
    out: dict = {}
    get = out.get
    for m2, c2 in n2.items():
        for m1, c1 in n1.items():
            m = m1 + m2
            prev = get(m)
            out[m] = c1 * c2 if prev is None else prev + c1 * c2
    den = den1 * den2
    return {m: mpq(v, den) for m, v in out.items() if v}


def mul_terms(t1: dict, t2: dict) -> dict:
    if not t1 or not t2:
        return {}
    s1, s2 = split_terms(t1), split_terms(t2)
    acc: list = [None, None, None, None]
    for u1, d1 in enumerate(s1):
        if not d1:
            continue
        for u2, d2 in enumerate(s2):
            if not d2:
                continue
            scale, unit = _UNIT_PRODUCT[(u1, u2)]
            prod = _rational_product(d1, d2)
            target = acc[unit]
            if target is None and scale == 1:
                acc[unit] = prod
                continue
            if target is None:
                target = acc[unit] = {}
            for m, q in prod.items():
                target[m] = target.get(m, _Q0) + scale * q
    return join_terms([a or {} for a in acc])


class Expr:
    """Immutable polynomial with an optional rendered overlay.

    ``terms`` maps packed monomials to nonzero ``Coeff``.  ``form`` is either
    ``None`` (render canonically) or a tree from :mod:`msq.expr.tree` whose
    expansion equals ``terms``; the simplifier produces these.
    """

    __slots__ = ("terms", "form", "_hash", "_leafcount")

    def __init__(self, terms: dict | None = None, form=None):
        self.terms = terms if terms is not None else {}
        self.form = form
        self._hash = None
        self._leafcount = None

    # -- construction -----------------------------------------------------
    @staticmethod
    def const(value) -> "Expr":
        c = Coeff.coerce(value)
        return Expr({0: c} if c else {})

    @staticmethod
    def symbol(sym: Sym, exp: int = 1) -> "Expr":
        return Expr({mono_of(sym, exp): ONE})

    @staticmethod
    def monomial(pairs, coeff=ONE) -> "Expr":
        m = 0
        for sym, e in pairs:
            m += mono_of(sym, e)
        c = Coeff.coerce(coeff)
        return Expr({m: c} if c else {})

    def with_form(self, form) -> "Expr":
        """Attach an overlay; the canonical rendering collapses to ``None``."""
        if form is None or form == _tree.render_poly(self.terms):
            return Expr(self.terms)
        return Expr(self.terms, form)

    def expanded(self) -> "Expr":
        return Expr(self.terms) if self.form is not None else self

    # -- queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get(0, ZERO)

    def free_syms(self) -> set:
        out = set()
        for m in self.terms:
            out.update(s for s, _ in unpack(m))
        return out

    def __len__(self):
        return len(self.terms)

    def tree(self):
        return self.form if self.form is not None else _tree.render_poly(self.terms)

    def leafcount(self) -> int:
        if self._leafcount is None:
            if self.form is not None:
                self._leafcount = _tree.leafcount(self.form)
            else:
                self._leafcount = _tree.poly_leafcount(self.terms)
        return self._leafcount

    def canonical_leafcount(self) -> int:
        return _tree.poly_leafcount(self.terms)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, Sym):
            return Expr.symbol(other)
        return Expr.const(other)

    def __add__(self, other):
        return Expr(add_terms(self.terms, self._coerce(other).terms))

    __radd__ = __add__

    def __sub__(self, other):
        return Expr(add_terms(self.terms, self._coerce(other).terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Expr({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other.is_constant():
            c = other.constant_value()
            if not c:
                return Expr()
            return Expr({m: v * c for m, v in self.terms.items()})
        return Expr(mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Expr):
            if not other.is_constant():
                raise TypeError("division by a non-constant expression")
            other = other.constant_value()
        inv = Coeff.coerce(other).inverse()
        return Expr({m: v * inv for m, v in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0 or k > MAX_EXPONENT:
            raise ValueError("exponent must be a nonnegative machine-word int")
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            for _, e in unpack(m):
                if e * k > MAX_EXPONENT:
                    raise OverflowError("exponent overflow")
            return Expr({m * k: c ** k}) if k else Expr.const(1)
        result, base = Expr.const(1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conj(self) -> "Expr":
        """Complex conjugate; every symbol is real by construction."""
        return Expr({m: c.conj() for m, c in self.terms.items()})

    def real_part(self) -> "Expr":
        return Expr(_clean({m: c.real_part() for m, c in self.terms.items()}))

    def imag_part(self) -> "Expr":
        return Expr(_clean({m: c.imag_part() for m, c in self.terms.items()}))

    def abs2(self) -> "Expr":
        return self * self.conj()

    def subs(self, mapping: dict) -> "Expr":
        """Substitute symbols by expressions (polynomial composition)."""
        mapping = {k: self._coerce(v) for k, v in mapping.items()}
        out: dict = {}
        for m, c in self.terms.items():
            acc = {0: c}
            for s, e in unpack(m):
                if s in mapping:
                    acc = mul_terms(acc, (mapping[s] ** e).terms)
                else:
                    acc = {mm + mono_of(s, e): cc for mm, cc in acc.items()}
            out = add_terms(out, acc)
        return Expr(out)

    # -- numeric --------------------------------------------------------------
    def eval(self, bindings: dict | None = None) -> complex:
        values = normalize_bindings(bindings or {})
        total = 0j
        cache: dict = {}
        for m, c in self.terms.items():
            v = cache.get(m)
            if v is None:
                v = 1.0
                mm, slot = m, 0
                while mm:
                    e = mm & EXP_MASK
                    if e:
                        try:
                            x = values[slot]
                        except KeyError:
                            from .symbols import sym_at_slot
                            raise UnboundSymbolError(sym_at_slot(slot)) from None
                        v *= x if e == 1 else x ** e
                    mm >>= EXP_BITS
                    slot += 1
                cache[m] = v
            total += complex(c) * v
        return total

    # -- identity -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Expr):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms and self.form == other.form

    def same_value(self, other) -> bool:
        """Equal as canonical polynomials, ignoring any overlay."""
        return self.terms == self._coerce(other).terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.terms.items()), self.form))
        return self._hash

    def __str__(self):
        return _tree.to_str(self.tree())

    def __repr__(self):
        return f"Expr({self})"


def normalize_bindings(bindings: dict) -> dict:
    """Map slot -> complex value; keys may be ``Sym`` or single-symbol ``Expr``."""
    out = {}
    for key, value in bindings.items():
        if isinstance(key, Expr):
            syms = key.free_syms()
            if len(syms) != 1 or len(key.terms) != 1:
                raise ValueError(f"binding key {key} is not a single symbol")
            key = syms.pop()
        out[key.slot] = value
    return out


def sym_expr(kind: str, index: int) -> Expr:
    return Expr.symbol(Sym(kind, index))
