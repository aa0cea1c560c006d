"""Interned symbols and packed monomials.

``C(k)``/``S(k)`` stand for cos(theta_k/2) and sin(theta_k/2) of circuit
parameter ``k``; ``A(i)``/``B(i)`` are the real amplitudes of a separable
input qubit ``i``; ``X(d)`` is a raw data feature.

A monomial is a single Python int: the exponent of the symbol with slot
``s`` lives in bits ``[s*W, (s+1)*W)``.  Multiplying monomials is integer
addition, which keeps the polynomial inner loops cheap.  Slots are handed out
in interning order, so any ordering decision goes through ``Sym.order``.
"""
from __future__ import annotations

import threading
from functools import lru_cache

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
MAX_EXPONENT = EXP_MASK

KINDS = ("c", "s", "a", "b", "x")
_GROUP = {"c": (0, 0), "s": (0, 1), "a": (1, 0), "b": (1, 1), "x": (2, 0)}

# partner kind under the Pythagorean constraint C^2 + S^2 = 1, A^2 + B^2 = 1
PARTNER = {"c": "s", "s": "c", "a": "b", "b": "a"}


class Sym:
    __slots__ = ("kind", "index", "slot", "order", "name")

    def __new__(cls, kind: str, index: int):
        return intern_sym(kind, index)

    def __reduce__(self):
        return (Sym, (self.kind, self.index))

    def __repr__(self):
        return f"{self.kind.upper()}({self.index})"

    def __lt__(self, other: "Sym"):
        return self.order < other.order

    @property
    def constrained(self) -> bool:
        return self.kind in PARTNER

    def partner(self) -> "Sym":
        return Sym(PARTNER[self.kind], self.index)

    @property
    def pair_key(self) -> tuple:
        """Identifies the constraint pair this symbol belongs to."""
        return (_GROUP[self.kind][0], self.index)


_table: dict = {}
_by_slot: list = []
_lock = threading.Lock()


def intern_sym(kind: str, index: int) -> Sym:
    key = (kind, index)
    sym = _table.get(key)
    if sym is not None:
        return sym
    if kind not in _GROUP:
        raise ValueError(f"unknown symbol kind {kind!r}")
    if not isinstance(index, int) or index < 0:
        raise ValueError(f"symbol index must be a nonnegative int, got {index!r}")
    with _lock:
        sym = _table.get(key)
        if sym is None:
            sym = object.__new__(Sym)
            sym.kind = kind
            sym.index = index
            sym.slot = len(_by_slot)
            group, sub = _GROUP[kind]
            sym.order = (group, index, sub)
            sym.name = f"{kind}{index}"
            _by_slot.append(sym)
            _table[key] = sym
    return sym


def sym_at_slot(slot: int) -> Sym:
    return _by_slot[slot]


def mono_of(sym: Sym, exp: int = 1) -> int:
    if exp < 0 or exp > MAX_EXPONENT:
        raise OverflowError(f"exponent {exp} outside [0, {MAX_EXPONENT}]")
    return exp << (sym.slot * EXP_BITS)


@lru_cache(maxsize=1 << 18)
def unpack(mono: int) -> tuple:
    """Monomial -> ((Sym, exp), ...) in global symbol order."""
    out = []
    slot = 0
    while mono:
        e = mono & EXP_MASK
        if e:
            out.append((_by_slot[slot], e))
        mono >>= EXP_BITS
        slot += 1
    out.sort(key=lambda pair: pair[0].order)
    return tuple(out)


def pack(pairs) -> int:
    mono = 0
    for sym, e in pairs:
        mono += mono_of(sym, e)
    return mono


def exponent(mono: int, sym: Sym) -> int:
    return (mono >> (sym.slot * EXP_BITS)) & EXP_MASK


def degree(mono: int) -> int:
    return sum(e for _, e in unpack(mono))


@lru_cache(maxsize=1 << 18)
def grlex_key(mono: int) -> tuple:
    """Graded sort key: ascending degree, then lex-descending within a degree.

    Constants come first and ``a1^2`` precedes ``a1*b1`` precedes ``b1^2``.
    """
    pairs = unpack(mono)
    deg = sum(e for _, e in pairs)
    return (deg, tuple((s.order, -e) for s, e in pairs))


def divides(small: int, big: int) -> bool:
    for sym, e in unpack(small):
        if exponent(big, sym) < e:
            return False
    return True


def mono_gcd(monos) -> int:
    monos = list(monos)
    if not monos:
        return 0
    common = dict(unpack(monos[0]))
    for m in monos[1:]:
        if not common:
            break
        for sym in list(common):
            e = exponent(m, sym)
            if e < common[sym]:
                if e:
                    common[sym] = e
                else:
                    del common[sym]
    return pack(common.items())


def C(k: int) -> Sym:
    return Sym("c", k)


def S(k: int) -> Sym:
    return Sym("s", k)


def A(i: int) -> Sym:
    return Sym("a", i)


def B(i: int) -> Sym:
    return Sym("b", i)


def X(d: int) -> Sym:
    return Sym("x", d)
