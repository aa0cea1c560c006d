"""Compile expressions into straight-line programs.

The rendered tree is hash-consed into a DAG (identical subtrees and
identical binary operations are computed once), lowered to SSA, then given
registers by a linear scan so that the scratch space stays small.  Plans can
be interpreted with caller-owned registers or turned into a generated Python
function for the hot loop of an optimizer.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import cached_property

from .poly import Expr, UnboundSymbolError, normalize_bindings
from .symbols import Sym

LOAD, CONST, ADD, MUL, NEG = "load", "const", "add", "mul", "neg"


@dataclass(frozen=True)
class EvalPlan:
    ops: tuple            # (opcode, dst, a, b); a/b are registers, input or const slots
    inputs: tuple         # Sym per input slot
    consts: tuple         # complex per const slot
    n_registers: int
    output: int

    @property
    def op_count(self) -> int:
        return len(self.ops)

    def input_vector(self, bindings: dict) -> list:
        values = normalize_bindings(bindings)
        try:
            return [values[s.slot] for s in self.inputs]
        except KeyError:
            missing = next(s for s in self.inputs if s.slot not in values)
            raise UnboundSymbolError(missing) from None

    def run(self, bindings, registers: list | None = None) -> complex:
        """Interpret the plan.  ``registers`` is optional caller scratch."""
        x = self.input_vector(bindings) if isinstance(bindings, dict) else bindings
        r = registers if registers is not None else [0j] * self.n_registers
        consts = self.consts
        for op, dst, a, b in self.ops:
            if op == MUL:
                r[dst] = r[a] * r[b]
            elif op == ADD:
                r[dst] = r[a] + r[b]
            elif op == LOAD:
                r[dst] = x[a]
            elif op == CONST:
                r[dst] = consts[a]
            else:
                r[dst] = -r[a]
        return complex(r[self.output])

    @cached_property
    def function(self):
        """Generated ``f(x) -> value`` equivalent to :meth:`run`."""
        namespace: dict = {}
        exec(compile(self.source, "<msq-plan>", "exec"), namespace)
        return namespace["plan"]

    @cached_property
    def source(self) -> str:
        lines = ["def plan(x):"]
        for op, dst, a, b in self.ops:
            if op == MUL:
                lines.append(f" r{dst}=r{a}*r{b}")
            elif op == ADD:
                lines.append(f" r{dst}=r{a}+r{b}")
            elif op == LOAD:
                lines.append(f" r{dst}=x[{a}]")
            elif op == CONST:
                c = self.consts[a]
                lit = repr(c.real) if c.imag == 0 else repr(c)
                lines.append(f" r{dst}={lit}")
            else:
                lines.append(f" r{dst}=-r{a}")
        lines.append(f" return r{self.output}")
        return "\n".join(lines) + "\n"


class _Builder:
    def __init__(self):
        self.ssa: list = []        # (opcode, a, b)
        self.memo: dict = {}
        self.inputs: list = []
        self.input_slot: dict = {}
        self.consts: list = []
        self.const_slot: dict = {}

    def emit(self, op, a, b=-1):
        if op in (ADD, MUL) and a > b:
            a, b = b, a
        key = (op, a, b)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.ssa.append(key)
        idx = len(self.ssa) - 1
        self.memo[key] = idx
        return idx

    def load(self, sym: Sym):
        slot = self.input_slot.get(sym)
        if slot is None:
            slot = self.input_slot[sym] = len(self.inputs)
            self.inputs.append(sym)
        return self.emit(LOAD, slot)

    def const(self, value: complex):
        slot = self.const_slot.get(value)
        if slot is None:
            slot = self.const_slot[value] = len(self.consts)
            self.consts.append(value)
        return self.emit(CONST, slot)

    def power(self, base: int, k: int):
        result = None
        while k:
            if k & 1:
                result = base if result is None else self.emit(MUL, result, base)
            k >>= 1
            if k:
                base = self.emit(MUL, base, base)
        return result

    def node(self, tree, cache: dict):
        hit = cache.get(tree)
        if hit is not None:
            return hit
        tag = tree[0]
        if tag == "sym":
            out = self.load(tree[1])
        elif tag == "const":
            out = self.const(complex(tree[1]))
        elif tag == "neg":
            out = self.emit(NEG, self.node(tree[1], cache))
        elif tag == "pow":
            k = tree[2]
            out = self.const(1 + 0j) if k == 0 else self.power(self.node(tree[1], cache), k)
        else:
            op = ADD if tag == "add" else MUL
            args = [self.node(a, cache) for a in tree[1]]
            out = args[0]
            for r in args[1:]:
                out = self.emit(op, out, r)
        cache[tree] = out
        return out


def _allocate(ssa: list, output: int):
    """Linear-scan register assignment over SSA values."""
    last_use = [-1] * len(ssa)
    for i, (op, a, b) in enumerate(ssa):
        if op in (ADD, MUL):
            last_use[a] = i
            last_use[b] = i
        elif op == NEG:
            last_use[a] = i
    last_use[output] = len(ssa)
    reg = [0] * len(ssa)
    free: list = []
    n_regs = 0
    ops = []
    for i, (op, a, b) in enumerate(ssa):
        srcs = (a, b) if op in (ADD, MUL) else ((a,) if op == NEG else ())
        ra = reg[a] if op in (ADD, MUL, NEG) else a
        rb = reg[b] if op in (ADD, MUL) else -1
        for s in set(srcs):
            if last_use[s] == i:
                free.append(reg[s])
        if free:
            dst = free.pop()
        else:
            dst = n_regs
            n_regs += 1
        reg[i] = dst
        if last_use[i] == -1 and i != output:
            free.append(dst)
        ops.append((op, dst, ra, rb))
    return tuple(ops), max(n_regs, 1), reg[output]


def compile_expr(e: Expr) -> EvalPlan:
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        b = _Builder()
        out = b.node(e.tree(), {})
    finally:
        sys.setrecursionlimit(limit)
    ops, n_regs, output = _allocate(b.ssa, out)
    return EvalPlan(ops=ops, inputs=tuple(b.inputs), consts=tuple(b.consts),
                    n_registers=n_regs, output=output)


def run(plan: EvalPlan, bindings, registers=None) -> complex:
    return plan.run(bindings, registers)
