"""Greedy leafcount-guided simplification driver."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..expr.poly import Expr
from .collect import collect
from .factor import factor_group
from .rules import constraint_pairs, eliminate_square, merge_all

# global elimination directions, tie-break order first
_GLOBAL_DIRECTIONS = (("s", "b"), ("s", "a"), ("c", "b"), ("c", "a"))


@dataclass(frozen=True)
class SimplifyConfig:
    intensity: int = 3
    budget: float = 10.0          # seconds
    target: str = "leafcount"
    trace: bool = False

    def __post_init__(self):
        if not isinstance(self.intensity, int) or self.intensity < 0:
            raise ValueError("intensity must be a nonnegative integer")
        if self.target != "leafcount":
            raise ValueError("the only supported target is 'leafcount'")


@dataclass
class SimplifyResult:
    expr: Expr
    before: int
    after: int
    passes: int = 0
    budget_exceeded: bool = False
    seconds: float = 0.0
    trace: list = field(default_factory=list)

    @property
    def improvement(self) -> Fraction:
        return Fraction(self.before, self.after)

    def trace_json(self) -> str:
        return json.dumps(self.trace, indent=1)


def _eliminate_direction(terms: dict, kinds) -> dict:
    for u, v in constraint_pairs(terms):
        target = u if u.kind in kinds else v if v.kind in kinds else None
        if target is not None:
            terms = eliminate_square(terms, target)
    return terms


class _Search:
    def __init__(self, e: Expr, cfg: SimplifyConfig):
        self.cfg = cfg
        self.deadline = time.monotonic() + cfg.budget
        self.best_terms = e.terms
        self.best_tree = e.form
        self.best_score = e.leafcount()
        self.trace: list = []
        self.exceeded = False
        self.pass_no = 0
        tree, score = collect(e.terms)
        if score < self.best_score:
            self.best_tree, self.best_score = tree, score

    def out_of_time(self) -> bool:
        if time.monotonic() > self.deadline:
            self.exceeded = True
        return self.exceeded

    def offer(self, terms: dict, rule: str) -> bool:
        """Score a candidate polynomial; accept on strict improvement."""
        if terms == self.best_terms:
            return False
        tree, score = collect(terms)
        if self.cfg.trace:
            self.trace.append({"pass": self.pass_no, "rule": rule, "leafcount": score,
                               "accepted": score < self.best_score})
        if score < self.best_score:
            self.best_terms, self.best_tree, self.best_score = terms, tree, score
            return True
        return False

    def run_pass(self) -> bool:
        start = self.best_score
        base = merge_all(self.best_terms)
        self.offer(base, "merge-pythagorean-pairs")
        if self.out_of_time():
            return False
        for kinds in _GLOBAL_DIRECTIONS:
            self.offer(_eliminate_direction(base, kinds), f"eliminate-{kinds[0]}{kinds[1]}-squared")
            if self.out_of_time():
                return self.best_score < start
        for u, v in constraint_pairs(self.best_terms):
            cur = self.best_terms
            for sym in (v, u):
                self.offer(eliminate_square(cur, sym), f"eliminate-{sym.name}-squared")
                if self.out_of_time():
                    return self.best_score < start
        return self.best_score < start


def _is_trivial(e: Expr) -> bool:
    return e.is_constant() or e.leafcount() == 1


def simplify_report(e: Expr, cfg: SimplifyConfig | None = None) -> SimplifyResult:
    cfg = cfg or SimplifyConfig()
    t0 = time.monotonic()
    before = e.leafcount()
    if cfg.intensity == 0 or _is_trivial(e):
        return SimplifyResult(e, before, before)
    search = _Search(e, cfg)
    for k in range(cfg.intensity):
        search.pass_no = k + 1
        improved = search.run_pass()
        if search.exceeded or not improved:
            break
    passes = search.pass_no
    out = Expr(search.best_terms, search.best_tree) if search.best_tree is not None \
        else Expr(search.best_terms)
    if not search.exceeded:
        factored = factor_group(out.expanded())
        if factored.leafcount() < out.leafcount():
            out = factored
            if cfg.trace:
                search.trace.append({"pass": passes, "rule": "factor-group",
                                     "leafcount": out.leafcount(), "accepted": True})
    out = out.with_form(out.form)
    return SimplifyResult(out, before, out.leafcount(), passes, search.exceeded,
                          time.monotonic() - t0, search.trace)


def simplify(e: Expr, cfg: SimplifyConfig | None = None) -> Expr:
    return simplify_report(e, cfg).expr


def improvement_factor(before: Expr, after: Expr) -> Fraction:
    return Fraction(before.leafcount(), after.leafcount())
