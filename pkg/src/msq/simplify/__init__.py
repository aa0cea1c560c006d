"""Measurement simplification: constraint rewrites plus a greedy driver."""
from .collect import collect
from .driver import (SimplifyConfig, SimplifyResult, improvement_factor, simplify,
                     simplify_report)
from .factor import divide_exact, factor_group
from .rules import (CONSTRAINT, IDENTITY, RULES, RewriteRule, eliminate_square, merge_all,
                    pythagorean_reduce)

__all__ = [
    "SimplifyConfig", "SimplifyResult", "simplify", "simplify_report", "improvement_factor",
    "pythagorean_reduce", "factor_group", "collect", "divide_exact", "RewriteRule", "RULES",
    "eliminate_square", "merge_all", "CONSTRAINT", "IDENTITY",
]
