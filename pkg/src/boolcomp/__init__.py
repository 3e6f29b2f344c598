"""Complexity measures of boolean functions, their compositions and composition limits."""

__version__ = "0.1.0"

from .core import Assignment, BoolFn, Selector, make_selector, named_fn, from_btt, to_btt, read_btt, write_btt
from .errors import (
    ArityMismatch,
    BoolCompError,
    BudgetExceeded,
    ConstantFunctionError,
    IncompatibleSelector,
    ParseError,
    PreconditionError,
)
from .tree import Ensemble, IndexedTree, compose, compose_boolfn, iterate, parse_itree, to_itree
from .hypergraph import Hypergraph, nu, nu_M, nu_star, tau, tau_star
from .assemblage import minblocks, minblocks_composed, sensitive_set, witness_check
from .measures import global_measure, local
from .complimit import charval, limit_convergence, rho2
from .surd import Surd

__all__ = [
    "ArityMismatch", "Assignment", "BoolCompError", "BoolFn", "BudgetExceeded",
    "ConstantFunctionError", "Ensemble", "Hypergraph", "IncompatibleSelector", "IndexedTree",
    "ParseError", "PreconditionError", "Selector", "Surd", "charval", "compose", "compose_boolfn",
    "from_btt", "global_measure", "iterate", "limit_convergence", "local", "make_selector",
    "minblocks", "minblocks_composed", "named_fn", "nu", "nu_M", "nu_star", "parse_itree",
    "read_btt", "rho2", "sensitive_set", "tau", "tau_star", "to_btt", "to_itree", "witness_check",
    "write_btt",
]
