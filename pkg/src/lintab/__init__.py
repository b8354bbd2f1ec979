"""Tabled logic programming for positive programs with cut.

The package evaluates definite-clause programs under the usual Prolog
control strategy (depth-first, left-to-right, textual clause order) while
memoizing calls to predicates that can reach themselves, so left and
mutual recursion terminate on function-free programs.  Two independent
reference evaluators (depth-bounded resolution and a bottom-up fixpoint)
back the engine for differential testing, and a small CLI exposes all
three.
"""

from .engine import (
    DEFAULT_STEP_BUDGET,
    SolveResult,
    StepBudgetExceeded,
    TPEngine,
    tp_solve,
)
from .oracle import (
    OracleResult,
    UnsupportedProgramError,
    bottomup_solve,
    generate_program,
    sld_solve,
)
from .program import Clause, ParseError, Program, parse_program, parse_query
from .tables import Table, TableStore
from .terms import Const, CyclicTermError, Struct, Term, Var

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_STEP_BUDGET",
    "SolveResult",
    "StepBudgetExceeded",
    "TPEngine",
    "tp_solve",
    "OracleResult",
    "UnsupportedProgramError",
    "bottomup_solve",
    "generate_program",
    "sld_solve",
    "Clause",
    "ParseError",
    "Program",
    "parse_program",
    "parse_query",
    "Table",
    "TableStore",
    "Const",
    "CyclicTermError",
    "Struct",
    "Term",
    "Var",
    "__version__",
]
