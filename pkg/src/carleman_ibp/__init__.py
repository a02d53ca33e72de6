"""Integration-by-parts engine for weighted bilinear differential terms.

Typical flow: ``conjugate`` an operator, ``split_multiplier`` it into
groups, ``multiply`` two groups, ``reduce`` the product to terminal rows,
``classify`` the rows and check the result with ``verify_identity``.
"""
from .classify import BoundaryCondition, Report, SignContext, classify, emit_latex, emit_table
from .conjugation import FOURTH, SECOND, conjugate, multiply, split_multiplier
from .engine import ContractError, Trace, gap, is_terminal, reduce, rewrite_step
from .oracle import NumericConfig, numeric_eval, verify_identity
from .presets import PRESETS, run_preset
from .terms import Deriv, RowParseError, Schema, SchemaError, Term, merge, read_terms, write_terms
from .weights import EXP_RHO, POLY_PSI, model_for

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "Report", "SignContext", "classify", "emit_latex", "emit_table",
    "FOURTH", "SECOND", "conjugate", "multiply", "split_multiplier",
    "ContractError", "Trace", "gap", "is_terminal", "reduce", "rewrite_step",
    "NumericConfig", "numeric_eval", "verify_identity",
    "PRESETS", "run_preset",
    "Deriv", "RowParseError", "Schema", "SchemaError", "Term", "merge", "read_terms", "write_terms",
    "EXP_RHO", "POLY_PSI", "model_for",
]
