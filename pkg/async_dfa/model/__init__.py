"""Model format: expressions, actions, schema-v1 documents and validation."""

from .actions import SKIP, Action, Assign, Assume, Receive, Send, Skip, parse_action, render_action
from .expressions import (
    Expr,
    LinearForm,
    evaluate,
    linear_form,
    parse_expression,
    render_expression,
    variables_of,
)
from .system import (
    Assertion,
    Model,
    Procedure,
    Process,
    Transition,
    Variable,
    load_model,
    parse_model,
    render_model,
)
from .validation import Diagnostic, blocking_diagnostics, diagnostics_for, validate

__all__ = [
    "SKIP",
    "Action",
    "Assign",
    "Assume",
    "Receive",
    "Send",
    "Skip",
    "parse_action",
    "render_action",
    "Expr",
    "LinearForm",
    "evaluate",
    "linear_form",
    "parse_expression",
    "render_expression",
    "variables_of",
    "Assertion",
    "Model",
    "Procedure",
    "Process",
    "Transition",
    "Variable",
    "load_model",
    "parse_model",
    "render_model",
    "Diagnostic",
    "blocking_diagnostics",
    "diagnostics_for",
    "validate",
]
