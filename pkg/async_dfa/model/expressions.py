"""
Integer and boolean expressions used in assignments, guards and assertions.

Expressions are parsed with Python's ``ast`` module into a small immutable
tree. Integer arithmetic is arbitrary precision; ``/`` and ``%`` truncate
toward zero.
"""

import ast
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Tuple, Union

from ..errors import ModelSyntaxError


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class BoolLiteral:
    value: bool


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-" or "not"
    operand: "Expr"


@dataclass(frozen=True)
class BinaryOp:
    op: str  # "+", "-", "*", "/", "%"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Comparison:
    op: str  # "==", "!=", "<", "<=", ">", ">="
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" or "or"
    operands: Tuple["Expr", ...]


Expr = Union[IntLiteral, BoolLiteral, VarRef, UnaryOp, BinaryOp, Comparison, BoolOp]

_BINARY = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.FloorDiv: "/", ast.Mod: "%"}
_COMPARE = {ast.Eq: "==", ast.NotEq: "!=", ast.Lt: "<", ast.LtE: "<=", ast.Gt: ">", ast.GtE: ">="}


def parse_expression(text: str, location: Optional[str] = None) -> Expr:
    """
    Parse an expression string.

    Args:
        text: Source such as ``"x + 1"`` or ``"t == 1 and z == 1"``
        location: Field path used in error messages

    Returns:
        Expression tree

    Raises:
        ModelSyntaxError: On malformed or unsupported syntax
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ModelSyntaxError(
            f"cannot parse expression {text!r}: {exc.msg}",
            column=exc.offset,
            location=location,
        ) from exc
    return _convert(tree.body, text, location)


def _convert(node: ast.AST, text: str, location: Optional[str]) -> Expr:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool):
            return BoolLiteral(node.value)
        if isinstance(node.value, int):
            return IntLiteral(node.value)
    elif isinstance(node, ast.Name):
        return VarRef(node.id)
    elif isinstance(node, ast.UnaryOp):
        operand = _convert(node.operand, text, location)
        if isinstance(node.op, ast.USub):
            return UnaryOp("-", operand)
        if isinstance(node.op, ast.UAdd):
            return operand
        if isinstance(node.op, ast.Not):
            return UnaryOp("not", operand)
    elif isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        return BinaryOp(
            _BINARY[type(node.op)],
            _convert(node.left, text, location),
            _convert(node.right, text, location),
        )
    elif isinstance(node, ast.Compare):
        # a < b < c becomes (a < b) and (b < c)
        parts = []
        left = _convert(node.left, text, location)
        for op, comparator in zip(node.ops, node.comparators):
            if type(op) not in _COMPARE:
                break
            right = _convert(comparator, text, location)
            parts.append(Comparison(_COMPARE[type(op)], left, right))
            left = right
        else:
            return parts[0] if len(parts) == 1 else BoolOp("and", tuple(parts))
    elif isinstance(node, ast.BoolOp):
        op = "and" if isinstance(node.op, ast.And) else "or"
        return BoolOp(op, tuple(_convert(v, text, location) for v in node.values))

    raise ModelSyntaxError(
        f"unsupported construct {type(node).__name__} in {text!r}",
        column=getattr(node, "col_offset", 0) + 1,
        location=location,
    )


def variables_of(expr: Expr) -> FrozenSet[str]:
    """Names referenced by an expression."""
    if isinstance(expr, VarRef):
        return frozenset((expr.name,))
    if isinstance(expr, UnaryOp):
        return variables_of(expr.operand)
    if isinstance(expr, (BinaryOp, Comparison)):
        return variables_of(expr.left) | variables_of(expr.right)
    if isinstance(expr, BoolOp):
        return frozenset().union(*(variables_of(o) for o in expr.operands))
    return frozenset()


def _div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _mod(a: int, b: int) -> int:
    return a - b * _div(a, b)


def evaluate(expr: Expr, env: Mapping[str, int]) -> Union[int, bool]:
    """
    Evaluate over a concrete valuation.

    Raises:
        ZeroDivisionError: On division or remainder by zero
        KeyError: If a referenced variable has no value
    """
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, BoolLiteral):
        return expr.value
    if isinstance(expr, VarRef):
        return env[expr.name]
    if isinstance(expr, UnaryOp):
        inner = evaluate(expr.operand, env)
        return (not inner) if expr.op == "not" else -int(inner)
    if isinstance(expr, BinaryOp):
        a = int(evaluate(expr.left, env))
        b = int(evaluate(expr.right, env))
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0:
            raise ZeroDivisionError(f"{expr.op} by zero")
        return _div(a, b) if expr.op == "/" else _mod(a, b)
    if isinstance(expr, Comparison):
        a = evaluate(expr.left, env)
        b = evaluate(expr.right, env)
        return {
            "==": a == b,
            "!=": a != b,
            "<": a < b,
            "<=": a <= b,
            ">": a > b,
            ">=": a >= b,
        }[expr.op]
    if expr.op == "and":
        return all(evaluate(o, env) for o in expr.operands)
    return any(evaluate(o, env) for o in expr.operands)


@dataclass(frozen=True)
class LinearForm:
    """``constant + sum(coeff * var)`` with no zero coefficients."""

    coefficients: Tuple[Tuple[str, int], ...]
    constant: int

    @property
    def is_constant(self) -> bool:
        return not self.coefficients


def linear_form(expr: Expr) -> Optional[LinearForm]:
    """
    Normalize an integer expression to a linear form.

    Returns:
        The linear form, or ``None`` for non-linear or non-integer expressions
    """
    result = _linear(expr)
    if result is None:
        return None
    coefficients, constant = result
    return LinearForm(tuple(sorted((v, c) for v, c in coefficients.items() if c != 0)), constant)


def _linear(expr: Expr) -> Optional[Tuple[Dict[str, int], int]]:
    if isinstance(expr, IntLiteral):
        return {}, expr.value
    if isinstance(expr, VarRef):
        return {expr.name: 1}, 0
    if isinstance(expr, UnaryOp) and expr.op == "-":
        inner = _linear(expr.operand)
        if inner is None:
            return None
        return {v: -c for v, c in inner[0].items()}, -inner[1]
    if isinstance(expr, BinaryOp):
        left = _linear(expr.left)
        right = _linear(expr.right)
        if left is None or right is None:
            return None
        if expr.op in ("+", "-"):
            sign = 1 if expr.op == "+" else -1
            merged = dict(left[0])
            for v, c in right[0].items():
                merged[v] = merged.get(v, 0) + sign * c
            return merged, left[1] + sign * right[1]
        if expr.op == "*":
            if not left[0]:
                return {v: left[1] * c for v, c in right[0].items()}, left[1] * right[1]
            if not right[0]:
                return {v: right[1] * c for v, c in left[0].items()}, left[1] * right[1]
            return None
        if not left[0] and not right[0] and right[1] != 0:
            op = _div if expr.op == "/" else _mod
            return {}, op(left[1], right[1])
    return None


_PRECEDENCE = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_ATOM = 8


def _precedence(expr: Expr) -> int:
    if isinstance(expr, BinaryOp):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Comparison):
        return _PRECEDENCE["cmp"]
    if isinstance(expr, BoolOp):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, UnaryOp):
        return _PRECEDENCE["not"] if expr.op == "not" else 7
    if isinstance(expr, IntLiteral) and expr.value < 0:
        return 7
    return _ATOM


def render_expression(expr: Expr) -> str:
    """Render back to parseable source with the fewest parentheses."""
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, BoolLiteral):
        return "True" if expr.value else "False"
    if isinstance(expr, VarRef):
        return expr.name
    own = _precedence(expr)
    if isinstance(expr, UnaryOp):
        inner = _wrap(expr.operand, own)
        return f"not {inner}" if expr.op == "not" else f"-{inner}"
    if isinstance(expr, BinaryOp):
        # left-associative: an equal-precedence right operand keeps its parentheses
        return f"{_wrap(expr.left, own)} {expr.op} {_wrap(expr.right, own + 1)}"
    if isinstance(expr, Comparison):
        return f"{_wrap(expr.left, own + 1)} {expr.op} {_wrap(expr.right, own + 1)}"
    return f" {expr.op} ".join(_wrap(o, own + 1) for o in expr.operands)


def _wrap(expr: Expr, minimum: int) -> str:
    text = render_expression(expr)
    return f"({text})" if _precedence(expr) < minimum else text
