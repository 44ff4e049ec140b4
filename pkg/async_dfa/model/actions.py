"""Transition actions and their textual syntax."""

import re
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple, Union

from ..errors import ModelSyntaxError
from .expressions import Expr, parse_expression, render_expression, variables_of

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_SEND = re.compile(rf"^({_IDENT})\s*!\s*({_IDENT})$")
_RECEIVE = re.compile(rf"^({_IDENT})\s*\?\s*({_IDENT})$")
_ASSIGN = re.compile(rf"^({_IDENT})\s*:=\s*(.+)$", re.DOTALL)


@dataclass(frozen=True)
class Skip:
    def used_variables(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True)
class Assign:
    """Sequential assignments ``v1 := e1; v2 := e2``; later ones see earlier results."""

    assignments: Tuple[Tuple[str, Expr], ...]

    def used_variables(self) -> FrozenSet[str]:
        return frozenset().union(*(variables_of(e) for _, e in self.assignments))

    @property
    def targets(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.assignments)


@dataclass(frozen=True)
class Send:
    channel: str
    message: str

    def used_variables(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True)
class Receive:
    channel: str
    message: str

    def used_variables(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True)
class Assume:
    """Guard kept for readability; every domain analyzes it as ``skip``."""

    condition: Expr

    def used_variables(self) -> FrozenSet[str]:
        return variables_of(self.condition)


Action = Union[Skip, Assign, Send, Receive, Assume]

SKIP = Skip()


def parse_action(text: str, location: Optional[str] = None) -> Action:
    """
    Parse an action string.

    Accepted forms: ``skip``, ``c ! m``, ``c ? m``, ``assume <expr>`` and
    ``x := <expr>`` optionally chained with ``;``.

    Raises:
        ModelSyntaxError: If the string matches none of the forms
    """
    source = text.strip()
    if source == "skip":
        return SKIP
    match = _SEND.match(source)
    if match:
        return Send(match.group(1), match.group(2))
    match = _RECEIVE.match(source)
    if match:
        return Receive(match.group(1), match.group(2))
    if source.startswith("assume ") or source.startswith("assume("):
        return Assume(parse_expression(source[len("assume"):], location))
    if ":=" in source:
        assignments = []
        for part in source.split(";"):
            part = part.strip()
            if not part:
                continue
            match = _ASSIGN.match(part)
            if not match:
                raise ModelSyntaxError(
                    f"malformed assignment {part!r}",
                    column=source.find(part) + 1,
                    location=location,
                )
            assignments.append((match.group(1), parse_expression(match.group(2), location)))
        return Assign(tuple(assignments))
    raise ModelSyntaxError(
        f"unrecognized action {text!r} (expected skip, c ! m, c ? m, assume e or x := e)",
        column=1,
        location=location,
    )


def render_action(action: Action) -> str:
    """Inverse of ``parse_action``."""
    if isinstance(action, Skip):
        return "skip"
    if isinstance(action, Send):
        return f"{action.channel} ! {action.message}"
    if isinstance(action, Receive):
        return f"{action.channel} ? {action.message}"
    if isinstance(action, Assume):
        return f"assume {render_expression(action.condition)}"
    return "; ".join(f"{v} := {render_expression(e)}" for v, e in action.assignments)
