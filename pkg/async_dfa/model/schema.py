"""
Model file schema (version 1).

These pydantic documents mirror the JSON layout one-to-one; name resolution
and action parsing happen afterwards in ``system.py``. See
docs/MODEL_SCHEMA.md for the prose description.
"""

import re
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = 1

_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _check_identifier(value: str) -> str:
    if not _IDENTIFIER.match(value):
        raise ValueError(f"'{value}' is not an identifier (letters, digits, underscore)")
    return value


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class TransitionDoc(_Document):
    """One edge: exactly one of ``action`` or ``call``."""

    source: str = Field(..., alias="from", description="Source control state")
    target: str = Field(..., alias="to", description="Target control state")
    action: Optional[str] = Field(None, description="Action string, e.g. 'x := x+1'")
    call: Optional[str] = Field(None, description="Called procedure name")

    @model_validator(mode="after")
    def exactly_one_label(self) -> "TransitionDoc":
        """Reject edges with both or neither of action/call."""
        if (self.action is None) == (self.call is None):
            raise ValueError("a transition needs exactly one of 'action' or 'call'")
        return self


class VariableDoc(_Document):
    name: str
    init: int = Field(0, description="Initial integer value")

    @field_validator("name")
    @classmethod
    def name_is_identifier(cls, v: str) -> str:
        return _check_identifier(v)


class ProcessDoc(_Document):
    name: str
    initial: str
    states: List[str] = Field(..., min_length=1)
    transitions: List[TransitionDoc] = Field(default_factory=list)

    @field_validator("name")
    @classmethod
    def name_is_identifier(cls, v: str) -> str:
        return _check_identifier(v)

    @field_validator("states")
    @classmethod
    def states_are_identifiers(cls, v: List[str]) -> List[str]:
        return [_check_identifier(s) for s in v]


class ProcedureDoc(_Document):
    name: str
    entry: str
    exit: str
    nodes: List[str] = Field(..., min_length=1)
    edges: List[TransitionDoc] = Field(default_factory=list)

    @field_validator("name")
    @classmethod
    def name_is_identifier(cls, v: str) -> str:
        return _check_identifier(v)

    @field_validator("nodes")
    @classmethod
    def nodes_are_identifiers(cls, v: List[str]) -> List[str]:
        return [_check_identifier(s) for s in v]


class AssertionDoc(_Document):
    process: str
    state: str
    expr: str


class ModelDocument(_Document):
    """Top-level model file."""

    schema_version: Literal[1] = Field(..., description="Schema version (must be 1)")
    channels: List[str] = Field(default_factory=list)
    messages: List[str] = Field(default_factory=list)
    variables: List[VariableDoc] = Field(default_factory=list)
    processes: List[ProcessDoc] = Field(..., min_length=1)
    procedures: List[ProcedureDoc] = Field(default_factory=list)
    assertions: List[AssertionDoc] = Field(default_factory=list)

    @field_validator("channels", "messages")
    @classmethod
    def names_are_identifiers(cls, v: List[str]) -> List[str]:
        return [_check_identifier(s) for s in v]
