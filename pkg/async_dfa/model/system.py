"""
Resolved system model and its textual form.

``parse_model`` turns schema-v1 JSON text into an immutable ``Model`` with
every name checked; ``render_model`` writes it back.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterator, Optional, Sequence, Tuple

from pydantic import ValidationError as SchemaError

from ..errors import (
    DuplicateDeclarationError,
    ModelSyntaxError,
    ModelValidationError,
    UnknownIdentifierError,
)
from ..logging_config import get_logger
from .actions import Action, Assign, Receive, Send, parse_action, render_action
from .expressions import Expr, parse_expression, render_expression, variables_of
from .schema import SCHEMA_VERSION, ModelDocument, TransitionDoc

logger = get_logger(__name__)


@dataclass(frozen=True)
class Variable:
    name: str
    init: int = 0


@dataclass(frozen=True)
class Transition:
    """Edge of a process or procedure body; ``call`` edges carry no action."""

    source: str
    target: str
    action: Optional[Action] = None
    call: Optional[str] = None

    @property
    def is_call(self) -> bool:
        return self.call is not None

    def used_variables(self) -> FrozenSet[str]:
        return self.action.used_variables() if self.action is not None else frozenset()


@dataclass(frozen=True)
class Process:
    name: str
    initial: str
    states: Tuple[str, ...]
    transitions: Tuple[Transition, ...]

    def outgoing(self, state: str) -> Tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.source == state)

    @property
    def calls(self) -> Tuple[str, ...]:
        return tuple(t.call for t in self.transitions if t.call is not None)


@dataclass(frozen=True)
class Procedure:
    """Non-main procedure body owned by the single procedure-owning process."""

    name: str
    entry: str
    exit: str
    nodes: Tuple[str, ...]
    edges: Tuple[Transition, ...]

    def qualified(self, node: str) -> str:
        return f"{self.name}.{node}"


@dataclass(frozen=True)
class Assertion:
    process: str
    state: str
    expression: Expr

    @property
    def text(self) -> str:
        return render_expression(self.expression)

    @property
    def variables(self) -> FrozenSet[str]:
        return variables_of(self.expression)


@dataclass(frozen=True)
class Model:
    """Fully resolved asynchronous system; declaration order is preserved."""

    channels: Tuple[str, ...]
    messages: Tuple[str, ...]
    variables: Tuple[Variable, ...]
    processes: Tuple[Process, ...]
    procedures: Tuple[Procedure, ...] = ()
    assertions: Tuple[Assertion, ...] = ()
    schema_version: int = SCHEMA_VERSION
    name: str = field(default="model", compare=False)

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def initial_values(self) -> Dict[str, int]:
        return {v.name: v.init for v in self.variables}

    @property
    def has_procedures(self) -> bool:
        return bool(self.procedures) or any(p.calls for p in self.processes)

    @property
    def owners(self) -> Tuple[str, ...]:
        """Processes whose main body calls procedures."""
        return tuple(p.name for p in self.processes if p.calls)

    def process(self, name: str) -> Process:
        for p in self.processes:
            if p.name == name:
                return p
        raise UnknownIdentifierError("process", name, known=[p.name for p in self.processes])

    def procedure(self, name: str) -> Procedure:
        for p in self.procedures:
            if p.name == name:
                return p
        raise UnknownIdentifierError("procedure", name, known=[p.name for p in self.procedures])

    def states_of(self, process: str) -> Tuple[str, ...]:
        """Control states of a process; the owner also has qualified procedure nodes."""
        states = self.process(process).states
        if process in self.owners:
            states += tuple(proc.qualified(n) for proc in self.procedures for n in proc.nodes)
        return states

    def edges(self) -> Iterator[Tuple[str, Transition]]:
        """Every transition with a readable location, processes first."""
        for p in self.processes:
            for t in p.transitions:
                yield f"process {p.name}", t
        for proc in self.procedures:
            for t in proc.edges:
                yield f"procedure {proc.name}", t

    def sent_pairs(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset(
            (t.action.channel, t.action.message)
            for _, t in self.edges()
            if isinstance(t.action, Send)
        )

    def received_pairs(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset(
            (t.action.channel, t.action.message)
            for _, t in self.edges()
            if isinstance(t.action, Receive)
        )


# ========================================================================
# PARSING
# ========================================================================


def _check_unique(names: Sequence[str], kind: str, scope: Optional[str] = None) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateDeclarationError(kind, name, scope)
        seen.add(name)


def _require(name: str, known: Sequence[str], kind: str, location: str) -> None:
    if name not in known:
        raise UnknownIdentifierError(kind, name, location, known=list(known))


class _Resolver:
    """Checks names while converting schema documents into model objects."""

    def __init__(self, doc: ModelDocument) -> None:
        self.doc = doc
        self.variables = [v.name for v in doc.variables]
        self.procedures = [p.name for p in doc.procedures]

    def action(self, text: str, location: str) -> Action:
        action = parse_action(text, location)
        for var in sorted(action.used_variables()):
            _require(var, self.variables, "variable", location)
        if isinstance(action, Assign):
            for var in action.targets:
                _require(var, self.variables, "variable", location)
        if isinstance(action, (Send, Receive)):
            _require(action.channel, self.doc.channels, "channel", location)
            _require(action.message, self.doc.messages, "message", location)
        return action

    def transition(self, doc: TransitionDoc, states: Sequence[str], location: str) -> Transition:
        _require(doc.source, states, "state", location)
        _require(doc.target, states, "state", location)
        if doc.call is not None:
            _require(doc.call, self.procedures, "procedure", location)
            return Transition(doc.source, doc.target, call=doc.call)
        assert doc.action is not None
        return Transition(doc.source, doc.target, action=self.action(doc.action, location))


def parse_model(text: str, name: str = "model", check: bool = True) -> Model:
    """
    Parse and resolve a schema-v1 model.

    Args:
        text: JSON model source
        name: Display name used in reports
        check: Also run ``validate`` and reject models no engine can analyze

    Returns:
        Resolved model

    Raises:
        ModelSyntaxError: Malformed JSON or action/expression text
        ModelValidationError: Schema violations, or (with ``check``) diagnostics
            that disable every engine
        UnknownIdentifierError: Reference to an undeclared name
        DuplicateDeclarationError: Name declared twice
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, line=exc.lineno, column=exc.colno) from exc

    try:
        doc = ModelDocument.model_validate(data)
    except SchemaError as exc:
        problems = [
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in exc.errors()
        ]
        raise ModelValidationError(problems) from exc

    _check_unique(doc.channels, "channel")
    _check_unique(doc.messages, "message")
    _check_unique([v.name for v in doc.variables], "variable")
    _check_unique([p.name for p in doc.processes], "process")
    _check_unique([p.name for p in doc.procedures], "procedure")

    resolver = _Resolver(doc)

    processes = []
    for i, pdoc in enumerate(doc.processes):
        _check_unique(pdoc.states, "state", f"process {pdoc.name}")
        _require(pdoc.initial, pdoc.states, "state", f"processes[{i}].initial")
        transitions = tuple(
            resolver.transition(t, pdoc.states, f"processes[{i}].transitions[{j}]")
            for j, t in enumerate(pdoc.transitions)
        )
        processes.append(Process(pdoc.name, pdoc.initial, tuple(pdoc.states), transitions))

    procedures = []
    for i, fdoc in enumerate(doc.procedures):
        _check_unique(fdoc.nodes, "node", f"procedure {fdoc.name}")
        _require(fdoc.entry, fdoc.nodes, "node", f"procedures[{i}].entry")
        _require(fdoc.exit, fdoc.nodes, "node", f"procedures[{i}].exit")
        edges = tuple(
            resolver.transition(t, fdoc.nodes, f"procedures[{i}].edges[{j}]")
            for j, t in enumerate(fdoc.edges)
        )
        procedures.append(
            Procedure(fdoc.name, fdoc.entry, fdoc.exit, tuple(fdoc.nodes), edges)
        )

    draft = Model(
        channels=tuple(doc.channels),
        messages=tuple(doc.messages),
        variables=tuple(Variable(v.name, v.init) for v in doc.variables),
        processes=tuple(processes),
        procedures=tuple(procedures),
        name=name,
    )

    assertions = []
    for i, adoc in enumerate(doc.assertions):
        location = f"assertions[{i}]"
        _require(adoc.process, [p.name for p in processes], "process", location)
        _require(adoc.state, draft.states_of(adoc.process), "state", location)
        expression = parse_expression(adoc.expr, location)
        for var in sorted(variables_of(expression)):
            _require(var, resolver.variables, "variable", location)
        assertions.append(Assertion(adoc.process, adoc.state, expression))

    model = replace(draft, assertions=tuple(assertions))

    if check:
        from .validation import blocking_diagnostics

        blocking = blocking_diagnostics(model)
        if blocking:
            raise ModelValidationError(blocking)

    logger.debug("Parsed model", extra={"model": name})
    return model


def load_model(path: Path, check: bool = True) -> Model:
    """Read and parse a model file; the file stem becomes the model name."""
    return parse_model(path.read_text(encoding="utf-8"), name=path.stem, check=check)


# ========================================================================
# RENDERING
# ========================================================================


def _transition_doc(t: Transition) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"from": t.source, "to": t.target}
    if t.call is not None:
        doc["call"] = t.call
    else:
        assert t.action is not None
        doc["action"] = render_action(t.action)
    return doc


def render_model(model: Model) -> str:
    """Schema-v1 JSON text; ``parse_model(render_model(m)) == m``."""
    doc: Dict[str, Any] = {
        "schema_version": model.schema_version,
        "channels": list(model.channels),
        "messages": list(model.messages),
        "variables": [{"name": v.name, "init": v.init} for v in model.variables],
        "processes": [
            {
                "name": p.name,
                "initial": p.initial,
                "states": list(p.states),
                "transitions": [_transition_doc(t) for t in p.transitions],
            }
            for p in model.processes
        ],
        "procedures": [
            {
                "name": f.name,
                "entry": f.entry,
                "exit": f.exit,
                "nodes": list(f.nodes),
                "edges": [_transition_doc(t) for t in f.edges],
            }
            for f in model.procedures
        ],
        "assertions": [
            {"process": a.process, "state": a.state, "expr": a.text} for a in model.assertions
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
