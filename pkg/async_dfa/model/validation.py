"""
Structural checks for the assumptions the engines rely on.

``validate`` never raises; each diagnostic names the assumption it breaks and
the engines it disables. Callers decide whether to refuse a run.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, List

import networkx as nx

from ..models import ALL_ENGINES, EngineType
from .actions import Receive
from .system import Model


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    assumption: str
    disabled_engines: FrozenSet[EngineType] = field(default_factory=frozenset)
    location: str = ""

    @property
    def is_warning(self) -> bool:
        return not self.disabled_engines

    def disables(self, engine: EngineType) -> bool:
        return engine in self.disabled_engines

    def render(self) -> str:
        engines = ", ".join(sorted(e.value for e in self.disabled_engines)) or "none"
        where = f" [{self.location}]" if self.location else ""
        return f"{self.code}: {self.message}{where} (disables: {engines})"


_FORWARD_ONLY = frozenset({EngineType.FORWARD, EngineType.JOP})
_BACKWARD_ONLY = frozenset({EngineType.BACKWARD})


def validate(model: Model) -> List[Diagnostic]:
    """
    Check a parsed model against the engine assumptions.

    Args:
        model: Parsed model (possibly with ``check=False``)

    Returns:
        Diagnostics in a stable order (empty iff every assumption holds)
    """
    diagnostics: List[Diagnostic] = []

    if model.has_procedures:
        diagnostics.append(
            Diagnostic(
                code="PROCEDURES_PRESENT",
                message="forward engine unsupported: procedures present",
                assumption="forward and jop engines analyze procedure-free systems",
                disabled_engines=_FORWARD_ONLY,
            )
        )

    owners = model.owners
    if len(owners) > 1:
        diagnostics.append(
            Diagnostic(
                code="MULTIPLE_PROCEDURE_OWNERS",
                message=f"processes {', '.join(owners)} all call procedures",
                assumption="exactly one process may own procedures",
                disabled_engines=ALL_ENGINES,
            )
        )

    if owners and len(model.processes) > 1:
        diagnostics.append(
            Diagnostic(
                code="PROCEDURE_SUSPENDS_OTHERS",
                message=(
                    f"processes other than {', '.join(owners)} do not move while a procedure runs; "
                    "interleavings during calls are not analyzed"
                ),
                assumption="a procedure call completes before any other process moves",
            )
        )

    called = {t.call for _, t in model.edges() if t.call is not None}
    for proc in model.procedures:
        location = f"procedure {proc.name}"
        receives = [t for t in proc.edges if isinstance(t.action, Receive)]
        if receives:
            first = receives[0]
            diagnostics.append(
                Diagnostic(
                    code="RECEIVE_IN_PROCEDURE",
                    message=(
                        f"procedure {proc.name} receives on {first.source} -> {first.target}; "
                        "non-main procedures must not contain receive operations"
                    ),
                    assumption="non-main procedures contain no receive operations",
                    disabled_engines=_BACKWARD_ONLY,
                    location=location,
                )
            )

        body = nx.DiGraph()
        body.add_nodes_from(proc.nodes)
        body.add_edges_from((t.source, t.target) for t in proc.edges)
        if not nx.is_directed_acyclic_graph(body):
            cycle = " -> ".join(u for u, _ in nx.find_cycle(body))
            diagnostics.append(
                Diagnostic(
                    code="LOOP_IN_PROCEDURE",
                    message=f"procedure {proc.name} has a loop through {cycle}",
                    assumption="non-main procedures are loop-free (recursion is allowed)",
                    disabled_engines=_BACKWARD_ONLY,
                    location=location,
                )
            )
        elif not nx.has_path(body, proc.entry, proc.exit):
            diagnostics.append(
                Diagnostic(
                    code="EXIT_UNREACHABLE",
                    message=f"procedure {proc.name} cannot reach {proc.exit} from {proc.entry}",
                    assumption="every procedure can return",
                    location=location,
                )
            )

        if proc.name not in called:
            diagnostics.append(
                Diagnostic(
                    code="UNCALLED_PROCEDURE",
                    message=f"procedure {proc.name} is never called",
                    assumption="declared procedures are reachable",
                    location=location,
                )
            )

    for channel, message in sorted(model.received_pairs() - model.sent_pairs()):
        diagnostics.append(
            Diagnostic(
                code="RECEIVE_WITHOUT_SEND",
                message=f"{channel} ? {message} is received but never sent",
                assumption="every received (channel, message) pair is sent somewhere",
                disabled_engines=ALL_ENGINES,
            )
        )

    return diagnostics


def diagnostics_for(model: Model, engine: EngineType) -> List[Diagnostic]:
    """Diagnostics that disable a particular engine."""
    return [d for d in validate(model) if d.disables(engine)]


def blocking_diagnostics(model: Model) -> List[Diagnostic]:
    """
    Diagnostics that together leave no engine able to analyze the model.

    Returns:
        Every engine-disabling diagnostic if their union covers all engines,
        otherwise an empty list
    """
    disabling = [d for d in validate(model) if d.disabled_engines]
    covered = frozenset().union(*(d.disabled_engines for d in disabling))
    return disabling if covered >= ALL_ENGINES else []
