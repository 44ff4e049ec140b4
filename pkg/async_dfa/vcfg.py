"""
VASS control-flow graphs.

``build_vcfg`` forms the product of the processes' control states (breadth
first from the initial tuple), gives each sent (channel, message) pair a
counter, and adds call/return edges for the procedure-owning process. A
``Vcfg`` is immutable once built; ``attach_domain`` pairs it with transfer
functions for one abstract domain.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from .config import DEFAULT_MAX_NODES
from .domains import Algebra, CpEnv, get_algebra
from .errors import ModelValidationError, StateSpaceLimitError, UnknownIdentifierError
from .lattice import TransferAlgebra, ptf_of
from .logging_config import get_logger
from .model.actions import SKIP, Action, Receive, Send, render_action
from .model.system import Model, Transition
from .models import DomainType

logger = get_logger(__name__)


class EdgeKind(str, Enum):
    INTRA = "intra"
    CALL = "call"
    RETURN = "return"


@dataclass(frozen=True)
class VcfgEdge:
    """Edge with its action and queuing vector; ``index`` is its position in ``Vcfg.edges``."""

    index: int
    source: str
    target: str
    action: Action
    vector: Tuple[int, ...]
    kind: EdgeKind = EdgeKind.INTRA
    process: Optional[str] = None
    callee: Optional[str] = None

    @property
    def has_receive(self) -> bool:
        return any(w < 0 for w in self.vector)

    def label(self) -> str:
        return f"{render_action(self.action)} / ⟨{','.join(str(w) for w in self.vector)}⟩"


@dataclass(frozen=True)
class CallSite:
    """Matching call and return edges of one call transition."""

    call_edge: VcfgEdge
    return_edge: VcfgEdge
    callee: str
    caller: Optional[str] = None  # procedure containing the call, None for main bodies

    @property
    def call_node(self) -> str:
        return self.call_edge.source

    @property
    def return_node(self) -> str:
        return self.return_edge.target


@dataclass(frozen=True)
class ProcedureLayout:
    name: str
    entry: str
    exit: str
    nodes: Tuple[str, ...]


def _by_index(triples: Iterable[Tuple[str, str, VcfgEdge]]) -> Tuple[VcfgEdge, ...]:
    return tuple(sorted((e for _, _, e in triples), key=lambda e: e.index))


def render_node_sequence(labels: Sequence[str]) -> str:
    """``hijk`` when every label is one character, ``s1 s2 s3`` otherwise."""
    if all(len(label) == 1 for label in labels):
        return "".join(labels)
    return " ".join(labels)


class Vcfg:
    """
    Immutable (inter-procedural) VCFG.

    Args:
        nodes: Node ids in canonical order
        edges: Edges; ``edges[i].index`` must equal ``i``
        counters: (channel, message) per counter, in counter order
        start: Start node
        variables: Variable universe
        initial_values: Initial valuation (missing variables start at 0)
        labels: Display label per node (defaults to the id)
        components: Per node, the control state of each process
        process_states: Addressable control states per process
        procedures: Procedure layouts
        call_sites: Call/return correspondence
    """

    def __init__(
        self,
        nodes: Sequence[str],
        edges: Sequence[VcfgEdge],
        counters: Sequence[Tuple[str, str]],
        start: str,
        variables: Sequence[str] = (),
        initial_values: Optional[Mapping[str, int]] = None,
        labels: Optional[Mapping[str, str]] = None,
        components: Optional[Mapping[str, Mapping[str, str]]] = None,
        process_states: Optional[Mapping[str, Sequence[str]]] = None,
        procedures: Sequence[ProcedureLayout] = (),
        call_sites: Sequence[CallSite] = (),
    ) -> None:
        self.nodes: Tuple[str, ...] = tuple(nodes)
        self.edges: Tuple[VcfgEdge, ...] = tuple(edges)
        self.counters: Tuple[Tuple[str, str], ...] = tuple(counters)
        self.start = start
        self.variables: Tuple[str, ...] = tuple(variables)
        self.initial_values: Dict[str, int] = {
            v: (initial_values or {}).get(v, 0) for v in self.variables
        }
        self.labels: Dict[str, str] = {n: (labels or {}).get(n, n) for n in self.nodes}
        self.components: Dict[str, Dict[str, str]] = {
            n: dict((components or {}).get(n, {})) for n in self.nodes
        }
        self.process_states: Dict[str, Tuple[str, ...]] = {
            p: tuple(states) for p, states in (process_states or {}).items()
        }
        self.procedures: Dict[str, ProcedureLayout] = {p.name: p for p in procedures}
        self.call_sites: Tuple[CallSite, ...] = tuple(call_sites)
        self.counter_index: Dict[Tuple[str, str], int] = {
            pair: i for i, pair in enumerate(self.counters)
        }
        self._check()

        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(self.nodes)
        for e in self.edges:
            self.graph.add_edge(e.source, e.target, key=e.index, edge=e)

        self._outgoing: Dict[str, Tuple[VcfgEdge, ...]] = {}
        self._arriving: Dict[str, Tuple[VcfgEdge, ...]] = {}
        self._incoming: Dict[str, Dict[EdgeKind, Tuple[VcfgEdge, ...]]] = {}
        for n in self.nodes:
            self._outgoing[n] = _by_index(self.graph.out_edges(n, data="edge"))
            arriving = _by_index(self.graph.in_edges(n, data="edge"))
            self._arriving[n] = arriving
            self._incoming[n] = {k: tuple(e for e in arriving if e.kind == k) for k in EdgeKind}
        self._site_by_return = {s.return_edge.index: s for s in self.call_sites}

    def _check(self) -> None:
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node ids")
        if self.start not in known:
            raise ValueError(f"start node {self.start!r} is not a node")
        r = len(self.counters)
        for i, e in enumerate(self.edges):
            if e.index != i:
                raise ValueError(f"edge {i} carries index {e.index}")
            if e.source not in known or e.target not in known:
                raise ValueError(f"edge {i} has an endpoint outside the graph")
            if len(e.vector) != r:
                raise ValueError(f"edge {i} vector has length {len(e.vector)}, expected {r}")
            if e.kind != EdgeKind.INTRA and any(e.vector):
                raise ValueError(f"{e.kind.value} edge {i} must carry the zero vector")

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    @property
    def r(self) -> int:
        return len(self.counters)

    @property
    def zero(self) -> Tuple[int, ...]:
        return (0,) * self.r

    @property
    def has_procedures(self) -> bool:
        return bool(self.procedures) or any(e.kind != EdgeKind.INTRA for e in self.edges)

    def label(self, node: str) -> str:
        return self.labels[node]

    def in_edges(self, node: str, kind: Optional[EdgeKind] = None) -> Tuple[VcfgEdge, ...]:
        if kind is not None:
            return self._incoming[node][kind]
        return self._arriving[node]

    def out_edges(self, node: str) -> Tuple[VcfgEdge, ...]:
        return self._outgoing[node]

    def call_site_of(self, return_edge: VcfgEdge) -> CallSite:
        return self._site_by_return[return_edge.index]

    def reachable_nodes(self) -> Tuple[str, ...]:
        """Nodes with a (not necessarily feasible) path from the start."""
        reached = nx.descendants(self.graph, self.start) | {self.start}
        return tuple(n for n in self.nodes if n in reached)

    def initial_env(self) -> CpEnv:
        return CpEnv.of(self.variables, self.initial_values)

    def render_path(self, nodes: Sequence[str]) -> str:
        return render_node_sequence([self.labels[n] for n in nodes])

    def to_dot(self) -> str:
        """Graphviz text; call and return edges are dashed."""
        lines = ["digraph vcfg {"]
        for n in self.nodes:
            shape = "doublecircle" if n == self.start else "circle"
            lines.append(f'  "{n}" [label="{self.labels[n]}", shape={shape}];')
        for e in self.edges:
            style = "" if e.kind == EdgeKind.INTRA else ", style=dashed"
            label = e.label().replace('"', '\\"')
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{label}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Vcfg(nodes={len(self.nodes)}, edges={len(self.edges)}, r={self.r})"


# ========================================================================
# PRODUCT CONSTRUCTION
# ========================================================================


class _EdgeSink:
    """Collects edges with consecutive indices."""

    def __init__(self, counter_index: Mapping[Tuple[str, str], int]) -> None:
        self.counter_index = counter_index
        self.edges: List[VcfgEdge] = []

    def vector(self, action: Action) -> Tuple[int, ...]:
        vec = [0] * len(self.counter_index)
        if isinstance(action, (Send, Receive)):
            pair = (action.channel, action.message)
            if pair not in self.counter_index:
                raise ModelValidationError(
                    [f"{pair[0]} ? {pair[1]} is received but never sent"], engine=None
                )
            vec[self.counter_index[pair]] = 1 if isinstance(action, Send) else -1
        return tuple(vec)

    def add(
        self,
        source: str,
        target: str,
        action: Action,
        kind: EdgeKind = EdgeKind.INTRA,
        process: Optional[str] = None,
        callee: Optional[str] = None,
    ) -> VcfgEdge:
        vector = self.vector(action) if kind == EdgeKind.INTRA else (0,) * len(self.counter_index)
        edge = VcfgEdge(len(self.edges), source, target, action, vector, kind, process, callee)
        self.edges.append(edge)
        return edge


def build_vcfg(model: Model, max_nodes: int = DEFAULT_MAX_NODES) -> Vcfg:
    """
    Build the product VCFG of a model.

    Args:
        model: Parsed model
        max_nodes: Cap on product nodes

    Returns:
        Graph with canonical node/edge/counter order

    Raises:
        StateSpaceLimitError: If the product exceeds ``max_nodes``
    """
    counters = sorted(model.sent_pairs())
    sink = _EdgeSink({pair: i for i, pair in enumerate(counters)})
    owner = model.owners[0] if model.owners else None
    procedures = {p.name: p for p in model.procedures}

    def entry_id(name: str) -> str:
        return procedures[name].qualified(procedures[name].entry)

    def exit_id(name: str) -> str:
        return procedures[name].qualified(procedures[name].exit)

    call_sites: List[CallSite] = []

    def add_call(source: str, target: str, t: Transition, process: str, caller: Optional[str]) -> None:
        assert t.call is not None
        call = sink.add(source, entry_id(t.call), SKIP, EdgeKind.CALL, process, t.call)
        ret = sink.add(exit_id(t.call), target, SKIP, EdgeKind.RETURN, process, t.call)
        call_sites.append(CallSite(call, ret, t.call, caller))

    outgoing = [
        {s: p.outgoing(s) for s in p.states} for p in model.processes
    ]
    initial = tuple(p.initial for p in model.processes)
    seen: Dict[Tuple[str, ...], None] = {initial: None}
    queue = deque([initial])

    while queue:
        current = queue.popleft()
        source = "|".join(current)
        for i, process in enumerate(model.processes):
            for t in outgoing[i][current[i]]:
                successor = current[:i] + (t.target,) + current[i + 1:]
                if successor not in seen:
                    seen[successor] = None
                    if len(seen) > max_nodes:
                        raise StateSpaceLimitError(max_nodes, len(seen))
                    queue.append(successor)
                target = "|".join(successor)
                if t.call is not None:
                    add_call(source, target, t, process.name, None)
                else:
                    assert t.action is not None
                    sink.add(source, target, t.action, process=process.name)

    names = [p.name for p in model.processes]
    nodes = ["|".join(s) for s in seen]
    components: Dict[str, Dict[str, str]] = {
        "|".join(s): dict(zip(names, s)) for s in seen
    }
    labels = {n: n for n in nodes}

    layouts = []
    for proc in model.procedures:
        for n in proc.nodes:
            qualified = proc.qualified(n)
            nodes.append(qualified)
            labels[qualified] = n
            components[qualified] = {owner: qualified} if owner else {}
        for t in proc.edges:
            if t.call is not None:
                add_call(proc.qualified(t.source), proc.qualified(t.target), t, owner or "", proc.name)
            else:
                assert t.action is not None
                sink.add(proc.qualified(t.source), proc.qualified(t.target), t.action, process=owner)
        layouts.append(
            ProcedureLayout(
                proc.name,
                proc.qualified(proc.entry),
                proc.qualified(proc.exit),
                tuple(proc.qualified(n) for n in proc.nodes),
            )
        )

    vcfg = Vcfg(
        nodes=nodes,
        edges=sink.edges,
        counters=counters,
        start="|".join(initial),
        variables=model.variable_names,
        initial_values=model.initial_values,
        labels=labels,
        components=components,
        process_states={p.name: model.states_of(p.name) for p in model.processes},
        procedures=layouts,
        call_sites=call_sites,
    )
    logger.info(
        f"Built VCFG with {len(vcfg.nodes)} nodes, {len(vcfg.edges)} edges, r={vcfg.r}",
        extra={"model": model.name},
    )
    return vcfg


def target_set(vcfg: Vcfg, process: str, state: str) -> Tuple[str, ...]:
    """
    Nodes in which ``state`` is the control state of ``process``.

    Raises:
        UnknownIdentifierError: If the process or state is not declared
    """
    if process not in vcfg.process_states:
        raise UnknownIdentifierError("process", process, known=list(vcfg.process_states))
    if state not in vcfg.process_states[process]:
        raise UnknownIdentifierError(
            "state", state, f"process {process}", known=list(vcfg.process_states[process])
        )
    return tuple(n for n in vcfg.nodes if vcfg.components[n].get(process) == state)


# ========================================================================
# DOMAIN ATTACHMENT
# ========================================================================


@dataclass(frozen=True)
class AnalyzableGraph:
    """A VCFG whose edges carry transfer functions of one domain."""

    vcfg: Vcfg
    algebra: Algebra
    functions: Tuple[Any, ...]

    @property
    def domain(self) -> str:
        return self.algebra.name

    def function(self, edge: VcfgEdge) -> Any:
        return self.functions[edge.index]

    def ptf(self, edges: Iterable[VcfgEdge]) -> Any:
        return ptf_of((self.function(e) for e in edges), self.algebra)

    def initial_value(self) -> CpEnv:
        return self.vcfg.initial_env()


def attach_domain(
    vcfg: Vcfg,
    domain: Union[str, DomainType, TransferAlgebra[Any, Any]],
) -> AnalyzableGraph:
    """
    Replace every edge action with its transfer function.

    Args:
        vcfg: Graph to annotate (left unchanged)
        domain: Domain name or a ready algebra over ``vcfg.variables``
    """
    algebra = domain if isinstance(domain, TransferAlgebra) else get_algebra(domain, vcfg.variables)
    functions = tuple(algebra.from_action(e.action) for e in vcfg.edges)
    return AnalyzableGraph(vcfg, algebra, functions)  # type: ignore[arg-type]
