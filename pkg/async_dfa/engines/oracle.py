"""
Brute-force JOFP by bounded path enumeration.

Configurations (node, counters, call stack, value) are expanded breadth first
by path length under the concrete counter semantics: an intra edge is taken
only when no counter drops below zero, a return edge only when it matches the
innermost pending call. Used by the test suites as ground truth.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from ..config import AnalysisSettings
from ..domains import CpEnv, CpLattice, FormulaAlgebra
from ..errors import AnalysisAbortedError, ContractViolationError
from ..logging_config import get_logger
from ..vcfg import AnalyzableGraph, EdgeKind

logger = get_logger(__name__)

ORACLE = "oracle"

_State = Tuple[str, Tuple[int, ...], Tuple[int, ...], CpEnv]


@dataclass
class EnumerationResult:
    """
    Per-node join of the values of all feasible paths up to ``max_len + window`` edges.

    ``saturated`` is set when the last ``window`` lengths changed no node's value.
    """

    values: Dict[str, CpEnv]
    saturated: bool
    paths_visited: int
    max_len: int
    window: int
    statistics: Dict[str, int] = field(default_factory=dict)

    def value(self, node: str) -> CpEnv:
        return self.values[node]

    def join_over(self, nodes: Iterable[str]) -> CpEnv:
        items = [self.values[n] for n in nodes]
        if not items:
            raise ContractViolationError("join_over", "empty node set")
        return CpLattice(items[0].variables).join_all(items)


def enumerate_jofp(
    graph: AnalyzableGraph,
    d0: Optional[CpEnv] = None,
    max_len: int = 60,
    window: Optional[int] = None,
    settings: Optional[AnalysisSettings] = None,
) -> EnumerationResult:
    """
    Enumerate feasible paths from the start node.

    A configuration is dropped when its value is already dominated by the
    join of the values seen with the same node, counters (clamped at the
    length bound) and call stack. Dominance pruning is only used for LCP and
    CCP graphs, whose functions distribute over joins; CP graphs prune exact
    repeats only.

    Args:
        graph: VCFG with attached transfer functions
        d0: Entry value (initial valuation by default)
        max_len: Path length at which results are compared
        window: Extra lengths explored to detect saturation (settings default)
        settings: Supplies the window, call-depth cap and iteration cap

    Raises:
        AnalysisAbortedError: If more configurations than the iteration cap are visited
    """
    settings = settings or AnalysisSettings()
    window = settings.oracle_window if window is None else window
    vcfg = graph.vcfg
    algebra = graph.algebra
    lattice = CpLattice(vcfg.variables)
    entry = d0 if d0 is not None else graph.initial_value()
    bound = max_len + window
    dominance = isinstance(algebra, FormulaAlgebra)
    call_of_return = {s.return_edge.index: s.call_edge.index for s in vcfg.call_sites}

    values: Dict[str, CpEnv] = {n: lattice.bottom() for n in vcfg.nodes}
    values[vcfg.start] = entry
    joined_at: Dict[Tuple[str, Tuple[int, ...], Tuple[int, ...]], CpEnv] = {}
    exact_at: Dict[Tuple[str, Tuple[int, ...], Tuple[int, ...]], Set[CpEnv]] = {}

    def admit(node: str, counters: Tuple[int, ...], stack: Tuple[int, ...], value: CpEnv) -> bool:
        key = (node, tuple(min(c, bound) for c in counters), stack)
        if dominance:
            seen = joined_at.get(key)
            if seen is not None and lattice.leq(value, seen):
                return False
            joined_at[key] = value if seen is None else lattice.join(seen, value)
            return True
        bucket = exact_at.setdefault(key, set())
        if value in bucket:
            return False
        bucket.add(value)
        return True

    frontier: List[_State] = [(vcfg.start, vcfg.zero, (), entry)]
    admit(vcfg.start, vcfg.zero, (), entry)
    visited = 1
    snapshot: Optional[Dict[str, CpEnv]] = dict(values) if max_len == 0 else None

    for length in range(1, bound + 1):
        successors: List[_State] = []
        for node, counters, stack, value in frontier:
            for e in vcfg.out_edges(node):
                if e.kind == EdgeKind.CALL:
                    if len(stack) >= settings.call_depth:
                        continue
                    next_counters, next_stack = counters, stack + (e.index,)
                elif e.kind == EdgeKind.RETURN:
                    if not stack or call_of_return[e.index] != stack[-1]:
                        continue
                    next_counters, next_stack = counters, stack[:-1]
                else:
                    moved = tuple(c + w for c, w in zip(counters, e.vector))
                    if any(c < 0 for c in moved):
                        continue
                    next_counters, next_stack = moved, stack
                next_value = algebra.apply(graph.function(e), value)  # type: ignore[arg-type]
                if next_value.is_unreachable:
                    continue
                if not admit(e.target, next_counters, next_stack, next_value):
                    continue
                values[e.target] = lattice.join(values[e.target], next_value)
                successors.append((e.target, next_counters, next_stack, next_value))
        visited += len(successors)
        if visited > settings.max_iterations:
            raise AnalysisAbortedError(
                ORACLE, f"more than {settings.max_iterations} configurations", {"length": length}
            )
        frontier = successors
        if length == max_len:
            snapshot = dict(values)
        if not frontier:
            break

    if snapshot is None:
        snapshot = dict(values)
    saturated = all(lattice.equals(snapshot[n], values[n]) for n in vcfg.nodes)
    logger.debug(
        f"Enumerated {visited} configurations up to length {bound}, saturated={saturated}",
        extra={"engine": ORACLE, "domain": graph.domain},
    )
    return EnumerationResult(
        values=values,
        saturated=saturated,
        paths_visited=visited,
        max_len=max_len,
        window=window,
        statistics={"configurations": visited},
    )
