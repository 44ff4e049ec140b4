"""
Forward DFAS and the JOP baseline.

Forward DFAS runs Kildall's algorithm over maps from bounded queue
configurations (vectors in [0..Θ]^r, Θ meaning "Θ or more") to values. An
edge with queuing vector w moves the value at configuration c1 to every c2
with (c1, w, c2) in the bounded-move relation. JOP is the same fixpoint over
plain values with queuing vectors ignored.
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import (
    Callable,
    Deque,
    Dict,
    Generic,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

from ..config import AnalysisSettings
from ..domains import CpEnv, CpLattice
from ..errors import AnalysisAbortedError, ContractViolationError, UnsupportedEngineError
from ..logging_config import get_logger
from ..models import EngineType
from ..vcfg import AnalyzableGraph, VcfgEdge

logger = get_logger(__name__)

Vector = Tuple[int, ...]
T = TypeVar("T")


# ========================================================================
# BOUNDED MOVES
# ========================================================================


def bounded_move(p: int, q: int, s: int, theta: int) -> bool:
    """
    Whether count ``p`` may become ``s`` across a queuing entry ``q`` under bound Θ.

    (a) q ≥ 0, p+q ≤ Θ, s = p+q; (b) q ≥ 0, p+q > Θ, s = Θ;
    (c) q < 0, p = Θ, 0 ≤ s ≤ Θ, Θ-s ≤ -q; (d) q < 0, p < Θ, p+q ≥ 0, s = p+q.
    """
    if not (0 <= p <= theta and 0 <= s <= theta):
        return False
    if q >= 0:
        return s == p + q if p + q <= theta else s == theta
    if p == theta:
        return theta - s <= -q
    return p + q >= 0 and s == p + q


def _component_preds(s: int, q: int, theta: int) -> List[int]:
    return [p for p in range(theta + 1) if bounded_move(p, q, s, theta)]


def _component_succs(p: int, q: int, theta: int) -> List[int]:
    return [s for s in range(theta + 1) if bounded_move(p, q, s, theta)]


def bm_preds(c2: Sequence[int], w: Sequence[int], theta: int) -> List[Vector]:
    """
    Every c1 in [0..Θ]^r with (c1, w, c2) in the bounded-move relation.

    Raises:
        ContractViolationError: If ``c2`` lies outside [0..Θ]^r
    """
    if any(not 0 <= x <= theta for x in c2):
        raise ContractViolationError("bm_preds", f"configuration {list(c2)} outside [0..{theta}]")
    return [tuple(c) for c in product(*(_component_preds(s, q, theta) for s, q in zip(c2, w)))]


def bm_succs(c1: Sequence[int], w: Sequence[int], theta: int) -> List[Vector]:
    """Every c2 with (c1, w, c2) in the bounded-move relation."""
    return [tuple(c) for c in product(*(_component_succs(p, q, theta) for p, q in zip(c1, w)))]


# ========================================================================
# QUEUE CONFIGURATION MAPS
# ========================================================================


class QueueConfigMap:
    """
    Total map from [0..Θ]^r to CP values, stored sparsely.

    Configurations mapped to ⊥ are not stored.
    """

    def __init__(
        self,
        variables: Sequence[str],
        r: int,
        theta: int,
        entries: Optional[Mapping[Vector, CpEnv]] = None,
    ) -> None:
        self.variables = tuple(variables)
        self.r = r
        self.theta = theta
        self._lattice = CpLattice(self.variables)
        self._entries: Dict[Vector, CpEnv] = {
            c: v for c, v in (entries or {}).items() if not v.is_unreachable
        }

    @classmethod
    def seed(cls, value: CpEnv, r: int, theta: int) -> "QueueConfigMap":
        """``value`` at the zero configuration, ⊥ elsewhere."""
        return cls(value.variables, r, theta, {(0,) * r: value})

    def _like(self, entries: Mapping[Vector, CpEnv]) -> "QueueConfigMap":
        return QueueConfigMap(self.variables, self.r, self.theta, entries)

    def get(self, config: Sequence[int]) -> CpEnv:
        return self._entries.get(tuple(config), self._lattice.bottom())

    def items(self) -> Iterator[Tuple[Vector, CpEnv]]:
        return iter(sorted(self._entries.items()))

    @property
    def is_bottom(self) -> bool:
        return not self._entries

    def configurations(self) -> Iterator[Vector]:
        """All of [0..Θ]^r in lexicographic order."""
        return product(range(self.theta + 1), repeat=self.r)  # type: ignore[return-value]

    def _combine(self, other: "QueueConfigMap", op: Callable[[CpEnv, CpEnv], CpEnv]) -> "QueueConfigMap":
        entries = dict(self._entries)
        for c, v in other._entries.items():
            entries[c] = op(entries[c], v) if c in entries else v
        return self._like(entries)

    def join(self, other: "QueueConfigMap") -> "QueueConfigMap":
        return self._combine(other, self._lattice.join)

    def widen(self, other: "QueueConfigMap") -> "QueueConfigMap":
        return self._combine(other, self._lattice.widen)

    def leq(self, other: "QueueConfigMap") -> bool:
        return all(self._lattice.leq(v, other.get(c)) for c, v in self._entries.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QueueConfigMap):
            return NotImplemented
        return self.theta == other.theta and self._entries == other._entries

    def __repr__(self) -> str:
        return f"QueueConfigMap(theta={self.theta}, entries={len(self._entries)})"

    def render_table(self) -> List[str]:
        """One ``⟨c⟩ ↦ values`` line per non-⊥ configuration."""
        return [f"⟨{','.join(str(x) for x in c)}⟩ ↦ {v.render()}" for c, v in self.items()]


def joinmap(m: QueueConfigMap) -> CpEnv:
    """Join of a map's values over every configuration."""
    return CpLattice(m.variables).join_all(v for _, v in m.items())


def fun_edge(graph: AnalyzableGraph, edge: VcfgEdge, m: QueueConfigMap) -> QueueConfigMap:
    """
    Transfer a map across an edge.

    The result at c2 is the join of f(m(c1)) over the c1 with (c1, w, c2) in
    the bounded-move relation; only the non-⊥ c1 of ``m`` contribute.
    """
    f = graph.function(edge)
    lattice = CpLattice(m.variables)
    out: Dict[Vector, CpEnv] = {}
    for c1, value in m.items():
        moved = graph.algebra.apply(f, value)  # type: ignore[arg-type]
        if moved.is_unreachable:
            continue
        for c2 in bm_succs(c1, edge.vector, m.theta):
            out[c2] = lattice.join(out[c2], moved) if c2 in out else moved
    return QueueConfigMap(m.variables, m.r, m.theta, out)


# ========================================================================
# KILDALL
# ========================================================================


@dataclass
class _Ops(Generic[T]):
    bottom: T
    join: Callable[[T, T], T]
    widen: Callable[[T, T], T]
    leq: Callable[[T, T], bool]
    transfer: Callable[[VcfgEdge, T], T]


def _fixpoint(
    graph: AnalyzableGraph,
    seed: T,
    ops: _Ops[T],
    settings: AnalysisSettings,
    engine: str,
) -> Tuple[Dict[str, T], Dict[str, int]]:
    """FIFO worklist with pending coalescing; widening after a node's first update."""
    vcfg = graph.vcfg
    values: Dict[str, T] = {n: ops.bottom for n in vcfg.nodes}
    values[vcfg.start] = seed
    updates: Dict[str, int] = {n: 0 for n in vcfg.nodes}
    worklist: Deque[str] = deque([vcfg.start])
    pending = {vcfg.start}
    stats = {"iterations": 0, "updates": 0}

    def propagate(node: str) -> List[Tuple[str, T]]:
        current = values[node]
        return [(e.target, ops.transfer(e, current)) for e in vcfg.out_edges(node)]

    threads = settings.threads
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while worklist:
            batch = [worklist.popleft() for _ in range(min(len(worklist), max(1, threads * 8)))]
            for node in batch:
                pending.discard(node)
            stats["iterations"] += len(batch)
            if stats["iterations"] > settings.max_iterations:
                raise AnalysisAbortedError(
                    engine,
                    f"more than {settings.max_iterations} worklist iterations",
                    dict(stats),
                )
            if pool is not None:
                produced = list(pool.map(propagate, batch))
            else:
                produced = [propagate(n) for n in batch]
            for contributions in produced:
                for target, incoming in contributions:
                    old = values[target]
                    new = ops.join(old, incoming)
                    if updates[target] > 0:
                        new = ops.widen(old, new)
                    if ops.leq(new, old):
                        continue
                    values[target] = new
                    updates[target] += 1
                    stats["updates"] += 1
                    if target not in pending:
                        pending.add(target)
                        worklist.append(target)
    finally:
        if pool is not None:
            pool.shutdown()
    return values, stats


def _reject_procedures(graph: AnalyzableGraph, engine: str) -> None:
    if graph.vcfg.has_procedures:
        raise UnsupportedEngineError(engine, "unsupported (procedures)", supported=["backward"])


@dataclass
class ForwardResult:
    theta: int
    maps: Dict[str, QueueConfigMap]
    statistics: Dict[str, int] = field(default_factory=dict)

    def value(self, node: str) -> CpEnv:
        return joinmap(self.maps[node])

    def join_over(self, nodes: Iterable[str]) -> CpEnv:
        maps = [self.maps[n] for n in nodes]
        if not maps:
            raise ContractViolationError("join_over", "empty node set")
        return CpLattice(maps[0].variables).join_all(joinmap(m) for m in maps)


def kildall(
    graph: AnalyzableGraph,
    theta: int,
    d0: Optional[CpEnv] = None,
    settings: Optional[AnalysisSettings] = None,
) -> ForwardResult:
    """
    Forward DFAS fixpoint.

    Args:
        graph: Procedure-free VCFG with attached transfer functions
        theta: Queue bound Θ ≥ 0
        d0: Entry value (initial valuation by default)
        settings: Iteration cap and thread count

    Raises:
        UnsupportedEngineError: If the graph has procedures
        AnalysisAbortedError: If the iteration cap is exceeded
    """
    if theta < 0:
        raise ContractViolationError("kildall", "theta must be non-negative")
    engine = EngineType.FORWARD.value
    _reject_procedures(graph, engine)
    settings = settings or AnalysisSettings()
    vcfg = graph.vcfg
    entry = d0 if d0 is not None else graph.initial_value()
    context = {"engine": engine, "domain": graph.domain, "theta": theta}
    logger.info("Forward analysis started", extra=context)

    ops: _Ops[QueueConfigMap] = _Ops(
        bottom=QueueConfigMap(vcfg.variables, vcfg.r, theta),
        join=lambda a, b: a.join(b),
        widen=lambda a, b: a.widen(b),
        leq=lambda a, b: a.leq(b),
        transfer=lambda e, m: fun_edge(graph, e, m),
    )
    maps, stats = _fixpoint(graph, QueueConfigMap.seed(entry, vcfg.r, theta), ops, settings, engine)
    logger.info(
        f"Forward analysis finished after {stats['iterations']} iterations", extra=context
    )
    return ForwardResult(theta, maps, stats)


@dataclass
class JopResult:
    values: Dict[str, CpEnv]
    statistics: Dict[str, int] = field(default_factory=dict)

    def join_over(self, nodes: Iterable[str]) -> CpEnv:
        items = [self.values[n] for n in nodes]
        if not items:
            raise ContractViolationError("join_over", "empty node set")
        return CpLattice(items[0].variables).join_all(items)


def jop(
    graph: AnalyzableGraph,
    d0: Optional[CpEnv] = None,
    settings: Optional[AnalysisSettings] = None,
) -> JopResult:
    """
    Join over all paths, feasible or not.

    Raises:
        UnsupportedEngineError: If the graph has procedures
        AnalysisAbortedError: If the iteration cap is exceeded
    """
    engine = EngineType.JOP.value
    _reject_procedures(graph, engine)
    settings = settings or AnalysisSettings()
    lattice = CpLattice(graph.vcfg.variables)
    entry = d0 if d0 is not None else graph.initial_value()
    context = {"engine": engine, "domain": graph.domain}
    logger.info("JOP analysis started", extra=context)

    def transfer(e: VcfgEdge, value: CpEnv) -> CpEnv:
        return graph.algebra.apply(graph.function(e), value)  # type: ignore[arg-type]

    ops: _Ops[CpEnv] = _Ops(lattice.bottom(), lattice.join, lattice.widen, lattice.leq, transfer)
    values, stats = _fixpoint(graph, entry, ops, settings, engine)
    logger.info(f"JOP analysis finished after {stats['iterations']} iterations", extra=context)
    return JopResult(values, stats)


def forward_dump(result: ForwardResult, labels: Mapping[str, str]) -> Dict[str, List[str]]:
    """Per-node configuration tables, keyed by node label."""
    return {labels[n]: m.render_table() for n, m in result.maps.items() if not m.is_bottom}