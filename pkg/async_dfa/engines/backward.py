"""
Backward DFAS.

Paths to the target are grown backwards from the target one step (or one
call/summary/return block) at a time. A new path is kept only when the paths
already kept at its start node with demand at most its own do not dominate
its path transfer function. The JOFP is the join of the kept zero-demand
paths from the start node applied to the entry value.

Calls are crossed with end-to-end summaries: for a procedure F and a demand
d, ``EndToEndSummarizer`` retains the entry-to-exit paths of F not
d-supply-covered by the others.
"""

import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Deque, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from ..config import AnalysisSettings
from ..domains import CpEnv, FormulaAlgebra
from ..errors import AnalysisAbortedError, ContractViolationError, UnsupportedEngineError
from ..logging_config import get_logger
from ..models import DomainType, EngineType
from ..tracing import INTRA_PHASE, IVC_PHASE, TraceRecorder, get_recorder
from ..vcfg import AnalyzableGraph, CallSite, EdgeKind, VcfgEdge

logger = get_logger(__name__)

Vector = Tuple[int, ...]

BACKWARD_DOMAINS = (DomainType.LCP.value, DomainType.CCP.value)


# ========================================================================
# VECTORS
# ========================================================================


def _minus_clamped(d: Vector, w: Vector) -> Vector:
    return tuple(max(a - b, 0) for a, b in zip(d, w))


def _vector_leq(a: Vector, b: Vector) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _vector_sum(vectors: Iterable[Vector], r: int) -> Vector:
    total = [0] * r
    for w in vectors:
        for i, x in enumerate(w):
            total[i] += x
    return tuple(total)


# ========================================================================
# PATHS
# ========================================================================


@dataclass(frozen=True, eq=False)
class PathCell:
    """
    Backward path to the target, stored as a cons list sharing suffixes.

    ``block`` holds the edges prepended in one extension step (one edge, or a
    call edge, an end-to-end path and a return edge); ``rest`` is the path
    that was extended. Demand (w.r.t. the zero vector) and the path transfer
    function are cached per cell.
    """

    block: Tuple[VcfgEdge, ...]
    rest: Optional["PathCell"]
    start: str
    target: str
    demand: Vector
    ptf: Any
    length: int

    def edges(self) -> Tuple[VcfgEdge, ...]:
        out: List[VcfgEdge] = []
        cell: Optional[PathCell] = self
        while cell is not None:
            out.extend(cell.block)
            cell = cell.rest
        return tuple(out)

    def nodes(self) -> Tuple[str, ...]:
        edges = self.edges()
        if not edges:
            return (self.target,)
        return (edges[0].source,) + tuple(e.target for e in edges)

    @property
    def is_feasible(self) -> bool:
        return not any(self.demand)


@dataclass(frozen=True, eq=False)
class IvcPath:
    """Interprocedurally valid and complete entry-to-exit path of a procedure."""

    procedure: str
    edges: Tuple[VcfgEdge, ...]
    total: Vector
    ptf: Any
    depth: int = 0

    def supply(self, d: Sequence[int]) -> Vector:
        return tuple(min(s, x) for s, x in zip(self.total, d))

    def nodes(self) -> Tuple[str, ...]:
        return (self.edges[0].source,) + tuple(e.target for e in self.edges)


PathLike = Union[Sequence[VcfgEdge], PathCell, IvcPath]


def path_cell(graph: AnalyzableGraph, edges: Sequence[VcfgEdge]) -> PathCell:
    """Stored form of an explicit non-empty edge sequence."""
    if not edges:
        raise ContractViolationError("path_cell", "path has no edges")
    return PathCell(
        block=tuple(edges),
        rest=None,
        start=edges[0].source,
        target=edges[-1].target,
        demand=demand(edges),
        ptf=graph.ptf(edges),
        length=len(edges),
    )


def _edges_of(path: PathLike) -> Tuple[VcfgEdge, ...]:
    if isinstance(path, PathCell):
        return path.edges()
    if isinstance(path, IvcPath):
        return path.edges
    return tuple(path)


def demand(path: PathLike, d: Optional[Sequence[int]] = None) -> Vector:
    """
    Minimum counter vector needed at the path's start so that ``d`` remains at its end.

    Args:
        path: Edges in path order (or a stored path)
        d: Counter vector required after the path (zero vector by default)
    """
    edges = _edges_of(path)
    if d is None:
        current: Vector = tuple(0 for _ in edges[0].vector) if edges else ()
    else:
        current = tuple(d)
    for e in reversed(edges):
        current = _minus_clamped(current, e.vector)
    return current


def supply(path: PathLike, d: Sequence[int]) -> Vector:
    """
    Sum of a receive-free path's queuing vectors, clamped at ``d``.

    Raises:
        ContractViolationError: If the path contains a receive
    """
    edges = _edges_of(path)
    if any(e.has_receive for e in edges):
        raise ContractViolationError("supply", "path contains a receive operation")
    total = _vector_sum((e.vector for e in edges), len(d))
    return tuple(min(s, x) for s, x in zip(total, d))


def covering_set(path: PathCell, candidates: Sequence[PathCell], algebra: FormulaAlgebra) -> Optional[List[PathCell]]:
    """
    Candidates whose demand is at most the path's, if their pointwise join dominates its ptf.

    Returns:
        The covering set, or ``None`` when the path is not covered
    """
    cover = [c for c in candidates if _vector_leq(c.demand, path.demand)]
    if not cover:
        return None
    return cover if algebra.fcovered(path.ptf, [c.ptf for c in cover]) else None


def covered(path: PathCell, candidates: Sequence[PathCell], algebra: FormulaAlgebra) -> bool:
    """True iff the candidates cover the path."""
    return covering_set(path, candidates, algebra) is not None


def ds_covering_set(
    path: IvcPath, d: Sequence[int], candidates: Sequence[IvcPath], algebra: FormulaAlgebra
) -> Optional[List[IvcPath]]:
    """Candidates whose d-supply is at least the path's, if their pointwise join dominates its ptf."""
    needed = path.supply(d)
    cover = [c for c in candidates if _vector_leq(needed, c.supply(d))]
    if not cover:
        return None
    return cover if algebra.fcovered(path.ptf, [c.ptf for c in cover]) else None


def ds_covered(
    path: IvcPath, d: Sequence[int], candidates: Sequence[IvcPath], algebra: FormulaAlgebra
) -> bool:
    """True iff the candidates d-supply-cover the path."""
    return ds_covering_set(path, d, candidates, algebra) is not None


# ========================================================================
# END-TO-END SUMMARIES
# ========================================================================


@dataclass(frozen=True)
class PathTemplate:
    """
    Entry-to-exit path of one procedure with its calls left as holes.

    ``segments[i]`` are the intra edges before hole ``i`` (the last segment
    runs to the exit), so there is one more segment than holes.
    """

    procedure: str
    segments: Tuple[Tuple[VcfgEdge, ...], ...]
    holes: Tuple[CallSite, ...]
    segment_ptfs: Tuple[Any, ...]
    segment_totals: Tuple[Vector, ...]

    @property
    def depth(self) -> int:
        return len(self.holes)


class EndToEndSummarizer:
    """
    Memoized ``compute_end_to_end`` for every procedure of a graph.

    Results are computed for all procedures at once per demand vector and
    cached; the cache is shared by the threads of a parallel run.
    """

    def __init__(self, graph: AnalyzableGraph) -> None:
        self.graph = graph
        self.vcfg = graph.vcfg
        self.algebra: FormulaAlgebra = graph.algebra  # type: ignore[assignment]
        self._lock = threading.Lock()
        self._memo: Dict[Vector, Dict[str, Tuple[IvcPath, ...]]] = {}
        self._templates: Optional[Dict[str, List[PathTemplate]]] = None
        self.recorder: Optional[TraceRecorder] = None
        self.statistics: Dict[str, int] = {"ivc_retained": 0, "ivc_covered": 0, "summaries": 0}

    def compute(self, procedure: str, d: Sequence[int]) -> Tuple[IvcPath, ...]:
        """
        Retained IVC paths of ``procedure`` for demand ``d``.

        Every IVC path of the procedure is d-supply-covered by the result.
        """
        if procedure not in self.vcfg.procedures:
            raise ContractViolationError("compute_end_to_end", f"unknown procedure {procedure!r}")
        key = tuple(d)
        with self._lock:
            if key not in self._memo:
                self._memo[key] = self._solve(key)
            return self._memo[key][procedure]

    # ------------------------------------------------------------------
    # templates
    # ------------------------------------------------------------------

    def templates(self, procedure: str) -> List[PathTemplate]:
        if self._templates is None:
            self._templates = {name: self._enumerate(name) for name in self.vcfg.procedures}
        return self._templates[procedure]

    def _enumerate(self, procedure: str) -> List[PathTemplate]:
        layout = self.vcfg.procedures[procedure]
        members = set(layout.nodes)
        sites = {s.call_edge.index: s for s in self.vcfg.call_sites}
        found: List[PathTemplate] = []

        for node in layout.nodes:
            for e in self.vcfg.out_edges(node):
                if e.kind == EdgeKind.INTRA and e.has_receive:
                    raise ContractViolationError(
                        "compute_end_to_end", f"procedure {procedure} contains a receive"
                    )

        def walk(node: str, on_stack: Tuple[str, ...], segments: List[List[VcfgEdge]], holes: List[CallSite]) -> None:
            if node == layout.exit:
                found.append(self._template(procedure, segments, holes))
            for e in self.vcfg.out_edges(node):
                if e.kind == EdgeKind.RETURN:
                    continue
                if e.kind == EdgeKind.CALL:
                    site = sites[e.index]
                    nxt = site.return_node
                    extended = [list(s) for s in segments] + [[]]
                    new_holes = holes + [site]
                else:
                    nxt = e.target
                    extended = [list(s) for s in segments]
                    extended[-1].append(e)
                    new_holes = holes
                if nxt not in members:
                    continue
                if nxt in on_stack:
                    raise ContractViolationError(
                        "compute_end_to_end", f"procedure {procedure} has a loop through {nxt}"
                    )
                walk(nxt, on_stack + (nxt,), extended, new_holes)

        walk(layout.entry, (layout.entry,), [[]], [])
        return found

    def _template(self, procedure: str, segments: List[List[VcfgEdge]], holes: List[CallSite]) -> PathTemplate:
        return PathTemplate(
            procedure=procedure,
            segments=tuple(tuple(s) for s in segments),
            holes=tuple(holes),
            segment_ptfs=tuple(self.graph.ptf(s) for s in segments),
            segment_totals=tuple(_vector_sum((e.vector for e in s), self.vcfg.r) for s in segments),
        )

    # ------------------------------------------------------------------
    # sweeps
    # ------------------------------------------------------------------

    def _fill(self, template: PathTemplate, parts: Sequence[IvcPath]) -> IvcPath:
        algebra = self.algebra
        edges: List[VcfgEdge] = list(template.segments[0])
        ptf = template.segment_ptfs[0]
        total = template.segment_totals[0]
        depth = 0
        for hole, part, segment, seg_ptf, seg_total in zip(
            template.holes,
            parts,
            template.segments[1:],
            template.segment_ptfs[1:],
            template.segment_totals[1:],
        ):
            edges.append(hole.call_edge)
            edges.extend(part.edges)
            edges.append(hole.return_edge)
            edges.extend(segment)
            for f in (
                self.graph.function(hole.call_edge),
                part.ptf,
                self.graph.function(hole.return_edge),
                seg_ptf,
            ):
                ptf = algebra.compose(ptf, f)
            total = tuple(a + b + c for a, b, c in zip(total, part.total, seg_total))
            depth = max(depth, part.depth + 1)
        return IvcPath(template.procedure, tuple(edges), total, ptf, depth)

    def _offer(self, path: IvcPath, d: Vector, retained: List[IvcPath], recorder: Optional[TraceRecorder]) -> bool:
        cover = ds_covering_set(path, d, retained, self.algebra)
        if recorder is not None:
            recorder.record(
                IVC_PHASE,
                self.vcfg.render_path(path.nodes()),
                render_ptf(self.algebra, path.ptf),
                supply=path.supply(d),
                procedure=path.procedure,
                covered_by=(
                    [self.vcfg.render_path(c.nodes()) for c in cover] if cover is not None else None
                ),
            )
        if cover is not None:
            self.statistics["ivc_covered"] += 1
            return False
        retained.append(path)
        self.statistics["ivc_retained"] += 1
        return True

    def _solve(self, d: Vector) -> Dict[str, Tuple[IvcPath, ...]]:
        recorder = self.recorder or get_recorder()
        names = list(self.vcfg.procedures)
        retained: Dict[str, List[IvcPath]] = {name: [] for name in names}
        tried: Dict[int, Set[Tuple[int, ...]]] = {}
        plans: List[PathTemplate] = []

        for name in names:
            for template in self.templates(name):
                if template.holes:
                    plans.append(template)
                else:
                    self._offer(self._fill(template, ()), d, retained[name], recorder)

        sweeps = 0
        added = True
        while added:
            added = False
            sweeps += 1
            for number, template in enumerate(plans):
                seen = tried.setdefault(number, set())
                # newest retained paths first
                choices = [list(reversed(retained[h.callee])) for h in template.holes]
                for combo in _cartesian(choices):
                    key = tuple(id(p) for p in combo)
                    if key in seen:
                        continue
                    seen.add(key)
                    if self._offer(self._fill(template, combo), d, retained[template.procedure], recorder):
                        added = True

        self.statistics["summaries"] += 1
        logger.debug(
            f"End-to-end summaries for d={list(d)} after {sweeps} sweeps: "
            + ", ".join(f"{n}={len(retained[n])}" for n in names),
            extra={"engine": EngineType.BACKWARD.value},
        )
        return {name: tuple(paths) for name, paths in retained.items()}


def _cartesian(choices: Sequence[Sequence[IvcPath]]) -> Iterable[Tuple[IvcPath, ...]]:
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for tail in _cartesian(choices[1:]):
            yield (head,) + tail


def compute_end_to_end(graph: AnalyzableGraph, procedure: str, d: Sequence[int]) -> Tuple[IvcPath, ...]:
    """One-shot ``EndToEndSummarizer(graph).compute(procedure, d)``."""
    return EndToEndSummarizer(graph).compute(procedure, d)


# ========================================================================
# ENGINE
# ========================================================================


def render_ptf(algebra: FormulaAlgebra, f: Any) -> str:
    """Domain text of a path transfer function, ``id`` for the identity."""
    if f == algebra.identity():
        return "id"
    return algebra.render(f)


@dataclass
class BackwardResult:
    value: CpEnv
    paths: Dict[str, List[PathCell]]
    statistics: Dict[str, int] = field(default_factory=dict)


class BackwardEngine:
    """
    Backward DFAS over an analyzable graph.

    Args:
        graph: VCFG with LCP or CCP transfer functions
        settings: Iteration cap and thread count

    Raises:
        UnsupportedEngineError: If the graph's domain cannot order functions
    """

    def __init__(self, graph: AnalyzableGraph, settings: Optional[AnalysisSettings] = None) -> None:
        if not isinstance(graph.algebra, FormulaAlgebra):
            raise UnsupportedEngineError(
                EngineType.BACKWARD.value,
                f"domain {graph.domain} has no decidable function order",
                supported=list(BACKWARD_DOMAINS),
            )
        self.graph = graph
        self.vcfg = graph.vcfg
        self.algebra: FormulaAlgebra = graph.algebra
        self.settings = settings or AnalysisSettings()
        self.summarizer = EndToEndSummarizer(graph)
        self.ascent_limit = 4 * len(self.vcfg.variables) + 8

    # ------------------------------------------------------------------
    # extension
    # ------------------------------------------------------------------

    def _prepend(self, block: Sequence[VcfgEdge], block_ptf: Any, path: PathCell) -> PathCell:
        d = path.demand
        for e in reversed(block):
            d = _minus_clamped(d, e.vector)
        return PathCell(
            block=tuple(block),
            rest=path if path.block else None,
            start=block[0].source,
            target=path.target,
            demand=d,
            ptf=self.algebra.compose(block_ptf, path.ptf),
            length=path.length + len(block),
        )

    def extensions(self, path: PathCell) -> List[PathCell]:
        """
        One-step backward extensions, by kind of the incoming edge.

        Return edges are crossed with a call edge, a retained end-to-end path
        and the return edge; call and intra edges are prepended directly.
        """
        out: List[PathCell] = []
        for ret in self.vcfg.in_edges(path.start, EdgeKind.RETURN):
            site = self.vcfg.call_site_of(ret)
            call_f = self.graph.function(site.call_edge)
            ret_f = self.graph.function(ret)
            for summary in self.summarizer.compute(site.callee, path.demand):
                block = (site.call_edge,) + summary.edges + (ret,)
                block_ptf = self.algebra.compose(self.algebra.compose(call_f, summary.ptf), ret_f)
                out.append(self._prepend(block, block_ptf, path))
        for kind in (EdgeKind.CALL, EdgeKind.INTRA):
            for e in self.vcfg.in_edges(path.start, kind):
                out.append(self._prepend((e,), self.graph.function(e), path))
        return out

    # ------------------------------------------------------------------
    # main loop
    # ------------------------------------------------------------------

    def run(self, target: str, d0: Optional[CpEnv] = None) -> BackwardResult:
        """
        JOFP at one node.

        Args:
            target: VCFG node id
            d0: Entry value at the start node (initial valuation by default)

        Raises:
            AnalysisAbortedError: On the chain-length watchdog or the iteration cap
        """
        if target not in self.vcfg.labels:
            raise ContractViolationError("compute_jofp", f"unknown node {target!r}")
        entry = d0 if d0 is not None else self.graph.initial_value()
        recorder = get_recorder()
        self.summarizer.recorder = recorder
        context = {"engine": EngineType.BACKWARD.value, "domain": self.graph.domain, "target": target}
        logger.info("Backward analysis started", extra=context)

        paths: Dict[str, List[PathCell]] = {n: [] for n in self.vcfg.nodes}
        joined: Dict[str, Any] = {}
        ascents: Dict[str, int] = {}
        stats = {"iterations": 0, "retained": 0, "covered": 0}
        worklist: Deque[PathCell] = deque()

        def offer(candidate: PathCell, parent: PathCell) -> None:
            kept = paths[candidate.start]
            cover = covering_set(candidate, kept, self.algebra)
            if recorder is not None:
                recorder.record(
                    INTRA_PHASE,
                    self.vcfg.render_path(candidate.nodes()),
                    render_ptf(self.algebra, candidate.ptf),
                    extended_from=self.vcfg.render_path(parent.nodes()) if parent.block else "",
                    demand=candidate.demand,
                    covered_by=(
                        [self.vcfg.render_path(c.nodes()) for c in cover] if cover is not None else None
                    ),
                )
            if cover is not None:
                stats["covered"] += 1
                return
            kept.append(candidate)
            worklist.append(candidate)
            stats["retained"] += 1
            self._watch(candidate, joined, ascents)

        root = PathCell((), None, target, target, self.vcfg.zero, self.algebra.identity(), 0)
        for candidate in self.extensions(root):
            offer(candidate, root)

        threads = self.settings.threads
        pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        try:
            while worklist:
                batch = [worklist.popleft() for _ in range(min(len(worklist), max(1, threads * 8)))]
                stats["iterations"] += len(batch)
                if stats["iterations"] > self.settings.max_iterations:
                    raise AnalysisAbortedError(
                        EngineType.BACKWARD.value,
                        f"more than {self.settings.max_iterations} worklist iterations",
                        {"target": target, **stats},
                    )
                if pool is not None:
                    extended = list(pool.map(self.extensions, batch))
                else:
                    extended = [self.extensions(p) for p in batch]
                for parent, candidates in zip(batch, extended):
                    for candidate in candidates:
                        offer(candidate, parent)
        finally:
            if pool is not None:
                pool.shutdown()

        lattice = self.algebra.lattice
        value = lattice.join_all(
            self.algebra.apply(p.ptf, entry) for p in paths[self.vcfg.start] if p.is_feasible
        )
        if target == self.vcfg.start:
            value = lattice.join(value, entry)

        stats.update(self.summarizer.statistics)
        logger.info(
            f"Backward analysis finished: {stats['retained']} retained, "
            f"{stats['covered']} covered, {stats['iterations']} iterations",
            extra=context,
        )
        return BackwardResult(value, paths, stats)

    def _watch(self, path: PathCell, joined: Dict[str, Any], ascents: Dict[str, int]) -> None:
        node = path.start
        previous = joined.get(node)
        current = path.ptf if previous is None else self.algebra.fjoin(previous, path.ptf)
        if previous is not None and self.algebra.fequals(previous, current):
            return
        joined[node] = current
        ascents[node] = ascents.get(node, 0) + 1
        if ascents[node] > self.ascent_limit:
            raise AnalysisAbortedError(
                EngineType.BACKWARD.value,
                f"retained functions at {self.vcfg.label(node)} keep ascending; "
                "the domain does not appear to have finite height",
                {"node": node, "ascents": ascents[node], "limit": self.ascent_limit},
            )

    def analyze(self, targets: Sequence[str], d0: Optional[CpEnv] = None) -> BackwardResult:
        """Join of the JOFP over a target set (⊥ when empty)."""
        lattice = self.algebra.lattice
        value = lattice.bottom()
        paths: Dict[str, List[PathCell]] = {}
        stats: Dict[str, int] = {}
        for target in targets:
            result = self.run(target, d0)
            value = lattice.join(value, result.value)
            for node, kept in result.paths.items():
                paths.setdefault(node, []).extend(kept)
            for k, v in result.statistics.items():
                stats[k] = stats.get(k, 0) + v if k in ("iterations", "retained", "covered") else v
        return BackwardResult(value, paths, stats)


def compute_jofp(
    graph: AnalyzableGraph,
    target: str,
    d0: Optional[CpEnv] = None,
    settings: Optional[AnalysisSettings] = None,
) -> CpEnv:
    """JOFP at ``target`` for the entry value ``d0``."""
    return BackwardEngine(graph, settings).run(target, d0).value
