"""Covering traces for the backward engine."""

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence

# Recorder of the analysis running in the current context
_recorder: ContextVar[Optional["TraceRecorder"]] = ContextVar("trace_recorder", default=None)

INTRA_PHASE = "paths"
IVC_PHASE = "ivc"


@dataclass
class TraceRow:
    """One generated path and what became of it."""

    step: int
    phase: str
    path: str
    ptf: str
    extended_from: str = ""
    demand: Optional[List[int]] = None
    supply: Optional[List[int]] = None
    procedure: Optional[str] = None
    covered_by: Optional[List[str]] = None

    @property
    def retained(self) -> bool:
        return self.covered_by is None

    def to_dict(self) -> Dict[str, Any]:
        """Convert trace row to dictionary."""
        row: Dict[str, Any] = {
            "step": self.step,
            "phase": self.phase,
            "path": self.path,
            "ptf": self.ptf,
            "retained": self.retained,
        }
        if self.extended_from:
            row["extended_from"] = self.extended_from
        if self.demand is not None:
            row["demand"] = self.demand
        if self.supply is not None:
            row["supply"] = self.supply
        if self.procedure is not None:
            row["procedure"] = self.procedure
        if self.covered_by is not None:
            row["covered_by"] = self.covered_by
        return row


@dataclass
class TraceRecorder:
    """Ordered trace rows of one analysis run."""

    rows: List[TraceRow] = field(default_factory=list)

    def record(
        self,
        phase: str,
        path: str,
        ptf: str,
        extended_from: str = "",
        demand: Optional[Sequence[int]] = None,
        supply: Optional[Sequence[int]] = None,
        procedure: Optional[str] = None,
        covered_by: Optional[Sequence[str]] = None,
    ) -> TraceRow:
        row = TraceRow(
            step=len(self.rows) + 1,
            phase=phase,
            path=path,
            ptf=ptf,
            extended_from=extended_from,
            demand=list(demand) if demand is not None else None,
            supply=list(supply) if supply is not None else None,
            procedure=procedure,
            covered_by=list(covered_by) if covered_by is not None else None,
        )
        self.rows.append(row)
        return row

    def retained(self, phase: str = INTRA_PHASE) -> List[TraceRow]:
        return [r for r in self.rows if r.phase == phase and r.retained]

    def rejected(self, phase: str = INTRA_PHASE) -> List[TraceRow]:
        return [r for r in self.rows if r.phase == phase and not r.retained]

    def find(self, path: str, phase: Optional[str] = None) -> Optional[TraceRow]:
        """First row for a rendered path."""
        for row in self.rows:
            if row.path == path and (phase is None or row.phase == phase):
                return row
        return None

    def to_dicts(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self.rows]


def get_recorder() -> Optional[TraceRecorder]:
    """Get the recorder of the current context."""
    return _recorder.get()


@contextmanager
def recording(recorder: Optional[TraceRecorder] = None) -> Iterator[TraceRecorder]:
    """
    Record covering traces of every backward run inside the block.

    Usage:
        with recording() as trace:
            compute_jofp(graph, "k")
        rows = trace.to_dicts()
    """
    active = recorder or TraceRecorder()
    token = _recorder.set(active)
    try:
        yield active
    finally:
        _recorder.reset(token)
