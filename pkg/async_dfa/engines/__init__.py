"""Analysis engines: backward DFAS, forward DFAS with the JOP baseline, and the enumeration oracle."""

from .backward import (
    BackwardEngine,
    BackwardResult,
    EndToEndSummarizer,
    IvcPath,
    PathCell,
    PathTemplate,
    compute_end_to_end,
    compute_jofp,
    covered,
    covering_set,
    demand,
    ds_covered,
    ds_covering_set,
    path_cell,
    render_ptf,
    supply,
)
from .forward import (
    ForwardResult,
    JopResult,
    QueueConfigMap,
    bm_preds,
    bm_succs,
    bounded_move,
    forward_dump,
    fun_edge,
    joinmap,
    jop,
    kildall,
)
from .oracle import EnumerationResult, enumerate_jofp

__all__ = [
    "BackwardEngine",
    "BackwardResult",
    "EndToEndSummarizer",
    "EnumerationResult",
    "ForwardResult",
    "IvcPath",
    "JopResult",
    "PathCell",
    "PathTemplate",
    "QueueConfigMap",
    "bm_preds",
    "bm_succs",
    "bounded_move",
    "compute_end_to_end",
    "compute_jofp",
    "covered",
    "covering_set",
    "demand",
    "ds_covered",
    "ds_covering_set",
    "enumerate_jofp",
    "forward_dump",
    "fun_edge",
    "joinmap",
    "jop",
    "kildall",
    "path_cell",
    "render_ptf",
    "supply",
]
