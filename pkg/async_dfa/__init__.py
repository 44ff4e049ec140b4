"""
async-dfa - precise data flow analysis of asynchronous message-passing systems.

Public API for loading models, computing join-over-feasible-paths values with
the backward and forward engines, and checking assertions.
"""

from typing import Any, Dict, Optional

from .analysis import (
    TargetAnalyzer,
    analyze_target,
    check_assertions,
    collect_uses,
    compare_engines,
    resolve_model,
)
from .config import AnalysisSettings
from .errors import DfasError
from .logging_config import get_logger, setup_logging
from .models import (
    AssertionVerdict,
    ComparisonReport,
    ConstantFinding,
    DomainType,
    EngineType,
    Report,
    Verdict,
)
from .vcfg import Vcfg, attach_domain, build_vcfg, target_set

__version__ = "0.1.0"
__all__ = [
    "analyze",
    "analyze_target",
    "check_assertions",
    "compare_engines",
    "collect_uses",
    "resolve_model",
    "setup_logging",
    "AnalysisSettings",
    "TargetAnalyzer",
    "Vcfg",
    "build_vcfg",
    "attach_domain",
    "target_set",
    "Report",
    "ComparisonReport",
    "ConstantFinding",
    "AssertionVerdict",
    "EngineType",
    "DomainType",
    "Verdict",
]

logger = get_logger(__name__)


def analyze(
    source: str,
    target: str,
    engine: str = "backward",
    domain: Optional[str] = None,
    **settings: Any,
) -> Dict[str, Any]:
    """
    One-call API: load a model and compute the values at one control state.

    Args:
        source: Model path or ``catalog:<name>``
        target: ``PROCESS.STATE``
        engine: "backward", "forward" or "jop"
        domain: "cp", "lcp" or "ccp" (engine default when omitted)
        **settings: ``AnalysisSettings`` overrides such as ``theta=3``

    Returns:
        ``{"success": True, "report": {...}}`` or
        ``{"success": False, "error": {...}}`` with the error's ``to_dict()``

    Example:
        >>> result = analyze("catalog:example_a", "P.k")
        >>> result["report"]["findings"][0]
        {'process': 'P', 'state': 'k', 'variable': 't', 'value': 1}
    """
    try:
        model = resolve_model(source)
        report = analyze_target(
            model,
            target,
            engine=EngineType(engine.lower().strip()),
            domain=DomainType(domain.lower().strip()) if domain else None,
            settings=AnalysisSettings.from_env(**settings),
        )
    except ValueError as exc:
        return {"success": False, "error": {"error": "INVALID_ARGUMENT", "message": str(exc)}}
    except DfasError as exc:
        logger.warning(
            f"Analysis of {source} failed: {exc.message}",
            extra={"engine": engine, "target": target},
        )
        return {"success": False, "error": exc.to_dict()}
    return {"success": True, "report": report.to_dict()}
