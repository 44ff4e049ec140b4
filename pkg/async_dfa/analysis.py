"""
Analysis orchestration: target values, assertion checks and engine comparison.

``TargetAnalyzer`` binds one model to one engine/domain pair and answers
"value at control state q of process P" queries, joining the per-node
results over q's target set. The report functions wrap it into the pydantic
report types.
"""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import catalog
from .config import AnalysisSettings
from .domains import TOP, CpEnv, CpLattice
from .engines.backward import BackwardEngine
from .engines.forward import ForwardResult, JopResult, forward_dump, jop, kildall
from .errors import ContractViolationError, ModelValidationError, UnsupportedEngineError
from .logging_config import get_logger
from .model import Assertion, Model, diagnostics_for, evaluate, load_model, validate
from .models import (
    BOTTOM_SYMBOL,
    TOP_SYMBOL,
    AssertionVerdict,
    ComparisonReport,
    ComparisonRow,
    ConstantFinding,
    DomainType,
    EngineMetadata,
    EngineType,
    FindingValue,
    Report,
    Verdict,
)
from .tracing import recording
from .vcfg import Vcfg, attach_domain, build_vcfg, target_set

logger = get_logger(__name__)

ENGINE_DOMAINS: Dict[EngineType, Tuple[DomainType, ...]] = {
    EngineType.BACKWARD: (DomainType.LCP, DomainType.CCP),
    EngineType.FORWARD: (DomainType.CP, DomainType.LCP),
    EngineType.JOP: (DomainType.CP, DomainType.LCP),
}

DEFAULT_DOMAIN: Dict[EngineType, DomainType] = {
    EngineType.BACKWARD: DomainType.LCP,
    EngineType.FORWARD: DomainType.CP,
    EngineType.JOP: DomainType.CP,
}


# ========================================================================
# INPUTS
# ========================================================================


def resolve_model(source: Union[str, Path], check: bool = True) -> Model:
    """
    Load a model from a file path or a ``catalog:<name>`` reference.

    Args:
        source: Path, or ``catalog:`` followed by a shipped model name
        check: Reject models that no engine can analyze
    """
    text = str(source)
    if text.startswith(catalog.CATALOG_PREFIX):
        return catalog.load(text[len(catalog.CATALOG_PREFIX):], check=check)
    return load_model(Path(text), check=check)


def parse_target(text: str) -> Tuple[str, str]:
    """
    Split ``PROCESS.STATE``; the state may itself be a qualified procedure node.

    Raises:
        ContractViolationError: If there is no ``.`` separator
    """
    process, dot, state = text.partition(".")
    if not dot or not process or not state:
        raise ContractViolationError("target", f"expected PROCESS.STATE, got {text!r}")
    return process, state


@dataclass(frozen=True)
class Use:
    """A variable read at a control state."""

    process: str
    state: str
    variable: str


def collect_uses(model: Model) -> List[Use]:
    """
    Variables referenced on transitions leaving each control state, plus the
    variables of the assertions placed at that state.
    """
    order = {v: i for i, v in enumerate(model.variable_names)}
    uses: List[Use] = []
    for process in model.processes:
        owner = process.name in model.owners
        bodies = [(s, process.outgoing(s)) for s in process.states]
        if owner:
            for proc in model.procedures:
                for node in proc.nodes:
                    bodies.append(
                        (proc.qualified(node), tuple(t for t in proc.edges if t.source == node))
                    )
        for state, transitions in bodies:
            names = set()
            for t in transitions:
                names |= t.used_variables()
            for a in model.assertions:
                if a.process == process.name and a.state == state:
                    names |= a.variables
            uses.extend(Use(process.name, state, v) for v in sorted(names, key=order.__getitem__))
    return uses


def finding_value(env: CpEnv, variable: str) -> FindingValue:
    if env.is_unreachable:
        return BOTTOM_SYMBOL
    value = env.get(variable)
    return TOP_SYMBOL if value is TOP else int(value)  # type: ignore[arg-type]


# ========================================================================
# TARGET ANALYZER
# ========================================================================


class TargetAnalyzer:
    """
    One model analyzed with one engine and domain.

    Args:
        model: Parsed model
        engine: Engine to run
        domain: Abstract domain (engine default when ``None``)
        settings: Limits and Θ
        vcfg: Prebuilt graph of ``model`` to share between analyzers

    Raises:
        UnsupportedEngineError: If the engine cannot use the domain
        ModelValidationError: If the model breaks an assumption of the engine
    """

    def __init__(
        self,
        model: Model,
        engine: EngineType,
        domain: Optional[DomainType] = None,
        settings: Optional[AnalysisSettings] = None,
        vcfg: Optional[Vcfg] = None,
    ) -> None:
        self.model = model
        self.engine = engine
        self.domain = domain or DEFAULT_DOMAIN[engine]
        self.settings = settings or AnalysisSettings()

        if self.domain not in ENGINE_DOMAINS[engine]:
            raise UnsupportedEngineError(
                engine.value,
                f"domain {self.domain.value} is not supported",
                supported=[d.value for d in ENGINE_DOMAINS[engine]],
            )
        problems = diagnostics_for(model, engine)
        if problems:
            raise ModelValidationError(problems, engine=engine.value)

        self.vcfg = vcfg or build_vcfg(model, self.settings.max_nodes)
        self.graph = attach_domain(self.vcfg, self.domain)
        self._backward = BackwardEngine(self.graph, self.settings) if engine == EngineType.BACKWARD else None
        self._node_values: Dict[str, CpEnv] = {}
        self._forward: Optional[ForwardResult] = None
        self._jop: Optional[JopResult] = None
        self.statistics: Dict[str, int] = {"nodes": len(self.vcfg.nodes), "edges": len(self.vcfg.edges)}
        self.trace: List[Dict[str, Any]] = []

    @property
    def theta(self) -> Optional[int]:
        return self.settings.theta if self.engine == EngineType.FORWARD else None

    def node_value(self, node: str) -> CpEnv:
        """Engine result at one VCFG node."""
        if node in self._node_values:
            return self._node_values[node]
        if self._backward is not None:
            result = self._backward.run(node)
            value = result.value
            for key in ("retained", "covered", "iterations"):
                self.statistics[key] = self.statistics.get(key, 0) + result.statistics.get(key, 0)
            for key in ("ivc_retained", "ivc_covered", "summaries"):
                if key in result.statistics:
                    self.statistics[key] = result.statistics[key]
        elif self.engine == EngineType.FORWARD:
            if self._forward is None:
                self._forward = kildall(self.graph, self.settings.theta, settings=self.settings)
                self.statistics.update(self._forward.statistics)
            value = self._forward.value(node)
        else:
            if self._jop is None:
                self._jop = jop(self.graph, settings=self.settings)
                self.statistics.update(self._jop.statistics)
            value = self._jop.values[node]
        self._node_values[node] = value
        return value

    def value_at(self, process: str, state: str) -> CpEnv:
        """Join of the node results over the target set of ``process.state``."""
        lattice = CpLattice(self.vcfg.variables)
        return lattice.join_all(
            self.node_value(n) for n in target_set(self.vcfg, process, state)
        )

    def traced_value_at(self, process: str, state: str) -> CpEnv:
        """``value_at`` that also fills ``trace`` (covering rows or configuration tables)."""
        if self.engine == EngineType.BACKWARD:
            with recording() as recorder:
                value = self.value_at(process, state)
            self.trace = recorder.to_dicts()
            return value
        value = self.value_at(process, state)
        if self._forward is not None:
            nodes = {self.vcfg.label(n) for n in target_set(self.vcfg, process, state)}
            dump = forward_dump(self._forward, self.vcfg.labels)
            self.trace = [
                {"node": label, "configurations": rows}
                for label, rows in sorted(dump.items())
                if label in nodes
            ]
        return value

    def metadata(self, runtime: Optional[float] = None) -> EngineMetadata:
        return EngineMetadata(
            engine=self.engine,
            domain=self.domain,
            theta=self.theta,
            threads=self.settings.threads,
            runtime_seconds=round(runtime, 6) if runtime is not None else None,
            statistics=dict(sorted(self.statistics.items())),
        )


# ========================================================================
# REPORTS
# ========================================================================


def _warnings(model: Model) -> List[str]:
    return [d.render() for d in validate(model) if d.is_warning]


def analyze_target(
    model: Model,
    target: str,
    engine: EngineType = EngineType.BACKWARD,
    domain: Optional[DomainType] = None,
    settings: Optional[AnalysisSettings] = None,
    trace: bool = False,
    timings: bool = False,
) -> Report:
    """
    Value of every variable at a control state.

    Args:
        model: Parsed model
        target: ``PROCESS.STATE``
        engine: Engine to run
        domain: Abstract domain (engine default when ``None``)
        settings: Limits and Θ
        trace: Attach the engine trace to the report
        timings: Record wall-clock runtime in the metadata
    """
    process, state = parse_target(target)
    started = time.perf_counter()
    analyzer = TargetAnalyzer(model, engine, domain, settings)
    env = analyzer.traced_value_at(process, state) if trace else analyzer.value_at(process, state)
    runtime = time.perf_counter() - started if timings else None

    findings = [
        ConstantFinding(process=process, state=state, variable=v, value=finding_value(env, v))
        for v in model.variable_names
    ]
    logger.info(
        f"Analyzed {target}: {sum(f.is_constant for f in findings)} constants",
        extra={"engine": engine.value, "domain": analyzer.domain.value, "model": model.name},
    )
    return Report(
        system=model.name,
        target=target,
        findings=findings,
        metadata=analyzer.metadata(runtime),
        diagnostics=_warnings(model),
        trace=analyzer.trace if trace else [],
    )


def assertion_verdict(assertion: Assertion, env: CpEnv) -> AssertionVerdict:
    """
    Verified iff every referenced variable is a constant and the expression holds.

    An unreachable state yields "unknown".
    """
    names = sorted(assertion.variables)
    values = {v: finding_value(env, v) for v in names}
    verdict = Verdict.UNKNOWN
    if not env.is_unreachable and all(isinstance(values[v], int) for v in names):
        try:
            if evaluate(assertion.expression, {v: int(values[v]) for v in names}):
                verdict = Verdict.VERIFIED
        except ZeroDivisionError:
            verdict = Verdict.UNKNOWN
    return AssertionVerdict(
        process=assertion.process,
        state=assertion.state,
        expression=assertion.text,
        verdict=verdict,
        values=values,
    )


def check_assertions(
    model: Model,
    engine: EngineType = EngineType.BACKWARD,
    domain: Optional[DomainType] = None,
    settings: Optional[AnalysisSettings] = None,
    timings: bool = False,
) -> Report:
    """Evaluate every assertion against the engine's result at its control state."""
    started = time.perf_counter()
    analyzer = TargetAnalyzer(model, engine, domain, settings)
    verdicts = [
        assertion_verdict(a, analyzer.value_at(a.process, a.state)) for a in model.assertions
    ]
    runtime = time.perf_counter() - started if timings else None
    logger.info(
        f"Checked {len(verdicts)} assertions: "
        f"{sum(v.is_verified() for v in verdicts)} verified",
        extra={"engine": engine.value, "domain": analyzer.domain.value, "model": model.name},
    )
    return Report(
        system=model.name,
        verdicts=verdicts,
        metadata=analyzer.metadata(runtime),
        diagnostics=_warnings(model),
    )


def _unsupported_status(exc: Exception) -> str:
    if isinstance(exc, ModelValidationError):
        codes = [getattr(p, "code", "") for p in exc.problems]
        if "PROCEDURES_PRESENT" in codes:
            return "unsupported (procedures)"
        return f"unsupported ({', '.join(c.lower() for c in codes)})"
    return f"unsupported ({exc})"


def compare_engines(
    model: Model,
    thetas: Sequence[int] = (),
    settings: Optional[AnalysisSettings] = None,
    timings: bool = False,
) -> ComparisonReport:
    """
    Constant uses and verified assertions for every engine configuration.

    Rows: backward/lcp, backward/ccp, forward/cp for each Θ, jop/cp. Engines
    the model does not admit get an "unsupported (...)" status instead of counts.
    """
    settings = settings or AnalysisSettings()
    thetas = list(thetas) or [settings.theta]
    uses = collect_uses(model)
    states = list(dict.fromkeys((u.process, u.state) for u in uses))
    states.extend(
        (a.process, a.state) for a in model.assertions if (a.process, a.state) not in states
    )
    vcfg = build_vcfg(model, settings.max_nodes)

    configurations: List[Tuple[EngineType, DomainType, Optional[int]]] = [
        (EngineType.BACKWARD, DomainType.LCP, None),
        (EngineType.BACKWARD, DomainType.CCP, None),
    ]
    configurations += [(EngineType.FORWARD, DomainType.CP, t) for t in thetas]
    configurations.append((EngineType.JOP, DomainType.CP, None))

    rows: List[ComparisonRow] = []
    for engine, domain, theta in configurations:
        row_settings = settings.override(theta=theta) if theta is not None else settings
        started = time.perf_counter()
        try:
            analyzer = TargetAnalyzer(model, engine, domain, row_settings, vcfg=vcfg)
        except (ModelValidationError, UnsupportedEngineError) as exc:
            rows.append(
                ComparisonRow(engine=engine, domain=domain, theta=theta, status=_unsupported_status(exc))
            )
            continue
        values = {s: analyzer.value_at(*s) for s in states}
        constants = sum(
            1 for u in uses if isinstance(finding_value(values[(u.process, u.state)], u.variable), int)
        )
        verified = sum(
            assertion_verdict(a, values[(a.process, a.state)]).is_verified()
            for a in model.assertions
        )
        runtime = time.perf_counter() - started
        rows.append(
            ComparisonRow(
                engine=engine,
                domain=domain,
                theta=theta,
                constants=constants,
                assertions_verified=verified,
                runtime_seconds=round(runtime, 6) if timings else None,
            )
        )
        logger.info(
            f"{rows[-1].label}: {constants}/{len(uses)} constant uses, {verified} assertions verified",
            extra={"model": model.name},
        )

    return ComparisonReport(
        system=model.name, uses=len(uses), assertions=len(model.assertions), rows=rows
    )
