"""
Report data models.

All models use Pydantic for validation and serialization. JSON output is
produced with sorted keys so two runs on the same input are byte-identical.
"""

import json
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

TOP_SYMBOL = "⊤"
BOTTOM_SYMBOL = "⊥"

FindingValue = Union[int, str]


class EngineType(str, Enum):
    """Analysis engines."""

    BACKWARD = "backward"
    FORWARD = "forward"
    JOP = "jop"


class DomainType(str, Enum):
    """Abstract domains."""

    CP = "cp"
    LCP = "lcp"
    CCP = "ccp"


class Verdict(str, Enum):
    """Assertion verdicts."""

    VERIFIED = "verified"
    UNKNOWN = "unknown"


ALL_ENGINES = frozenset(EngineType)


class ConstantFinding(BaseModel):
    """Value of one variable at one control state (integer, ⊤ or ⊥)."""

    model_config = ConfigDict(frozen=True)

    process: str = Field(..., description="Process owning the control state")
    state: str = Field(..., description="Control state (target set is its product nodes)")
    variable: str = Field(..., description="Variable name")
    value: FindingValue = Field(..., description="Integer constant, '⊤' or '⊥'")

    @field_validator("value")
    @classmethod
    def value_is_constant_or_symbol(cls, v: FindingValue) -> FindingValue:
        """Only integers and the two lattice symbols are allowed."""
        if isinstance(v, str) and v not in (TOP_SYMBOL, BOTTOM_SYMBOL):
            raise ValueError(f"finding value must be an integer, {TOP_SYMBOL} or {BOTTOM_SYMBOL}")
        return v

    @property
    def is_constant(self) -> bool:
        return isinstance(self.value, int)


class AssertionVerdict(BaseModel):
    """Outcome of checking one assertion."""

    model_config = ConfigDict(frozen=True)

    process: str
    state: str
    expression: str
    verdict: Verdict
    values: Dict[str, FindingValue] = Field(
        default_factory=dict, description="Inferred values of the referenced variables"
    )

    def is_verified(self) -> bool:
        return self.verdict == Verdict.VERIFIED


class EngineMetadata(BaseModel):
    """Which engine produced a report and how much work it did."""

    model_config = ConfigDict(frozen=True)

    engine: EngineType
    domain: DomainType
    theta: Optional[int] = Field(None, description="Queue bound (forward engine only)")
    threads: int = 1
    runtime_seconds: Optional[float] = Field(
        None, description="Wall-clock time; omitted unless timings are requested"
    )
    statistics: Dict[str, int] = Field(default_factory=dict)


class Report(BaseModel):
    """Result of ``analyze`` or ``check``."""

    model_config = ConfigDict(frozen=True)

    system: str = Field(..., description="Name of the analyzed model")
    target: Optional[str] = Field(None, description="PROCESS.STATE for analyze")
    findings: List[ConstantFinding] = Field(default_factory=list)
    verdicts: List[AssertionVerdict] = Field(default_factory=list)
    metadata: EngineMetadata
    diagnostics: List[str] = Field(default_factory=list)
    trace: List[Dict[str, Any]] = Field(default_factory=list)

    def constants(self) -> Dict[str, FindingValue]:
        """Variable -> value for the findings that are constants."""
        return {f.variable: f.value for f in self.findings if f.is_constant}

    def values(self) -> Dict[str, FindingValue]:
        """Variable -> value for every finding."""
        return {f.variable: f.value for f in self.findings}

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def to_json(self) -> str:
        """Deterministic JSON document."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)


class ComparisonRow(BaseModel):
    """One engine configuration in a comparison."""

    model_config = ConfigDict(frozen=True)

    engine: EngineType
    domain: DomainType
    theta: Optional[int] = None
    status: str = Field("ok", description="'ok' or the reason the engine was skipped")
    constants: Optional[int] = Field(None, description="Uses with a constant value")
    assertions_verified: Optional[int] = None
    runtime_seconds: Optional[float] = None

    @property
    def label(self) -> str:
        suffix = f" Θ={self.theta}" if self.theta is not None else ""
        return f"{self.engine.value}/{self.domain.value}{suffix}"


class ComparisonReport(BaseModel):
    """Result of ``compare``."""

    model_config = ConfigDict(frozen=True)

    system: str = Field(..., description="Name of the analyzed model")
    uses: int = Field(..., description="Number of (process, state, variable) uses")
    assertions: int
    rows: List[ComparisonRow] = Field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
