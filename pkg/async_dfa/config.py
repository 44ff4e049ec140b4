"""
Analysis settings.

Single source of truth for engine limits and defaults. Values come from
explicit arguments, then ``DFAS_*`` environment variables (a ``.env`` file is
honoured), then the defaults below.
"""

import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

# ========================================================================
# DEFAULTS
# ========================================================================

DEFAULT_THETA = 2
DEFAULT_MAX_NODES = 1_000_000
DEFAULT_MAX_ITERATIONS = 10_000_000
DEFAULT_ORACLE_WINDOW = 10
DEFAULT_CALL_DEPTH = 8

# ========================================================================
# ENVIRONMENT VARIABLES
# ========================================================================

ENV_THETA = "DFAS_THETA"
ENV_MAX_NODES = "DFAS_MAX_NODES"
ENV_MAX_ITERATIONS = "DFAS_MAX_ITERS"
ENV_THREADS = "DFAS_THREADS"


class AnalysisSettings(BaseModel):
    """
    Limits and knobs shared by every engine.

    Immutable; derive a modified copy with ``settings.model_copy(update=...)``
    or ``settings.override(...)``.
    """

    model_config = ConfigDict(frozen=True)

    theta: int = Field(DEFAULT_THETA, ge=0, description="Forward engine queue bound")
    max_nodes: int = Field(DEFAULT_MAX_NODES, ge=1, description="Product construction cap")
    max_iterations: int = Field(
        DEFAULT_MAX_ITERATIONS, ge=1, description="Worklist iteration cap per engine run"
    )
    threads: int = Field(1, ge=1, description="Worker threads for batch propagation")
    oracle_window: int = Field(
        DEFAULT_ORACLE_WINDOW, ge=1, description="Extra path length used to detect saturation"
    )
    call_depth: int = Field(DEFAULT_CALL_DEPTH, ge=0, description="Oracle call-stack cap")

    @classmethod
    def from_env(cls, **overrides: Any) -> "AnalysisSettings":
        """
        Build settings from the environment.

        Args:
            **overrides: Explicit values (``None`` entries are ignored)

        Returns:
            Validated settings
        """
        load_dotenv()
        values: Dict[str, Any] = {}
        for field_name, env_name in (
            ("theta", ENV_THETA),
            ("max_nodes", ENV_MAX_NODES),
            ("max_iterations", ENV_MAX_ITERATIONS),
            ("threads", ENV_THREADS),
        ):
            raw = os.getenv(env_name)
            if raw:
                values[field_name] = int(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def override(self, **changes: Optional[Any]) -> "AnalysisSettings":
        """Copy with the non-``None`` changes applied (re-validated)."""
        data = self.model_dump()
        data.update({k: v for k, v in changes.items() if v is not None})
        return AnalysisSettings(**data)

    @classmethod
    def check_env(cls) -> List[str]:
        """
        Report malformed ``DFAS_*`` environment values.

        Returns:
            List of problems (empty if all are usable)
        """
        problems = []
        for env_name in (ENV_THETA, ENV_MAX_NODES, ENV_MAX_ITERATIONS, ENV_THREADS):
            raw = os.getenv(env_name)
            if raw and not raw.strip().isdigit():
                problems.append(f"{env_name} must be a non-negative integer, got {raw!r}")
        return problems
