"""
Shipped example models.

``example_a`` and ``example_b`` are the single-process running examples (the
second with a recursive procedure), ``two_process`` is a two-process
ping-pong over channels c1/c2, and ``mutex`` is a token-passing mutual
exclusion system whose assertion only infeasible paths violate.
"""

from importlib import resources
from typing import List

from ..errors import UnknownIdentifierError
from ..model import Model, parse_model

CATALOG_PREFIX = "catalog:"


def available() -> List[str]:
    """Names of the shipped models."""
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(__name__).iterdir()
        if entry.name.endswith(".json")
    )


def read_text(name: str) -> str:
    """
    Source text of a shipped model.

    Raises:
        UnknownIdentifierError: If no model has that name
    """
    if name not in available():
        raise UnknownIdentifierError("catalog model", name, known=available())
    return resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8")


def load(name: str, check: bool = True) -> Model:
    """Parse a shipped model."""
    return parse_model(read_text(name), name=name, check=check)
