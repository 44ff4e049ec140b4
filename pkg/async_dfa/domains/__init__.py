"""
Abstract domains.

``cp`` is both the value lattice and a (non-orderable) function algebra;
``lcp`` and ``ccp`` are symbolic function algebras over CP values.
"""

from typing import Iterable, Union

from ..errors import UnsupportedEngineError
from ..models import DomainType
from .ccp import CcpAlgebra, CopyFormula
from .cp import TOP, CpAlgebra, CpEnv, CpLattice, CpVal, cp_transfer
from .formulas import TOP_FORMULA, ConstFormula, Formula, FormulaAlgebra, FormulaFunction
from .lcp import AffineFormula, LcpAlgebra, affine

Algebra = Union[CpAlgebra, LcpAlgebra, CcpAlgebra]

__all__ = [
    "TOP",
    "TOP_FORMULA",
    "AffineFormula",
    "Algebra",
    "CcpAlgebra",
    "ConstFormula",
    "CopyFormula",
    "CpAlgebra",
    "CpEnv",
    "CpLattice",
    "CpVal",
    "Formula",
    "FormulaAlgebra",
    "FormulaFunction",
    "LcpAlgebra",
    "affine",
    "cp_transfer",
    "get_algebra",
]


def get_algebra(domain: Union[str, DomainType], variables: Iterable[str]) -> Algebra:
    """
    Create the transfer algebra for a domain name.

    Args:
        domain: "cp", "lcp" or "ccp"
        variables: Variable universe in declaration order

    Raises:
        UnsupportedEngineError: For unknown domain names
    """
    name = domain.value if isinstance(domain, DomainType) else str(domain).lower().strip()
    if name == DomainType.CP.value:
        return CpAlgebra(variables)
    if name == DomainType.LCP.value:
        return LcpAlgebra(variables)
    if name == DomainType.CCP.value:
        return CcpAlgebra(variables)
    raise UnsupportedEngineError(
        "analysis", f"unknown domain '{domain}'", supported=[d.value for d in DomainType]
    )
