"""
Copy constant propagation (CCP).

Only ``x := c`` and ``x := y``, as written, are tracked; any other
assignment makes the target ⊤. The functions are the LCP functions whose
affine parts are plain copies, so ``LcpAlgebra.embed`` maps them into LCP.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from ..model.expressions import Expr, IntLiteral, UnaryOp, VarRef
from .cp import CpVal
from .formulas import TOP_FORMULA, ConstFormula, Formula, FormulaAlgebra


@dataclass(frozen=True)
class CopyFormula(Formula):
    source: str

    def substitute(self, inner: Formula) -> Formula:
        return inner

    def evaluate(self, value: CpVal) -> CpVal:
        return value

    def linear(self) -> Optional[Tuple[int, Optional[str], int]]:
        return (1, self.source, 0)

    def render(self) -> str:
        return self.source


class CcpAlgebra(FormulaAlgebra):
    """CCP transfer functions."""

    name = "ccp"

    def identity_formula(self, variable: str) -> Formula:
        return CopyFormula(variable)

    def assignment_formula(self, expr: Expr) -> Formula:
        if isinstance(expr, IntLiteral):
            return ConstFormula(expr.value)
        if isinstance(expr, UnaryOp) and expr.op == "-" and isinstance(expr.operand, IntLiteral):
            return ConstFormula(-expr.operand.value)
        if isinstance(expr, VarRef):
            return CopyFormula(expr.name)
        return TOP_FORMULA
