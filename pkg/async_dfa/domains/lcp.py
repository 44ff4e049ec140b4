"""
Linear constant propagation (LCP).

Each output variable is a constant, ⊤, or ``a*u + b`` in the incoming value
of a single variable ``u`` (a ≠ 0). Assignments that are not of that shape
make the target ⊤.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from ..model.expressions import Expr, linear_form
from .cp import TOP, CpVal
from .formulas import TOP_FORMULA, ConstFormula, Formula, FormulaAlgebra, FormulaFunction


@dataclass(frozen=True)
class AffineFormula(Formula):
    coeff: int
    source: str
    offset: int

    def __post_init__(self) -> None:
        if self.coeff == 0:
            raise ValueError("affine coefficient must be non-zero; use ConstFormula")

    def substitute(self, inner: Formula) -> Formula:
        if isinstance(inner, ConstFormula):
            return ConstFormula(self.coeff * inner.value + self.offset)
        if isinstance(inner, AffineFormula):
            return AffineFormula(
                self.coeff * inner.coeff, inner.source, self.coeff * inner.offset + self.offset
            )
        return TOP_FORMULA

    def evaluate(self, value: CpVal) -> CpVal:
        if value is TOP:
            return TOP
        return self.coeff * value + self.offset  # type: ignore[operator]

    def linear(self) -> Optional[Tuple[int, Optional[str], int]]:
        return (self.coeff, self.source, self.offset)

    def render(self) -> str:
        if self.coeff == 1:
            text = self.source
        elif self.coeff == -1:
            text = f"-{self.source}"
        else:
            text = f"{self.coeff}*{self.source}"
        if self.offset > 0:
            text += f"+{self.offset}"
        elif self.offset < 0:
            text += f"-{-self.offset}"
        return text


def affine(coeff: int, source: str, offset: int = 0) -> Formula:
    """``coeff*source + offset``, collapsing to a constant when ``coeff`` is 0."""
    return ConstFormula(offset) if coeff == 0 else AffineFormula(coeff, source, offset)


class LcpAlgebra(FormulaAlgebra):
    """LCP transfer functions."""

    name = "lcp"

    def identity_formula(self, variable: str) -> Formula:
        return AffineFormula(1, variable, 0)

    def assignment_formula(self, expr: Expr) -> Formula:
        form = linear_form(expr)
        if form is None:
            return TOP_FORMULA
        if form.is_constant:
            return ConstFormula(form.constant)
        if len(form.coefficients) == 1:
            [(source, coeff)] = form.coefficients
            return AffineFormula(coeff, source, form.constant)
        return TOP_FORMULA

    def embed(self, f: FormulaFunction) -> FormulaFunction:
        """Reinterpret a function of a narrower formula domain as LCP."""
        if f.formulas is None:
            return self.bottom_function()
        return self.function(
            {
                v: (AffineFormula(1, phi.source, 0) if phi.source is not None else phi)
                for v, phi in zip(f.variables, f.formulas)
            }
        )
