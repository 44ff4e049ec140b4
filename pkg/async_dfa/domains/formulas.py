"""
Per-variable formula functions shared by the LCP and CCP domains.

A function assigns each output variable a formula over the *incoming*
values: a constant, ⊤, or a formula with a single source variable (affine
maps for LCP, copies for CCP). The whole function may instead be ``BotFn``,
which maps every value to ⊥; per-variable ⊥ does not exist.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from ..errors import DomainMismatchError
from ..lattice import TransferAlgebra
from ..model.actions import Assign
from ..model.expressions import Expr
from .cp import TOP, CpEnv, CpLattice, CpVal


class Formula(ABC):
    """Right-hand side for one output variable."""

    source: Optional[str]

    def substitute(self, inner: "Formula") -> "Formula":
        """Formula obtained when ``source`` is itself given by ``inner``."""
        return self

    def evaluate(self, value: CpVal) -> CpVal:
        """Value for the given value of ``source``."""
        raise NotImplementedError

    def linear(self) -> Optional[Tuple[int, Optional[str], int]]:
        """``(a, u, b)`` meaning ``a*u + b`` (``a`` is 0 for constants); ``None`` for ⊤."""
        return None

    @abstractmethod
    def render(self) -> str:
        """Right-hand side text."""


@dataclass(frozen=True)
class ConstFormula(Formula):
    value: int
    source: Optional[str] = field(default=None, init=False)

    def linear(self) -> Optional[Tuple[int, Optional[str], int]]:
        return (0, None, self.value)

    def render(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class TopFormula(Formula):
    source: Optional[str] = field(default=None, init=False)

    def render(self) -> str:
        return "⊤"


TOP_FORMULA = TopFormula()


@dataclass(frozen=True)
class FormulaFunction:
    """One formula per variable, or ``BotFn`` when ``formulas`` is ``None``."""

    domain: str
    variables: Tuple[str, ...]
    formulas: Optional[Tuple[Formula, ...]]

    @property
    def is_bottom(self) -> bool:
        return self.formulas is None

    def formula(self, variable: str) -> Formula:
        if self.formulas is None:
            raise ValueError("BotFn has no per-variable formulas")
        return self.formulas[self.variables.index(variable)]


class FormulaAlgebra(TransferAlgebra[FormulaFunction, CpEnv]):
    """Structural lattice operations on ``FormulaFunction``."""

    def __init__(self, variables: Iterable[str]) -> None:
        names = tuple(variables)
        super().__init__(names, CpLattice(names))
        self._index: Dict[str, int] = {v: i for i, v in enumerate(names)}
        self._identity = FormulaFunction(
            self.name, names, tuple(self.identity_formula(v) for v in names)
        )

    @abstractmethod
    def identity_formula(self, variable: str) -> Formula:
        """Formula meaning "unchanged"."""

    @abstractmethod
    def assignment_formula(self, expr: Expr) -> Formula:
        """Formula for ``v := expr`` in this domain."""

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def identity(self) -> FormulaFunction:
        return self._identity

    def bottom_function(self) -> FormulaFunction:
        return FormulaFunction(self.name, self.variables, None)

    def function(self, updates: Mapping[str, Formula]) -> FormulaFunction:
        """Identity except for the given outputs."""
        for var in updates:
            if var not in self._index:
                raise DomainMismatchError(f"{self.name} function", self.describe(), var)
        return FormulaFunction(
            self.name,
            self.variables,
            tuple(updates.get(v, self.identity_formula(v)) for v in self.variables),
        )

    def from_action(self, action: object) -> FormulaFunction:
        if not isinstance(action, Assign):
            return self._identity
        result = self._identity
        for target, expr in action.assignments:
            result = self.compose(result, self.function({target: self.assignment_formula(expr)}))
        return result

    def owns(self, f: object) -> bool:
        return (
            isinstance(f, FormulaFunction)
            and f.domain == self.name
            and f.variables == self.variables
        )

    def _check(self, operation: str, *functions: FormulaFunction) -> None:
        for f in functions:
            if not self.owns(f):
                raise DomainMismatchError(
                    operation,
                    self.describe(),
                    f"{getattr(f, 'domain', type(f).__name__)}[{','.join(getattr(f, 'variables', ()))}]",
                )

    # ------------------------------------------------------------------
    # lattice operations
    # ------------------------------------------------------------------

    def compose(self, f: FormulaFunction, g: FormulaFunction) -> FormulaFunction:
        self._check(f"{self.name} compose", f, g)
        if f.formulas is None or g.formulas is None:
            return self.bottom_function()
        inner = f.formulas
        out = tuple(
            phi if phi.source is None else phi.substitute(inner[self._index[phi.source]])
            for phi in g.formulas
        )
        return FormulaFunction(self.name, self.variables, out)

    def fjoin(self, f: FormulaFunction, g: FormulaFunction) -> FormulaFunction:
        self._check(f"{self.name} join", f, g)
        if f.formulas is None:
            return g
        if g.formulas is None:
            return f
        out = tuple(a if a == b else TOP_FORMULA for a, b in zip(f.formulas, g.formulas))
        return FormulaFunction(self.name, self.variables, out)

    def fleq(self, f: FormulaFunction, g: FormulaFunction) -> bool:
        self._check(f"{self.name} order", f, g)
        if f.formulas is None:
            return True
        if g.formulas is None:
            return False
        return all(a == b or b == TOP_FORMULA for a, b in zip(f.formulas, g.formulas))

    def fcovered(self, f: FormulaFunction, functions: Iterable[FormulaFunction]) -> bool:
        """
        Whether ``f(v) ⊑ ⊔ g(v)`` for every value ``v`` and every ``g`` in ``functions``.

        This is the pointwise order against the pointwise join. It implies
        ``fleq(f, fjoin_all(functions))`` but not conversely: the structural
        join goes to ⊤ even where the joined formulas still agree on some
        inputs (``x'=1 ⊔ x'=y`` at ``y = 1``).
        """
        items = list(functions)
        self._check(f"{self.name} cover", f, *items)
        if f.formulas is None:
            return True
        live = [g.formulas for g in items if g.formulas is not None]
        if not live:
            return False
        return all(
            _formula_covered(phi, [formulas[i] for formulas in live])
            for i, phi in enumerate(f.formulas)
        )

    def apply(self, f: FormulaFunction, value: CpEnv) -> CpEnv:
        if value.values is None or f.formulas is None:
            return self.lattice.bottom()
        incoming = value.values
        out = []
        for phi in f.formulas:
            if isinstance(phi, ConstFormula):
                out.append(phi.value)
            elif phi.source is None:
                out.append(TOP)
            else:
                out.append(phi.evaluate(incoming[self._index[phi.source]]))
        return CpEnv(self.variables, tuple(out))

    def render(self, f: FormulaFunction) -> str:
        if f.formulas is None:
            return "⊥"
        return ",".join(f"{v}'={phi.render()}" for v, phi in zip(self.variables, f.formulas))

    def height_bound(self) -> int:
        """Longest strictly ascending chain: BotFn, then each variable rises to ⊤ once."""
        return len(self.variables) + 2


# ========================================================================
# POINTWISE COVERING
# ========================================================================

# every integer value works for the common result
_ANY = object()


def _agreement(options: List[Tuple[int, Optional[str], int]]) -> object:
    """
    Integer inputs on which all ``a*u + b`` options give the same value ``k``.

    Returns ``None`` when there are none, ``_ANY`` when ``k`` may take
    infinitely many values, and otherwise ``(k, {u: value})``.
    """
    constants = {b for a, u, b in options if u is None}
    if len(constants) > 1:
        return None
    k: Optional[int] = next(iter(constants)) if constants else None
    by_source: Dict[str, List[Tuple[int, int]]] = {}
    for a, u, b in options:
        if u is not None:
            by_source.setdefault(u, []).append((a, b))

    assignment: Dict[str, int] = {}
    for u, forms in by_source.items():
        if len(forms) < 2:
            continue
        a1, b1 = forms[0]
        for a2, b2 in forms[1:]:
            # a1*u + b1 = a2*u + b2
            if a1 == a2 or (b2 - b1) % (a1 - a2):
                return None
            value = (b2 - b1) // (a1 - a2)
            if assignment.setdefault(u, value) != value:
                return None
        result = a1 * assignment[u] + b1
        if k is None:
            k = result
        elif k != result:
            return None

    singles = [(u, forms[0]) for u, forms in by_source.items() if len(forms) == 1]
    if k is None:
        # k ≡ b (mod |a|) for every single-source option
        for i, (_, (a1, b1)) in enumerate(singles):
            for _, (a2, b2) in singles[i + 1 :]:
                if (b1 - b2) % gcd(abs(a1), abs(a2)):
                    return None
        return _ANY
    for u, (a, b) in singles:
        if (k - b) % a:
            return None
        assignment[u] = (k - b) // a
    return (k, assignment)


def _formula_covered(phi: Formula, options: List[Formula]) -> bool:
    """``phi(v) ⊑ ⊔ option(v)`` for every value ``v``."""
    distinct = list(dict.fromkeys(options))
    if phi in distinct or TOP_FORMULA in distinct:
        return True
    # phi differs from every option, so it escapes exactly where they all agree
    forms = [option.linear() for option in distinct]
    agreement = _agreement([form for form in forms if form is not None])
    if agreement is None:
        return True
    target = phi.linear()
    if agreement is _ANY or target is None:
        return False
    k, assignment = agreement  # type: ignore[misc]
    a, u, b = target
    if u is None:
        return b == k
    if u not in assignment:
        return False
    return a * assignment[u] + b == k
