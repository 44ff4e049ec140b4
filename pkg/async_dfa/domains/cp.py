"""
Constant propagation (CP).

``CpEnv`` is the value lattice every engine reports in: either unreachable
(⊥) or a total map from variables to an integer constant or ⊤. The CP
transfer algebra keeps actions symbolic (sequence and join trees) since CP
functions have no finite normal form; it can be applied and composed but not
ordered.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from ..errors import DomainMismatchError, UnsupportedOperationError
from ..lattice import Lattice, TransferAlgebra
from ..model.actions import Action, Assign, Skip, render_action
from ..model.expressions import evaluate, variables_of


class _Top:
    """The non-constant value."""

    _instance: Optional["_Top"] = None

    def __new__(cls) -> "_Top":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "⊤"


TOP = _Top()

CpVal = Union[int, _Top]


def join_values(a: CpVal, b: CpVal) -> CpVal:
    return a if a == b else TOP


@dataclass(frozen=True)
class CpEnv:
    """⊥ when ``values`` is ``None``; otherwise one ``CpVal`` per variable."""

    variables: Tuple[str, ...]
    values: Optional[Tuple[CpVal, ...]]

    @classmethod
    def unreachable(cls, variables: Iterable[str]) -> "CpEnv":
        return cls(tuple(variables), None)

    @classmethod
    def of(cls, variables: Iterable[str], mapping: Mapping[str, CpVal]) -> "CpEnv":
        names = tuple(variables)
        return cls(names, tuple(mapping.get(v, TOP) for v in names))

    @classmethod
    def top(cls, variables: Iterable[str]) -> "CpEnv":
        names = tuple(variables)
        return cls(names, tuple(TOP for _ in names))

    @property
    def is_unreachable(self) -> bool:
        return self.values is None

    def get(self, variable: str) -> CpVal:
        if self.values is None:
            raise ValueError("unreachable environment has no variable values")
        return self.values[self.variables.index(variable)]

    def as_dict(self) -> Dict[str, CpVal]:
        if self.values is None:
            return {}
        return dict(zip(self.variables, self.values))

    def constants(self) -> Dict[str, int]:
        return {v: c for v, c in self.as_dict().items() if not isinstance(c, _Top)}

    def concrete(self) -> Dict[str, int]:
        """Valuation for expression evaluation; raises if any variable is ⊤."""
        constants = self.constants()
        if self.values is None or len(constants) != len(self.variables):
            raise ValueError("environment is not fully constant")
        return constants

    def render(self) -> str:
        if self.values is None:
            return "⊥"
        return "{" + ", ".join(f"{v}={c!r}" for v, c in zip(self.variables, self.values)) + "}"

    def __str__(self) -> str:
        return self.render()


class CpLattice(Lattice[CpEnv]):
    """Pointwise flat lattice over a fixed variable universe."""

    name = "cp"
    supports_widening = True

    def __init__(self, variables: Iterable[str]) -> None:
        self.variables = tuple(variables)

    def _check(self, env: CpEnv) -> None:
        if env.variables != self.variables:
            raise DomainMismatchError(
                "cp lattice", f"variables {self.variables}", f"variables {env.variables}"
            )

    def bottom(self) -> CpEnv:
        return CpEnv.unreachable(self.variables)

    def join(self, a: CpEnv, b: CpEnv) -> CpEnv:
        self._check(a)
        self._check(b)
        if a.values is None:
            return b
        if b.values is None:
            return a
        return CpEnv(self.variables, tuple(join_values(x, y) for x, y in zip(a.values, b.values)))

    def leq(self, a: CpEnv, b: CpEnv) -> bool:
        self._check(a)
        self._check(b)
        if a.values is None:
            return True
        if b.values is None:
            return False
        return all(y is TOP or x == y for x, y in zip(a.values, b.values))

    def widen(self, old: CpEnv, new: CpEnv) -> CpEnv:
        # finite height: the pointwise join is already a widening
        return self.join(old, new)


def cp_transfer(action: Action, env: CpEnv) -> CpEnv:
    """
    Full constant-propagation semantics of one action.

    Assignments are folded when every operand is constant (division by zero
    yields ⊤); every other action leaves the environment unchanged.
    """
    if env.values is None or not isinstance(action, Assign):
        return env
    values = env.as_dict()
    for target, expr in action.assignments:
        operands = variables_of(expr)
        if any(isinstance(values[v], _Top) for v in operands):
            values[target] = TOP
            continue
        try:
            values[target] = int(evaluate(expr, values))  # type: ignore[arg-type]
        except ZeroDivisionError:
            values[target] = TOP
    return CpEnv(env.variables, tuple(values[v] for v in env.variables))


# ========================================================================
# SYMBOLIC CP FUNCTIONS
# ========================================================================


@dataclass(frozen=True)
class CpAction:
    variables: Tuple[str, ...]
    action: Action


@dataclass(frozen=True)
class CpSequence:
    variables: Tuple[str, ...]
    first: "CpFunction"
    then: "CpFunction"


@dataclass(frozen=True)
class CpJoin:
    variables: Tuple[str, ...]
    left: "CpFunction"
    right: "CpFunction"


CpFunction = Union[CpAction, CpSequence, CpJoin]


class CpAlgebra(TransferAlgebra[CpFunction, CpEnv]):
    """CP transfer functions kept as expression trees over actions."""

    name = "cp"

    def __init__(self, variables: Iterable[str]) -> None:
        names = tuple(variables)
        super().__init__(names, CpLattice(names))

    def owns(self, f: object) -> bool:
        return isinstance(f, (CpAction, CpSequence, CpJoin)) and f.variables == self.variables

    def identity(self) -> CpFunction:
        return CpAction(self.variables, Skip())

    def from_action(self, action: object) -> CpFunction:
        return CpAction(self.variables, action)  # type: ignore[arg-type]

    def compose(self, f: CpFunction, g: CpFunction) -> CpFunction:
        if f == self.identity():
            return g
        if g == self.identity():
            return f
        return CpSequence(self.variables, f, g)

    def fjoin(self, f: CpFunction, g: CpFunction) -> CpFunction:
        return f if f == g else CpJoin(self.variables, f, g)

    def fleq(self, f: CpFunction, g: CpFunction) -> bool:
        if f == g:
            return True
        raise UnsupportedOperationError(
            "cp", "fleq", "constant-propagation functions have no decidable structural order"
        )

    def apply(self, f: CpFunction, value: CpEnv) -> CpEnv:
        if isinstance(f, CpAction):
            return cp_transfer(f.action, value)
        if isinstance(f, CpSequence):
            return self.apply(f.then, self.apply(f.first, value))
        return self.lattice.join(self.apply(f.left, value), self.apply(f.right, value))

    def render(self, f: CpFunction) -> str:
        if isinstance(f, CpAction):
            return render_action(f.action)
        if isinstance(f, CpSequence):
            return f"{self.render(f.first)}; {self.render(f.then)}"
        return f"({self.render(f.left)}) ⊔ ({self.render(f.right)})"
