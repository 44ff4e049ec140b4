"""
Lattice and transfer-function contracts shared by every domain and engine.

Two abstractions live here:

* ``Lattice`` - the complete lattice L of data-flow values (join, leq, bottom,
  optional widening).
* ``TransferAlgebra`` - a symbolic representation of monotone functions
  L -> L that can be composed, joined, compared and applied.

Composition is "apply left first": ``compose(f, g)`` is the function that runs
``f`` and then ``g``, which is path order.

All values and functions are immutable, so they can be shared across threads.
"""

from abc import ABC, abstractmethod
from functools import reduce
from typing import Generic, Iterable, Tuple, TypeVar

from .errors import DomainMismatchError

V = TypeVar("V")
F = TypeVar("F")


class Lattice(ABC, Generic[V]):
    """
    Complete lattice of abstract values.

    Implementations must make ``join`` commutative, associative and
    idempotent with ``bottom()`` as identity. ``widen`` is optional; when
    ``supports_widening`` is set it must satisfy
    ``leq(join(a, b), widen(a, b))``.
    """

    name: str = "lattice"
    supports_widening: bool = False

    @abstractmethod
    def bottom(self) -> V:
        """Return the least element."""

    @abstractmethod
    def join(self, a: V, b: V) -> V:
        """Least upper bound."""

    @abstractmethod
    def leq(self, a: V, b: V) -> bool:
        """Partial order."""

    def equals(self, a: V, b: V) -> bool:
        """Lattice equality (mutual ordering)."""
        return self.leq(a, b) and self.leq(b, a)

    def widen(self, old: V, new: V) -> V:
        """Widening; defaults to join for lattices that do not need one."""
        return self.join(old, new)

    def join_all(self, values: Iterable[V]) -> V:
        """Join of a finite collection (bottom when empty)."""
        return reduce(self.join, values, self.bottom())


class TransferAlgebra(ABC, Generic[F, V]):
    """
    Symbolic transfer functions over a value lattice.

    ``fleq`` is decided on the representation and must imply the semantic
    order: ``fleq(f, g)`` implies ``leq(apply(f, v), apply(g, v))`` for every v.
    """

    name: str = "algebra"

    def __init__(self, variables: Tuple[str, ...], lattice: Lattice[V]) -> None:
        self.variables = tuple(variables)
        self.lattice = lattice

    @abstractmethod
    def identity(self) -> F:
        """The identity function."""

    @abstractmethod
    def compose(self, f: F, g: F) -> F:
        """``g`` after ``f``."""

    @abstractmethod
    def fjoin(self, f: F, g: F) -> F:
        """Least upper bound of two functions in the representation."""

    @abstractmethod
    def fleq(self, f: F, g: F) -> bool:
        """Structural order on functions."""

    @abstractmethod
    def apply(self, f: F, value: V) -> V:
        """Evaluate ``f`` on a value."""

    @abstractmethod
    def from_action(self, action: object) -> F:
        """Transfer function of a model action."""

    @abstractmethod
    def render(self, f: F) -> str:
        """Textual form used in reports and traces."""

    @abstractmethod
    def owns(self, f: object) -> bool:
        """True if ``f`` is a function of this domain over the same variables."""

    def fequals(self, f: F, g: F) -> bool:
        """Equality as mutual ``fleq``."""
        return self.fleq(f, g) and self.fleq(g, f)

    def fjoin_all(self, functions: Iterable[F]) -> F:
        """Join of a non-empty collection of functions."""
        items = list(functions)
        if not items:
            raise ValueError("fjoin_all needs at least one function")
        return reduce(self.fjoin, items)

    def describe(self) -> str:
        """Domain name with its variable universe."""
        return f"{self.name}[{','.join(self.variables)}]"


def ptf_of(functions: Iterable[object], algebra: TransferAlgebra[F, V]) -> F:
    """
    Path transfer function: fold of edge functions in path order.

    Args:
        functions: Edge transfer functions, first edge first
        algebra: Domain every function must belong to

    Returns:
        Composed function (identity for the empty path)

    Raises:
        DomainMismatchError: If a function belongs to another domain or universe
    """
    result = algebra.identity()
    for position, f in enumerate(functions):
        if not algebra.owns(f):
            raise DomainMismatchError(
                operation=f"ptf_of (edge {position})",
                expected=algebra.describe(),
                actual=type(f).__name__,
            )
        result = algebra.compose(result, f)  # type: ignore[arg-type]
    return result
