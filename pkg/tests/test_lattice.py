"""
Tests for the lattice and transfer-algebra contracts.

Tests cover:
- CP value lattice laws (join, order, bottom, widening)
- Path transfer functions and domain mismatches
- Lattice laws of LCP functions, including distributivity over joins
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from async_dfa.domains import CcpAlgebra, CpEnv, CpLattice, LcpAlgebra
from async_dfa.domains.formulas import ConstFormula
from async_dfa.errors import DomainMismatchError
from async_dfa.lattice import ptf_of
from async_dfa.model import parse_action
from tests.strategies import LCP, VARIABLES, cp_envs, lcp_functions

CP = CpLattice(VARIABLES)


@pytest.mark.property
class TestCpLatticeLaws:
    """Pointwise flat lattice laws over x, y, z."""

    @given(cp_envs(), cp_envs())
    def test_join_commutative(self, a, b):
        """a ⊔ b = b ⊔ a."""
        assert CP.join(a, b) == CP.join(b, a)

    @given(cp_envs(), cp_envs(), cp_envs())
    def test_join_associative(self, a, b, c):
        """(a ⊔ b) ⊔ c = a ⊔ (b ⊔ c)."""
        assert CP.join(CP.join(a, b), c) == CP.join(a, CP.join(b, c))

    @given(cp_envs())
    def test_join_idempotent_with_bottom_identity(self, a):
        """a ⊔ a = a and ⊥ ⊔ a = a."""
        assert CP.join(a, a) == a
        assert CP.join(CP.bottom(), a) == a

    @given(cp_envs(), cp_envs())
    def test_join_is_upper_bound(self, a, b):
        """Both operands are below their join."""
        joined = CP.join(a, b)
        assert CP.leq(a, joined)
        assert CP.leq(b, joined)

    @given(cp_envs(), cp_envs())
    def test_order_agrees_with_join(self, a, b):
        """a ⊑ b iff a ⊔ b = b."""
        assert CP.leq(a, b) == (CP.join(a, b) == b)

    @given(cp_envs(), cp_envs())
    def test_widening_covers_join(self, a, b):
        """The widening is above the join."""
        assert CP.leq(CP.join(a, b), CP.widen(a, b))


class TestCpLatticeBasics:
    """Edge cases of the value lattice."""

    def test_join_all_of_nothing_is_bottom(self):
        """An empty join is unreachable."""
        assert CP.join_all([]).is_unreachable

    def test_conflicting_constants_join_to_top(self):
        """Different constants lose the variable."""
        a = CpEnv.of(VARIABLES, {"x": 1, "y": 2, "z": 3})
        b = CpEnv.of(VARIABLES, {"x": 1, "y": 5, "z": 3})
        assert CP.join(a, b).constants() == {"x": 1, "z": 3}

    def test_universe_mismatch_rejected(self):
        """Values over different variable sets cannot be joined."""
        with pytest.raises(DomainMismatchError):
            CP.join(CpEnv.top(("x",)), CpEnv.top(VARIABLES))

    def test_unreachable_env_has_no_values(self):
        """Reading a variable of ⊥ is an error."""
        with pytest.raises(ValueError):
            CpEnv.unreachable(VARIABLES).get("x")


class TestPathTransferFunctions:
    """ptf_of folds edge functions in path order."""

    def test_empty_path_is_identity(self):
        """No edges, no change."""
        assert ptf_of([], LCP) == LCP.identity()

    def test_path_order(self):
        """x := 1 then y := x gives y' = 1."""
        f = LCP.function({"x": ConstFormula(1)})
        g = LCP.from_action(parse_action("y := x"))
        assert LCP.render(ptf_of([f, g], LCP)) == "x'=1,y'=1,z'=z"
        assert LCP.render(ptf_of([g, f], LCP)) == "x'=1,y'=x,z'=z"

    def test_foreign_domain_rejected(self):
        """A CCP function cannot appear in an LCP path."""
        ccp = CcpAlgebra(VARIABLES)
        with pytest.raises(DomainMismatchError) as exc_info:
            ptf_of([LCP.identity(), ccp.identity()], LCP)

        assert "edge 1" in exc_info.value.operation

    def test_foreign_universe_rejected(self):
        """Functions over another variable set are rejected by compose."""
        narrow = LcpAlgebra(("x",))
        with pytest.raises(DomainMismatchError):
            LCP.compose(LCP.identity(), narrow.identity())

    def test_fjoin_all_needs_a_function(self):
        """Joining no functions has no result."""
        with pytest.raises(ValueError):
            LCP.fjoin_all([])


@pytest.mark.property
class TestLcpFunctionLaws:
    """Lattice and composition laws of LCP functions."""

    @given(lcp_functions(), lcp_functions())
    def test_fjoin_commutative(self, f, g):
        """f ⊔ g = g ⊔ f."""
        assert LCP.fjoin(f, g) == LCP.fjoin(g, f)

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_fjoin_associative(self, f, g, h):
        """(f ⊔ g) ⊔ h = f ⊔ (g ⊔ h)."""
        assert LCP.fjoin(LCP.fjoin(f, g), h) == LCP.fjoin(f, LCP.fjoin(g, h))

    @given(lcp_functions())
    def test_fjoin_idempotent(self, f):
        """f ⊔ f = f."""
        assert LCP.fjoin(f, f) == f

    @given(lcp_functions(), lcp_functions())
    def test_fjoin_is_upper_bound(self, f, g):
        """Both operands are below their join."""
        joined = LCP.fjoin(f, g)
        assert LCP.fleq(f, joined)
        assert LCP.fleq(g, joined)

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_fleq_transitive(self, f, g, h):
        """f ⊑ g and g ⊑ h imply f ⊑ h."""
        if LCP.fleq(f, g) and LCP.fleq(g, h):
            assert LCP.fleq(f, h)

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_compose_associative(self, f, g, h):
        """Composition is associative."""
        assert LCP.compose(LCP.compose(f, g), h) == LCP.compose(f, LCP.compose(g, h))

    @given(lcp_functions())
    def test_identity_is_neutral(self, f):
        """Identity on either side changes nothing."""
        assert LCP.compose(LCP.identity(), f) == f
        assert LCP.compose(f, LCP.identity()) == f

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_join_then_compose_distributes(self, f, g, h):
        """Running h after f ⊔ g equals joining h after f and h after g."""
        assert LCP.compose(LCP.fjoin(f, g), h) == LCP.fjoin(LCP.compose(f, h), LCP.compose(g, h))

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_compose_then_join_is_sound(self, f, g, h):
        """Joining after composing is at least as precise as composing a join."""
        assert LCP.fleq(
            LCP.fjoin(LCP.compose(f, g), LCP.compose(f, h)),
            LCP.compose(f, LCP.fjoin(g, h)),
        )

    @settings(max_examples=200)
    @given(lcp_functions(), lcp_functions(), cp_envs())
    def test_apply_respects_composition(self, f, g, v):
        """Applying a composition equals applying the parts in order."""
        assert LCP.apply(LCP.compose(f, g), v) == LCP.apply(g, LCP.apply(f, v))

    @given(lcp_functions(), lcp_functions(), cp_envs())
    def test_structural_order_is_semantic(self, f, g, v):
        """f ⊑ g implies f(v) ⊑ g(v)."""
        if LCP.fleq(f, g):
            assert CP.leq(LCP.apply(f, v), LCP.apply(g, v))

    @given(lcp_functions(), cp_envs(), cp_envs())
    def test_apply_distributes_over_value_join(self, f, a, b):
        """f(a ⊔ b) = f(a) ⊔ f(b)."""
        assert LCP.apply(f, CP.join(a, b)) == CP.join(LCP.apply(f, a), LCP.apply(f, b))

    @settings(max_examples=200)
    @given(lcp_functions(), lcp_functions(), lcp_functions(), cp_envs())
    def test_pointwise_cover_is_sound(self, f, g, h, v):
        """If f is covered by {g, h}, then f(v) ⊑ g(v) ⊔ h(v) for every v."""
        if LCP.fcovered(f, [g, h]):
            assert CP.leq(LCP.apply(f, v), CP.join(LCP.apply(g, v), LCP.apply(h, v)))

    @given(lcp_functions(), lcp_functions(), lcp_functions())
    def test_pointwise_cover_implies_structural(self, f, g, h):
        """Pointwise covering is at least as strict as the structural join."""
        if LCP.fcovered(f, [g, h]):
            assert LCP.fleq(f, LCP.fjoin(g, h))

    @settings(max_examples=500)
    @given(lcp_functions(), st.lists(lcp_functions(), max_size=20))
    def test_ascending_chains_are_short(self, start, steps):
        """Joining in arbitrary functions rises at most 2·|Vars|+2 times."""
        current, ascents = start, 0
        for g in steps:
            joined = LCP.fjoin(current, g)
            if not LCP.fequals(joined, current):
                assert LCP.fleq(current, joined)
                ascents += 1
            current = joined
        assert ascents <= 2 * len(VARIABLES) + 2
        assert ascents < LCP.height_bound()
