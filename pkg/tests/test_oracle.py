"""
Tests for the enumeration oracle and for the engines against it.

Tests cover:
- Oracle results on the shipped examples, straight-line and infeasible models
- Backward exactness on a seeded corpus of random VCFGs
- Forward and JOP soundness on the same corpus
"""

import random

import pytest

from async_dfa.config import AnalysisSettings
from async_dfa.domains import CpLattice
from async_dfa.engines import compute_jofp, enumerate_jofp, jop, kildall
from async_dfa.errors import AnalysisAbortedError, ContractViolationError
from async_dfa.vcfg import attach_domain, build_vcfg
from tests.strategies import random_vcfg, single_process

CORPUS_SIZE = 100
CORPUS_SEED = 20240611


def corpus():
    """Seeded random procedure-free graphs with LCP transfer functions."""
    rng = random.Random(CORPUS_SEED)
    for number in range(CORPUS_SIZE):
        vcfg = random_vcfg(rng, max_nodes=8)
        yield number, rng, attach_domain(vcfg, "lcp")


class TestOracle:
    """Bounded enumeration of feasible paths."""

    def test_example_a(self, cp_a):
        """Every feasible path to k leaves t and z at 1."""
        result = enumerate_jofp(cp_a, max_len=60, window=10)
        assert result.saturated
        assert result.value("k").constants() == {"t": 1, "z": 1}
        assert result.paths_visited > 0

    def test_example_a_lcp(self, lcp_a):
        """Dominance pruning gives the same answer."""
        assert enumerate_jofp(lcp_a, max_len=60, window=10).value("k").constants() == {"t": 1, "z": 1}

    @pytest.mark.slow
    def test_example_b(self, lcp_b):
        """Nested calls are unfolded until k is reached with three messages."""
        result = enumerate_jofp(lcp_b, max_len=100, window=20)
        assert result.saturated
        assert result.value("k").constants() == {"t": 1, "z": 1}

    def test_straight_line(self):
        """A loop-free model has exact values and saturates early."""
        model = single_process([("a", "b", "x := 1"), ("b", "c", "y := x + 1")], {"x": 0, "y": 0})
        result = enumerate_jofp(attach_domain(build_vcfg(model), "cp"))
        assert result.saturated
        assert result.value("c").constants() == {"x": 1, "y": 2}

    def test_infeasible_node_is_bottom(self):
        """A state only reachable by receiving first stays ⊥."""
        model = single_process([("a", "b", "c ? m"), ("b", "a", "c ! m")], {"x": 0})
        result = enumerate_jofp(attach_domain(build_vcfg(model), "cp"))
        assert result.value("b").is_unreachable
        assert result.value("a").constants() == {"x": 0}

    def test_short_bound_is_not_saturated(self, cp_a):
        """Values still change inside a too-small window."""
        result = enumerate_jofp(cp_a, max_len=10, window=10)
        assert not result.saturated

    def test_join_over(self, cp_a):
        """Values over a node set are joined."""
        result = enumerate_jofp(cp_a, max_len=30, window=10)
        assert result.join_over(["k"]) == result.value("k")
        with pytest.raises(ContractViolationError):
            result.join_over([])

    def test_configuration_cap(self, cp_a):
        """Enumeration stops at the iteration cap."""
        with pytest.raises(AnalysisAbortedError) as exc_info:
            enumerate_jofp(cp_a, settings=AnalysisSettings(max_iterations=5))

        assert exc_info.value.engine == "oracle"

    def test_engines_dominate_oracle_on_example_a(self, cp_a, vcfg_a):
        """Forward results at every bound and JOP are above the feasible-path join."""
        lattice = CpLattice(vcfg_a.variables)
        oracle = enumerate_jofp(cp_a, max_len=60, window=10)
        joined = jop(cp_a)
        for theta in range(4):
            forward = kildall(cp_a, theta)
            for node in vcfg_a.nodes:
                assert lattice.leq(oracle.value(node), forward.value(node)), (theta, node)
        for node in vcfg_a.nodes:
            assert lattice.leq(oracle.value(node), joined.values[node]), node


@pytest.mark.slow
@pytest.mark.property
class TestRandomCorpus:
    """Engines against the oracle on small random graphs."""

    def test_backward_is_exact(self):
        """Every enumeration saturates and backward JOFP equals the oracle at a random node."""
        compared = 0
        for number, rng, graph in corpus():
            oracle = enumerate_jofp(graph, max_len=30, window=10)
            assert oracle.saturated, number
            target = rng.choice(graph.vcfg.nodes)
            assert compute_jofp(graph, target) == oracle.value(target), (number, target)
            compared += 1
        assert compared == CORPUS_SIZE

    def test_forward_and_jop_are_sound(self):
        """Forward DFAS at every bound and JOP dominate the oracle at every node."""
        for number, _, graph in corpus():
            lattice = CpLattice(graph.vcfg.variables)
            oracle = enumerate_jofp(graph, max_len=16, window=4)
            results = [kildall(graph, theta).value for theta in range(4)]
            results.append(jop(graph).values.get)
            for value_at in results:
                for node in graph.vcfg.nodes:
                    assert lattice.leq(oracle.value(node), value_at(node)), (number, node)
