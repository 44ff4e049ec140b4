"""Shared fixtures: catalog models, their VCFGs and domain-annotated graphs."""

import pytest

from async_dfa import catalog
from async_dfa.vcfg import attach_domain, build_vcfg


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep DFAS_* variables of the developer's shell out of the tests."""
    for name in ("DFAS_LOG", "DFAS_THETA", "DFAS_MAX_NODES", "DFAS_MAX_ITERS", "DFAS_THREADS"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def example_a():
    return catalog.load("example_a")


@pytest.fixture
def example_b():
    return catalog.load("example_b")


@pytest.fixture
def two_process():
    return catalog.load("two_process")


@pytest.fixture
def mutex():
    return catalog.load("mutex")


@pytest.fixture
def vcfg_a(example_a):
    return build_vcfg(example_a)


@pytest.fixture
def vcfg_b(example_b):
    return build_vcfg(example_b)


@pytest.fixture
def lcp_a(vcfg_a):
    return attach_domain(vcfg_a, "lcp")


@pytest.fixture
def cp_a(vcfg_a):
    return attach_domain(vcfg_a, "cp")


@pytest.fixture
def lcp_b(vcfg_b):
    return attach_domain(vcfg_b, "lcp")
