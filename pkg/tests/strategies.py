"""
Model and graph builders for the test suites.

``single_process`` turns an edge list into a parsed one-process model;
``random_vcfg`` draws a small procedure-free VCFG whose assignments are all
LCP-expressible, so CP, LCP and the enumeration oracle agree path by path.
"""

import json
import random
from typing import Dict, List, Optional, Sequence, Tuple

from hypothesis import strategies as st

from async_dfa.domains import (
    TOP,
    CcpAlgebra,
    ConstFormula,
    CopyFormula,
    CpEnv,
    FormulaFunction,
    LcpAlgebra,
    affine,
)
from async_dfa.domains.formulas import TOP_FORMULA
from async_dfa.model import Model, parse_action, parse_model
from async_dfa.model.actions import SKIP, Receive, Send
from async_dfa.vcfg import Vcfg, VcfgEdge

VARIABLES = ("x", "y", "z")


def single_process(
    edges: Sequence[Tuple[str, str, str]],
    variables: Optional[Dict[str, int]] = None,
    channels: Sequence[str] = ("c",),
    messages: Sequence[str] = ("m",),
    assertions: Sequence[Tuple[str, str]] = (),
    name: str = "P",
) -> Model:
    """
    Parse a one-process model from ``(source, target, action)`` triples.

    States are declared in order of first appearance; the first source is initial.
    """
    states: List[str] = []
    for source, target, _ in edges:
        for s in (source, target):
            if s not in states:
                states.append(s)
    doc = {
        "schema_version": 1,
        "channels": list(channels),
        "messages": list(messages),
        "variables": [{"name": v, "init": i} for v, i in (variables or {}).items()],
        "processes": [
            {
                "name": name,
                "initial": states[0],
                "states": states,
                "transitions": [{"from": s, "to": t, "action": a} for s, t, a in edges],
            }
        ],
        "assertions": [{"process": name, "state": s, "expr": e} for s, e in assertions],
    }
    return parse_model(json.dumps(doc), name="inline")


def _random_action(rng: random.Random, variables: Sequence[str], r: int) -> str:
    kind = rng.choices(["skip", "const", "copy", "affine", "send", "receive"], [2, 3, 2, 3, 3, 3])[0]
    if r == 0 and kind in ("send", "receive"):
        kind = "skip"
    if not variables and kind in ("const", "copy", "affine"):
        kind = "skip"
    if kind == "skip":
        return "skip"
    if kind in ("send", "receive"):
        op = "!" if kind == "send" else "?"
        return f"c{rng.randrange(r)} {op} m"
    target = rng.choice(variables)
    if kind == "const":
        return f"{target} := {rng.randint(-2, 3)}"
    source = rng.choice(variables)
    if kind == "copy":
        return f"{target} := {source}"
    coeff = rng.choice([1, 2, -1])
    return f"{target} := {coeff} * {source} + {rng.randint(-2, 2)}"


def random_vcfg(rng: random.Random, max_nodes: int = 6, max_counters: int = 2) -> Vcfg:
    """
    Small random procedure-free VCFG.

    Every node is reachable from ``n0`` (ignoring feasibility): node i gets an
    edge from some earlier node, then a few extra edges are added anywhere.
    """
    n = rng.randint(2, max_nodes)
    r = rng.randint(0, max_counters)
    variables = VARIABLES[: rng.randint(1, len(VARIABLES))]
    counters = [(f"c{i}", "m") for i in range(r)]
    nodes = [f"n{i}" for i in range(n)]

    pairs = [(nodes[rng.randrange(i)], nodes[i]) for i in range(1, n)]
    pairs += [(rng.choice(nodes), rng.choice(nodes)) for _ in range(rng.randint(1, n))]

    edges = []
    for index, (source, target) in enumerate(pairs):
        action = parse_action(_random_action(rng, variables, r))
        vector = [0] * r
        if isinstance(action, (Send, Receive)):
            vector[int(action.channel[1:])] = 1 if isinstance(action, Send) else -1
        edges.append(VcfgEdge(index, source, target, action, tuple(vector)))

    initial = {v: rng.randint(0, 2) for v in variables}
    return Vcfg(
        nodes=nodes,
        edges=edges,
        counters=counters,
        start=nodes[0],
        variables=variables,
        initial_values=initial,
    )


# ========================================================================
# HYPOTHESIS STRATEGIES
# ========================================================================

LCP = LcpAlgebra(VARIABLES)

_cp_values = st.one_of(st.integers(-3, 3), st.just(TOP))


@st.composite
def cp_envs(draw, allow_bottom: bool = True) -> CpEnv:
    if allow_bottom and draw(st.booleans()) and draw(st.booleans()):
        return CpEnv.unreachable(VARIABLES)
    return CpEnv(VARIABLES, tuple(draw(_cp_values) for _ in VARIABLES))


@st.composite
def lcp_formulas(draw):
    kind = draw(st.sampled_from(["const", "affine", "top"]))
    if kind == "const":
        return ConstFormula(draw(st.integers(-3, 3)))
    if kind == "top":
        return TOP_FORMULA
    coeff = draw(st.sampled_from([1, 2, -1]))
    return affine(coeff, draw(st.sampled_from(VARIABLES)), draw(st.integers(-2, 2)))


@st.composite
def lcp_functions(draw, allow_bottom: bool = True) -> FormulaFunction:
    """LCP functions over x, y, z, occasionally the all-⊥ function."""
    if allow_bottom and draw(st.integers(0, 9)) == 0:
        return LCP.bottom_function()
    return LCP.function({v: draw(lcp_formulas()) for v in VARIABLES})


CCP = CcpAlgebra(VARIABLES)


@st.composite
def ccp_formulas(draw):
    kind = draw(st.sampled_from(["const", "copy", "top"]))
    if kind == "const":
        return ConstFormula(draw(st.integers(-3, 3)))
    if kind == "top":
        return TOP_FORMULA
    return CopyFormula(draw(st.sampled_from(VARIABLES)))


@st.composite
def ccp_functions(draw, allow_bottom: bool = True) -> FormulaFunction:
    """CCP functions over x, y, z, occasionally the all-⊥ function."""
    if allow_bottom and draw(st.integers(0, 9)) == 0:
        return CCP.bottom_function()
    return CCP.function({v: draw(ccp_formulas()) for v in VARIABLES})


def counter_vectors(r: int, high: int = 4):
    return st.tuples(*(st.integers(0, high) for _ in range(r)))


@st.composite
def edge_paths(draw, r: int, receive_free: bool = False, min_size: int = 0, max_size: int = 8):
    """
    Edge sequences whose edges each send or receive at most one message.

    Only the queuing vectors matter to demand and supply, so every edge is a skip.
    """
    steps = (0, 1) if receive_free else (-1, 0, 1)
    edges = []
    for index in range(draw(st.integers(min_size, max_size))):
        vector = [0] * r
        vector[draw(st.integers(0, r - 1))] = draw(st.sampled_from(steps))
        edges.append(VcfgEdge(index, f"n{index}", f"n{index + 1}", SKIP, tuple(vector)))
    return edges
