"""
Tests for the model format.

Tests cover:
- Parsing the shipped catalog
- Action and expression syntax
- Name resolution and duplicate declarations
- Structural diagnostics and engine gating
"""

import json

import pytest

from async_dfa import catalog
from async_dfa.errors import (
    DuplicateDeclarationError,
    ModelSyntaxError,
    ModelValidationError,
    UnknownIdentifierError,
)
from async_dfa.model import (
    Assign,
    Receive,
    Send,
    blocking_diagnostics,
    diagnostics_for,
    evaluate,
    linear_form,
    parse_action,
    parse_expression,
    parse_model,
    render_model,
    validate,
)
from async_dfa.models import EngineType
from tests.strategies import single_process


def _doc(**overrides):
    doc = {
        "schema_version": 1,
        "channels": ["c"],
        "messages": ["m"],
        "variables": [{"name": "x", "init": 0}],
        "processes": [
            {
                "name": "P",
                "initial": "a",
                "states": ["a", "b"],
                "transitions": [{"from": "a", "to": "b", "action": "c ! m"}],
            }
        ],
    }
    doc.update(overrides)
    return doc


class TestCatalog:
    """Shipped models parse and expose their structure."""

    def test_available_models(self):
        """The four catalog entries are listed by name."""
        assert catalog.available() == ["example_a", "example_b", "mutex", "two_process"]

    def test_example_a(self, example_a):
        """Single process with a loop over c."""
        assert example_a.variable_names == ("t", "x", "y", "z")
        assert example_a.process("P").states == tuple("abcdefghijk")
        assert [a.text for a in example_a.assertions] == ["t == 1 and z == 1"]
        assert not example_a.has_procedures

    def test_example_b_owner_states(self, example_b):
        """The procedure owner also addresses qualified procedure nodes."""
        assert example_b.owners == ("P",)
        assert "foo.c" in example_b.states_of("P")
        assert example_b.procedure("foo").qualified("o") == "foo.o"

    def test_unknown_catalog_entry(self):
        """Unknown names list what exists."""
        with pytest.raises(UnknownIdentifierError) as exc_info:
            catalog.load("example_z")

        assert "example_a" in exc_info.value.suggestion

    def test_render_parses_back(self, example_b):
        """Rendering and re-parsing keeps the model."""
        assert parse_model(render_model(example_b), name="again") == example_b


class TestActions:
    """Action string syntax."""

    def test_send_and_receive(self):
        """c ! m and c ? m."""
        assert parse_action("c ! m") == Send("c", "m")
        assert parse_action("  c?m ") == Receive("c", "m")

    def test_chained_assignment(self):
        """Assignments are split on semicolons."""
        action = parse_action("t := 0; x := x + 1")
        assert isinstance(action, Assign)
        assert action.targets == ("t", "x")

    def test_unrecognized_action(self):
        """Free text is rejected with the accepted forms."""
        with pytest.raises(ModelSyntaxError) as exc_info:
            parse_action("send c m")

        assert "expected skip" in exc_info.value.message

    def test_bad_expression(self):
        """Python syntax outside the expression subset is rejected."""
        with pytest.raises(ModelSyntaxError):
            parse_expression("x ** 2")
        with pytest.raises(ModelSyntaxError):
            parse_expression("f(x)")


class TestExpressions:
    """Evaluation and linear normal forms."""

    def test_truncating_division(self):
        """Integer division rounds toward zero."""
        assert evaluate(parse_expression("-7 / 2"), {}) == -3
        assert evaluate(parse_expression("-7 % 2"), {}) == -1

    def test_boolean_assertion(self):
        """Conjunctions of comparisons evaluate to booleans."""
        expr = parse_expression("t == 1 and z == 1")
        assert evaluate(expr, {"t": 1, "z": 1}) is True
        assert evaluate(expr, {"t": 1, "z": 0}) is False

    def test_linear_form(self):
        """2*(x+1) - x normalizes to x + 2."""
        form = linear_form(parse_expression("2 * (x + 1) - x"))
        assert form.coefficients == (("x", 1),)
        assert form.constant == 2

    def test_non_linear_form(self):
        """Variable products have no linear form."""
        assert linear_form(parse_expression("x * y")) is None


class TestParsing:
    """Document-level errors."""

    def test_malformed_json(self):
        """JSON errors carry a line number."""
        with pytest.raises(ModelSyntaxError) as exc_info:
            parse_model('{"schema_version": 1,\n "processes": [}')

        assert exc_info.value.line == 2

    def test_schema_violation(self):
        """Missing processes is a validation error."""
        doc = _doc()
        del doc["processes"]
        with pytest.raises(ModelValidationError) as exc_info:
            parse_model(json.dumps(doc))

        assert any("processes" in p for p in exc_info.value.details["problems"])

    def test_wrong_schema_version(self):
        """Only version 1 is accepted."""
        with pytest.raises(ModelValidationError):
            parse_model(json.dumps(_doc(schema_version=2)))

    def test_transition_needs_one_label(self):
        """An edge with both action and call is rejected."""
        doc = _doc()
        doc["processes"][0]["transitions"][0]["call"] = "foo"
        with pytest.raises(ModelValidationError):
            parse_model(json.dumps(doc))

    def test_unknown_variable(self):
        """Assignments to undeclared variables are rejected with their location."""
        doc = _doc()
        doc["processes"][0]["transitions"][0]["action"] = "w := 1"
        with pytest.raises(UnknownIdentifierError) as exc_info:
            parse_model(json.dumps(doc))

        assert exc_info.value.kind == "variable"
        assert "processes[0].transitions[0]" in exc_info.value.message

    def test_unknown_channel(self):
        """Channels must be declared."""
        doc = _doc()
        doc["processes"][0]["transitions"][0]["action"] = "d ! m"
        with pytest.raises(UnknownIdentifierError) as exc_info:
            parse_model(json.dumps(doc))

        assert exc_info.value.kind == "channel"

    def test_unknown_state_in_assertion(self):
        """Assertions must name a state of their process."""
        doc = _doc(assertions=[{"process": "P", "state": "zz", "expr": "x == 0"}])
        with pytest.raises(UnknownIdentifierError):
            parse_model(json.dumps(doc))

    def test_duplicate_state(self):
        """States are unique per process."""
        doc = _doc()
        doc["processes"][0]["states"] = ["a", "b", "a"]
        with pytest.raises(DuplicateDeclarationError) as exc_info:
            parse_model(json.dumps(doc))

        assert exc_info.value.name == "a"

    def test_bad_identifier(self):
        """Names must be identifiers."""
        doc = _doc(variables=[{"name": "1x", "init": 0}])
        with pytest.raises(ModelValidationError):
            parse_model(json.dumps(doc))

    @pytest.mark.parametrize("name", catalog.available())
    def test_parsing_is_deterministic(self, name):
        """The same text always gives the same model and the same rendering."""
        text = catalog.read_text(name)
        first, second = parse_model(text, name=name), parse_model(text, name=name)
        assert first == second
        assert render_model(first) == render_model(second)
        assert parse_model(render_model(first), name=name) == first


class TestDiagnostics:
    """Engine assumptions checked by validate."""

    def test_clean_model(self, example_a):
        """The running example breaks no assumption."""
        assert validate(example_a) == []

    def test_procedures_disable_forward(self, example_b):
        """Procedures rule out the forward and JOP engines only."""
        codes = [d.code for d in validate(example_b)]
        assert codes == ["PROCEDURES_PRESENT"]
        assert diagnostics_for(example_b, EngineType.FORWARD)
        assert diagnostics_for(example_b, EngineType.JOP)
        assert diagnostics_for(example_b, EngineType.BACKWARD) == []
        assert blocking_diagnostics(example_b) == []

    def test_receive_without_send_blocks_everything(self):
        """A receive nobody sends disables all engines."""
        text = json.dumps(
            _doc(
                processes=[
                    {
                        "name": "P",
                        "initial": "a",
                        "states": ["a", "b"],
                        "transitions": [{"from": "a", "to": "b", "action": "c ? m"}],
                    }
                ]
            )
        )
        model = parse_model(text, check=False)
        assert [d.code for d in blocking_diagnostics(model)] == ["RECEIVE_WITHOUT_SEND"]
        with pytest.raises(ModelValidationError) as exc_info:
            parse_model(text)

        assert exc_info.value.details["codes"] == ["RECEIVE_WITHOUT_SEND"]

    def test_loop_in_procedure_disables_backward(self):
        """Procedure bodies must be acyclic for the backward engine."""
        doc = _doc(
            processes=[
                {
                    "name": "P",
                    "initial": "a",
                    "states": ["a", "b"],
                    "transitions": [{"from": "a", "to": "b", "call": "loop"}],
                }
            ],
            procedures=[
                {
                    "name": "loop",
                    "entry": "u",
                    "exit": "w",
                    "nodes": ["u", "v", "w"],
                    "edges": [
                        {"from": "u", "to": "v", "action": "x := x + 1"},
                        {"from": "v", "to": "u", "action": "skip"},
                        {"from": "v", "to": "w", "action": "c ! m"},
                    ],
                }
            ],
        )
        model = parse_model(json.dumps(doc), check=False)
        loops = [d for d in validate(model) if d.code == "LOOP_IN_PROCEDURE"]
        assert len(loops) == 1
        assert loops[0].disables(EngineType.BACKWARD)
        # procedures also rule out forward and jop, so nothing is left
        assert blocking_diagnostics(model)

    def test_uncalled_procedure_is_a_warning(self):
        """Declared but never called procedures only warn."""
        doc = _doc(
            procedures=[
                {
                    "name": "idle",
                    "entry": "u",
                    "exit": "w",
                    "nodes": ["u", "w"],
                    "edges": [{"from": "u", "to": "w", "action": "skip"}],
                }
            ]
        )
        model = parse_model(json.dumps(doc))
        warnings = [d for d in validate(model) if d.code == "UNCALLED_PROCEDURE"]
        assert warnings and warnings[0].is_warning
        assert "UNCALLED_PROCEDURE" in warnings[0].render()

    def test_procedures_with_other_processes_warn(self):
        """A procedure owner running beside other processes gets a warning."""
        doc = _doc(
            processes=[
                {
                    "name": "P",
                    "initial": "a",
                    "states": ["a", "b"],
                    "transitions": [{"from": "a", "to": "b", "call": "work"}],
                },
                {
                    "name": "Q",
                    "initial": "s",
                    "states": ["s", "t"],
                    "transitions": [{"from": "s", "to": "t", "action": "c ! m"}],
                },
            ],
            procedures=[
                {
                    "name": "work",
                    "entry": "u",
                    "exit": "w",
                    "nodes": ["u", "w"],
                    "edges": [{"from": "u", "to": "w", "action": "x := 1"}],
                }
            ],
        )
        model = parse_model(json.dumps(doc))
        found = [d for d in validate(model) if d.code == "PROCEDURE_SUSPENDS_OTHERS"]
        assert len(found) == 1
        assert found[0].is_warning
        assert "P" in found[0].message

    def test_single_owner_alone_has_no_interleaving_warning(self, example_b):
        """One process with procedures has nothing to interleave with."""
        assert all(d.code != "PROCEDURE_SUSPENDS_OTHERS" for d in validate(example_b))

    def test_inline_builder(self):
        """The test helper declares states in order of appearance."""
        model = single_process([("a", "b", "x := 1"), ("b", "a", "skip")], {"x": 0})
        assert model.process("P").states == ("a", "b")
        assert model.process("P").initial == "a"
