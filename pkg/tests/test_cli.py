"""
Tests for the dfas command-line interface.

Tests cover:
- analyze, check, compare, validate and dot on the shipped models
- JSON output and its determinism
- Exit codes for validation problems and aborted runs
"""

import json
import logging

import pytest
from click.testing import CliRunner

from async_dfa.cli import cli

RECEIVE_WITHOUT_SEND = {
    "schema_version": 1,
    "channels": ["c"],
    "messages": ["m"],
    "variables": [{"name": "x", "init": 0}],
    "processes": [
        {
            "name": "P",
            "initial": "a",
            "states": ["a", "b"],
            "transitions": [{"from": "a", "to": "b", "action": "c ? m"}],
        }
    ],
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def restore_root_handlers():
    """Commands reconfigure the root logger; put the original handlers back."""
    root = logging.getLogger()
    saved, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        if handler not in saved:
            root.removeHandler(handler)
            handler.close()
    for handler in saved:
        if handler not in root.handlers:
            root.addHandler(handler)
    root.setLevel(level)


@pytest.fixture
def blocked_model(tmp_path):
    path = tmp_path / "blocked.json"
    path.write_text(json.dumps(RECEIVE_WITHOUT_SEND), encoding="utf-8")
    return str(path)


class TestAnalyzeCommand:
    """dfas analyze."""

    def test_table(self, runner):
        """Values are printed as a table."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k"])
        assert result.exit_code == 0
        assert "Values at P.k" in result.stdout
        assert "backward/lcp" in result.stdout

    def test_json(self, runner):
        """--json emits the report document."""
        result = runner.invoke(
            cli, ["analyze", "catalog:example_a", "--target", "P.k", "--engine", "forward", "--theta", "3", "--json"]
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        values = {f["variable"]: f["value"] for f in report["findings"]}
        assert values == {"t": 1, "x": "⊤", "y": "⊤", "z": 1}
        assert report["metadata"]["theta"] == 3
        assert report["metadata"]["runtime_seconds"] is None

    def test_trace(self, runner):
        """--trace attaches the covering rows."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k", "--trace", "--json"])
        assert result.exit_code == 0
        trace = json.loads(result.stdout)["trace"]
        assert trace[0] == {"demand": [1], "path": "jk", "phase": "paths", "ptf": "id", "retained": True, "step": 1}

    def test_trace_table(self, runner):
        """Without --json the trace is printed after the values."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k", "--trace"])
        assert result.exit_code == 0
        assert "jk" in result.stdout

    def test_unknown_state(self, runner):
        """Undeclared targets are validation errors."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.zz"])
        assert result.exit_code == 1

    def test_procedures_with_forward(self, runner):
        """The forward engine refuses models with procedures."""
        result = runner.invoke(cli, ["analyze", "catalog:example_b", "--target", "P.k", "--engine", "forward"])
        assert result.exit_code == 1

    def test_unsupported_domain(self, runner):
        """Backward analysis needs a distributive domain."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k", "--domain", "cp"])
        assert result.exit_code == 1

    def test_iteration_cap(self, runner):
        """Aborted runs exit with 2."""
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k", "--max-iters", "1"])
        assert result.exit_code == 2

    def test_missing_file(self, runner, tmp_path):
        """Unreadable model files are validation errors."""
        result = runner.invoke(cli, ["analyze", str(tmp_path / "absent.json"), "--target", "P.k"])
        assert result.exit_code == 1

    def test_blocked_model(self, runner, blocked_model):
        """Models no engine can analyze are rejected on load."""
        result = runner.invoke(cli, ["analyze", blocked_model, "--target", "P.b"])
        assert result.exit_code == 1

    def test_malformed_environment(self, runner, monkeypatch):
        """Non-numeric DFAS_* values are reported before any work."""
        monkeypatch.setenv("DFAS_THETA", "two")
        result = runner.invoke(cli, ["analyze", "catalog:example_a", "--target", "P.k"])
        assert result.exit_code == 1


class TestCheckCommand:
    """dfas check."""

    def test_verified(self, runner):
        """The running example's assertion is verified."""
        result = runner.invoke(cli, ["check", "catalog:example_a"])
        assert result.exit_code == 0
        assert "verified" in result.stdout

    def test_mutex_json(self, runner):
        """Forward analysis with two tracked tokens verifies the mutex."""
        result = runner.invoke(cli, ["check", "catalog:mutex", "--engine", "forward", "--theta", "2", "--json"])
        assert result.exit_code == 0
        verdicts = json.loads(result.stdout)["verdicts"]
        assert [v["verdict"] for v in verdicts] == ["verified", "verified"]

    def test_jop_is_unknown(self, runner):
        """JOP cannot rule out infeasible interleavings."""
        result = runner.invoke(cli, ["check", "catalog:mutex", "--engine", "jop", "--json"])
        verdicts = json.loads(result.stdout)["verdicts"]
        assert {v["verdict"] for v in verdicts} == {"unknown"}


class TestCompareCommand:
    """dfas compare."""

    def test_json_rows(self, runner):
        """One row per configuration, in a fixed order."""
        result = runner.invoke(
            cli, ["compare", "catalog:example_a", "--theta", "0", "--theta", "2", "--theta", "3", "--json"]
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["uses"] == 5
        assert [row["constants"] for row in report["rows"]] == [2, 2, 0, 1, 2, 0]

    def test_json_is_byte_identical(self, runner):
        """Two runs without --timings produce the same bytes."""
        args = ["compare", "catalog:example_a", "--theta", "2", "--json"]
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == second.exit_code == 0
        assert first.stdout == second.stdout

    def test_unsupported_rows(self, runner):
        """Models with procedures still get the backward rows."""
        result = runner.invoke(cli, ["compare", "catalog:example_b"])
        assert result.exit_code == 0
        assert "unsupported (procedures)" in result.stdout

    def test_timings_column(self, runner):
        """--timings adds a runtime column."""
        result = runner.invoke(cli, ["compare", "catalog:example_a", "--timings"])
        assert result.exit_code == 0
        assert "Runtime" in result.stdout


class TestValidateCommand:
    """dfas validate."""

    def test_clean(self, runner):
        """The running example has no diagnostics."""
        result = runner.invoke(cli, ["validate", "catalog:example_a"])
        assert result.exit_code == 0
        assert "No diagnostics" in result.stdout

    def test_procedures_warn(self, runner):
        """Engine-disabling diagnostics that leave one engine usable exit 0."""
        result = runner.invoke(cli, ["validate", "catalog:example_b"])
        assert result.exit_code == 0
        assert "PROCEDURES_PRESENT" in result.stdout

    def test_blocking(self, runner, blocked_model):
        """A model no engine accepts exits with 1."""
        result = runner.invoke(cli, ["validate", blocked_model])
        assert result.exit_code == 1
        assert "RECEIVE_WITHOUT_SEND" in result.stdout


class TestDotCommand:
    """dfas dot."""

    def test_graphviz(self, runner):
        """The VCFG is printed as a digraph."""
        result = runner.invoke(cli, ["dot", "catalog:example_a"])
        assert result.exit_code == 0
        assert result.stdout.startswith("digraph vcfg {")
        assert '"k"' in result.stdout


class TestLogging:
    """Global logging options."""

    def test_log_file(self, runner, tmp_path, monkeypatch):
        """--log-file receives the engine records with their context."""
        monkeypatch.setenv("DFAS_LOG", "info")
        log_file = tmp_path / "logs" / "dfas.log"
        result = runner.invoke(cli, ["--log-file", str(log_file), "analyze", "catalog:example_a", "--target", "P.k"])
        assert result.exit_code == 0
        text = log_file.read_text(encoding="utf-8")
        assert "Backward analysis started" in text
        assert "engine=backward" in text
        assert "\033[" not in text
