"""
Command-line interface for async-dfa.

Analyze models, check their assertions and compare engines from the terminal.
Reports go to standard output (a rich table, or JSON with ``--json``); logs
and errors go to standard error.
"""

import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__, setup_logging
from .analysis import analyze_target, check_assertions, compare_engines, resolve_model
from .config import AnalysisSettings
from .errors import EXIT_VALIDATION, DfasError
from .model import Model, blocking_diagnostics, validate
from .models import ComparisonReport, DomainType, EngineType, Report
from .vcfg import build_vcfg

console = Console()
err_console = Console(stderr=True)

ENGINE_CHOICE = click.Choice([e.value for e in EngineType], case_sensitive=False)
DOMAIN_CHOICE = click.Choice([d.value for d in DomainType], case_sensitive=False)


def _fail(exc: DfasError) -> None:
    err_console.print(f"❌ {exc.message}", style="bold red")
    if exc.suggestion:
        err_console.print(f"💡 {exc.suggestion}", style="yellow")
    sys.exit(exc.exit_code)


def _run(action: Callable[[], Any]) -> Any:
    """Run a command body, mapping analyzer errors to their exit codes."""
    try:
        return action()
    except DfasError as exc:
        _fail(exc)
    except OSError as exc:
        err_console.print(f"❌ {exc}", style="bold red")
        sys.exit(EXIT_VALIDATION)


def _load(source: str, check: bool = True) -> Model:
    model: Model = _run(lambda: resolve_model(source, check=check))
    return model


def _settings(**overrides: Optional[int]) -> AnalysisSettings:
    problems = AnalysisSettings.check_env()
    if problems:
        for problem in problems:
            err_console.print(f"❌ {problem}", style="bold red")
        sys.exit(EXIT_VALIDATION)
    return AnalysisSettings.from_env(**overrides)


def _engine_options(func: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option("--engine", type=ENGINE_CHOICE, default=EngineType.BACKWARD.value, show_default=True),
        click.option("--domain", type=DOMAIN_CHOICE, default=None, help="Defaults to lcp (backward) or cp"),
        click.option("--theta", type=click.IntRange(min=0), default=None, help="Queue bound (forward)"),
        click.option("--json", "as_json", is_flag=True, help="Emit the JSON report"),
        click.option("--timings", is_flag=True, help="Include wall-clock runtime"),
        click.option("--threads", type=click.IntRange(min=1), default=None),
        click.option("--max-nodes", type=click.IntRange(min=1), default=None),
        click.option("--max-iters", type=click.IntRange(min=1), default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _value_style(value: Any) -> str:
    return "green" if isinstance(value, int) else "dim"


def _print_metadata(report: Report) -> None:
    meta = report.metadata
    theta = f"  Θ={meta.theta}" if meta.theta is not None else ""
    runtime = f"  {meta.runtime_seconds:.3f}s" if meta.runtime_seconds is not None else ""
    stats = ", ".join(f"{k}={v}" for k, v in meta.statistics.items())
    text = f"[bold]{meta.engine.value}/{meta.domain.value}[/bold]{theta}{runtime}\n[dim]{stats}[/dim]"
    console.print(Panel(text, title=report.system, box=box.ROUNDED))
    for line in report.diagnostics:
        console.print(f"⚠️  {line}", style="yellow", markup=False)


def _print_trace(rows: List[Dict[str, Any]]) -> None:
    if rows and "configurations" in rows[0]:
        for row in rows:
            console.print(f"[bold]{row['node']}[/bold]")
            for line in row["configurations"]:
                console.print(f"  {line}")
        return
    table = Table(show_header=True, header_style="bold magenta", box=box.SIMPLE)
    for column in ("#", "Path from worklist", "Extended path", "Demand", "ptf", "Covered by"):
        table.add_column(column)
    for row in rows:
        measure = row.get("demand", row.get("supply", []))
        covered = row.get("covered_by")
        path = row["path"] if covered is None else f"[strike]{row['path']}[/strike]"
        table.add_row(
            str(row["step"]),
            row.get("extended_from", row.get("procedure", "")),
            path,
            ",".join(str(x) for x in measure),
            row["ptf"],
            "{" + ", ".join(covered) + "}" if covered is not None else "",
        )
    console.print(table)


@click.group()
@click.version_option(version=__version__)
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write logs to this file (rotated at 10MB)",
)
def cli(debug: bool, log_file: Optional[Path]) -> None:
    """async-dfa - join-over-feasible-paths analysis of message-passing systems."""
    setup_logging(level="DEBUG" if debug else None, log_file=log_file)


@cli.command()
@click.argument("model")
@click.option("--target", required=True, help="PROCESS.STATE")
@click.option("--trace", is_flag=True, help="Show the covering trace or configuration tables")
@_engine_options
def analyze(
    model: str,
    target: str,
    trace: bool,
    engine: str,
    domain: Optional[str],
    theta: Optional[int],
    as_json: bool,
    timings: bool,
    threads: Optional[int],
    max_nodes: Optional[int],
    max_iters: Optional[int],
) -> None:
    """
    Compute the values of all variables at a control state.

    Example:
        dfas analyze catalog:example_a --target P.k --engine backward --domain lcp
    """
    system = _load(model)
    settings = _settings(theta=theta, threads=threads, max_nodes=max_nodes, max_iterations=max_iters)
    report: Report = _run(
        lambda: analyze_target(
            system,
            target,
            engine=EngineType(engine.lower()),
            domain=DomainType(domain.lower()) if domain else None,
            settings=settings,
            trace=trace,
            timings=timings,
        )
    )
    if as_json:
        click.echo(report.to_json())
        return

    _print_metadata(report)
    table = Table(show_header=True, header_style="bold magenta", box=box.SIMPLE, title=f"Values at {target}")
    table.add_column("Variable", style="cyan")
    table.add_column("Value", justify="right")
    for finding in report.findings:
        table.add_row(finding.variable, f"[{_value_style(finding.value)}]{finding.value}[/]")
    console.print(table)
    if trace:
        _print_trace(report.trace)


@cli.command()
@click.argument("model")
@_engine_options
def check(
    model: str,
    engine: str,
    domain: Optional[str],
    theta: Optional[int],
    as_json: bool,
    timings: bool,
    threads: Optional[int],
    max_nodes: Optional[int],
    max_iters: Optional[int],
) -> None:
    """
    Check every assertion of a model.

    Example:
        dfas check catalog:mutex --engine forward --theta 2
    """
    system = _load(model)
    settings = _settings(theta=theta, threads=threads, max_nodes=max_nodes, max_iterations=max_iters)
    report: Report = _run(
        lambda: check_assertions(
            system,
            engine=EngineType(engine.lower()),
            domain=DomainType(domain.lower()) if domain else None,
            settings=settings,
            timings=timings,
        )
    )
    if as_json:
        click.echo(report.to_json())
        return

    _print_metadata(report)
    if not report.verdicts:
        console.print("No assertions in model", style="dim")
        return
    table = Table(show_header=True, header_style="bold magenta", box=box.SIMPLE)
    table.add_column("Location", style="cyan")
    table.add_column("Assertion")
    table.add_column("Verdict", justify="center")
    table.add_column("Values")
    for verdict in report.verdicts:
        mark = "✅ verified" if verdict.is_verified() else "❔ unknown"
        values = ", ".join(f"{k}={v}" for k, v in verdict.values.items())
        table.add_row(f"{verdict.process}.{verdict.state}", verdict.expression, mark, values)
    console.print(table)


@cli.command()
@click.argument("model")
@click.option("--theta", "thetas", type=click.IntRange(min=0), multiple=True, help="Repeatable")
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report")
@click.option("--timings", is_flag=True, help="Include wall-clock runtime")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--max-nodes", type=click.IntRange(min=1), default=None)
@click.option("--max-iters", type=click.IntRange(min=1), default=None)
def compare(
    model: str,
    thetas: Tuple[int, ...],
    as_json: bool,
    timings: bool,
    threads: Optional[int],
    max_nodes: Optional[int],
    max_iters: Optional[int],
) -> None:
    """
    Count constant uses and verified assertions per engine.

    Example:
        dfas compare catalog:example_a --theta 0 --theta 2 --theta 3
    """
    system = _load(model)
    settings = _settings(threads=threads, max_nodes=max_nodes, max_iterations=max_iters)
    report: ComparisonReport = _run(
        lambda: compare_engines(system, thetas=thetas, settings=settings, timings=timings)
    )
    if as_json:
        click.echo(report.to_json())
        return

    console.print(
        f"\n[bold]{report.system}[/bold]: {report.uses} uses, {report.assertions} assertions\n"
    )
    table = Table(show_header=True, header_style="bold magenta", box=box.SIMPLE)
    table.add_column("Engine", style="cyan")
    table.add_column("Constants", justify="right")
    table.add_column("Assertions", justify="right")
    if timings:
        table.add_column("Runtime", justify="right")
    for row in report.rows:
        if row.status != "ok":
            cells = [row.label, f"[dim]{row.status}[/dim]", ""]
        else:
            cells = [row.label, str(row.constants), str(row.assertions_verified)]
        if timings:
            cells.append(f"{row.runtime_seconds:.3f}s" if row.runtime_seconds is not None else "")
        table.add_row(*cells)
    console.print(table)


@cli.command(name="validate")
@click.argument("model")
def validate_command(model: str) -> None:
    """
    List the diagnostics of a model.

    Exits with 1 when no engine can analyze it.
    """
    system = _load(model, check=False)
    diagnostics = validate(system)
    if not diagnostics:
        console.print("✅ No diagnostics", style="bold green")
        return
    for d in diagnostics:
        style = "yellow" if d.is_warning else "red"
        console.print(d.render(), style=style, markup=False)
    if blocking_diagnostics(system):
        sys.exit(EXIT_VALIDATION)


@cli.command()
@click.argument("model")
@click.option("--max-nodes", type=click.IntRange(min=1), default=None)
def dot(model: str, max_nodes: Optional[int]) -> None:
    """Print the VCFG in Graphviz syntax."""
    system = _load(model, check=False)
    settings = _settings(max_nodes=max_nodes)
    graph = _run(lambda: build_vcfg(system, settings.max_nodes))
    click.echo(graph.to_dot(), nl=False)


if __name__ == "__main__":
    cli()
