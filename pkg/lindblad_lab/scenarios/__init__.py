"""
Scenario registry with auto-discovery.

Scenarios are plain functions from a validated config to an outcome. They
are auto-discovered from this package and looked up by name by the runner.

Usage:
    # In lindblad_lab/scenarios/my_scenario.py
    from lindblad_lab.scenarios import ScenarioOutcome, scenario

    @scenario("my-scenario", help="Description of my scenario")
    def my_scenario(config: ScenarioConfig) -> ScenarioOutcome:
        ...

    # Then run it:
    # lindblad-lab run my_config.json
"""

import importlib
import pkgutil
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import click

from lindblad_lab.schemas.config import ScenarioConfig
from lindblad_lab.schemas.manifest import MetricValue
from lindblad_lab.services.artifacts import CsvTable


@dataclass
class ScenarioOutcome:
    """What a scenario hands back to the runner.

    Attributes:
        metrics: Headline numbers for the manifest.
        tables: CSV tables, written in list order.
        seeds: Every seed the run consumed, by role.
    """

    metrics: dict[str, MetricValue] = field(default_factory=dict)
    tables: list[CsvTable] = field(default_factory=list)
    seeds: dict[str, int] = field(default_factory=dict)


ScenarioFn = Callable[[ScenarioConfig], ScenarioOutcome]


@dataclass(frozen=True)
class Scenario:
    name: str
    help: str
    run: ScenarioFn


# Registry for scenarios
_scenarios: dict[str, Scenario] = {}
_discovered = False


def scenario(name: str | None = None, help: str = "") -> Callable[[ScenarioFn], ScenarioFn]:
    """
    Decorator to register a scenario.

    Args:
        name: Scenario name (defaults to function name with underscores replaced by hyphens)
        help: One-line description shown by ``list-scenarios``
    """

    def decorator(func: ScenarioFn) -> ScenarioFn:
        scenario_name = name or func.__name__.replace("_", "-")
        if scenario_name in _scenarios:
            raise ValueError(f"Scenario {scenario_name!r} registered twice")
        _scenarios[scenario_name] = Scenario(scenario_name, help or (func.__doc__ or "").strip(), func)
        return func

    return decorator


def discover_scenarios() -> dict[str, Scenario]:
    """
    Auto-discover all scenarios in this package.

    Imports all modules in the lindblad_lab.scenarios package (except those starting with _)
    which triggers the @scenario decorator to register them.
    """
    global _discovered

    if _discovered:
        return _scenarios

    package_dir = Path(__file__).parent

    for _, module_name, _ in pkgutil.iter_modules([str(package_dir)]):
        if module_name.startswith("_"):
            continue

        try:
            importlib.import_module(f"lindblad_lab.scenarios.{module_name}")
        except ImportError as e:
            click.secho(f"Warning: Failed to import scenario module '{module_name}': {e}", fg="yellow")

    _discovered = True
    return _scenarios


def get_scenario(name: str) -> Scenario:
    scenarios = discover_scenarios()
    if name not in scenarios:
        raise KeyError(f"No scenario named {name!r}")
    return scenarios[name]


def success(message: str) -> None:
    """Print success message in green."""
    click.secho(message, fg="green")


def error(message: str) -> None:
    """Print error message in red."""
    click.secho(message, fg="red", err=True)


def warning(message: str) -> None:
    """Print warning message in yellow."""
    click.secho(message, fg="yellow")


def info(message: str) -> None:
    """Print info message."""
    click.echo(message)
