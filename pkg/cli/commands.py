"""Laboratory CLI."""

import sys
from pathlib import Path

import click
from tabulate import tabulate

from lindblad_lab import __version__
from lindblad_lab.core.exceptions import LabException
from lindblad_lab.scenarios import discover_scenarios, error, info, success, warning


@click.group()
@click.version_option(version=__version__, prog_name="lindblad-lab")
def cli() -> None:
    """lindblad-lab scenario runner."""
    pass


# === Scenario Commands ===
@cli.command("run")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option("--verbose", "-v", is_flag=True, help="Debug-level console logging")
def run(config_path: Path, output: Path | None, verbose: bool) -> None:
    """Run the scenario described by CONFIG_PATH and write its artifacts."""
    from lindblad_lab.core.logfire_setup import setup_logfire
    from lindblad_lab.services.runner import load_config, run_scenario

    try:
        config = load_config(config_path)
        setup_logfire()
        result = run_scenario(config, output, verbose=verbose)
    except LabException as e:
        error(f"{e.code}: {e.message}")
        for key, value in e.details.items():
            info(f"  {key}: {value}")
        sys.exit(e.exit_code)
    except Exception as e:
        error(f"Unexpected error: {e!r}")
        sys.exit(1)

    rows = [[key, value] for key, value in result.manifest.metrics.items()]
    info(tabulate(rows, headers=["Metric", "Value"]))
    success(f"Artifacts written to {result.output_dir}")


@cli.command("validate")
@click.argument("config_path", type=click.Path(path_type=Path))
def validate(config_path: Path) -> None:
    """Check CONFIG_PATH and print the fully resolved config."""
    from lindblad_lab.services.runner import load_config

    try:
        config = load_config(config_path)
    except LabException as e:
        error(f"{e.code}: {e.message}")
        for item in e.details.get("errors", []):
            location = ".".join(str(part) for part in item.get("loc", ()))
            warning(f"  {location}: {item.get('msg')}")
        sys.exit(e.exit_code)
    info(config.model_dump_json(indent=2))
    success(f"{config_path} is a valid {config.scenario} config.")


@cli.command("list-scenarios")
def list_scenarios() -> None:
    """Show all registered scenarios."""
    scenarios = discover_scenarios()
    rows = [[name, scenarios[name].help] for name in sorted(scenarios)]
    click.echo(tabulate(rows, headers=["Scenario", "Description"]))


def main() -> None:
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
