"""Run orchestration: config loading, scenario dispatch, artifacts and manifest."""

import json
import logging
import time
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import logfire
from pydantic import ValidationError

from lindblad_lab import __version__
from lindblad_lab.core.config import settings
from lindblad_lab.core.context import run_context
from lindblad_lab.core.exceptions import ConfigValidationError
from lindblad_lab.core.logging_config import close_file_logging, setup_logging
from lindblad_lab.scenarios import get_scenario
from lindblad_lab.schemas.config import ScenarioConfig
from lindblad_lab.schemas.manifest import RunManifest
from lindblad_lab.services.artifacts import write_csv, write_manifest

logger = logging.getLogger(__name__)

RUN_LOG_NAME = "run.log"
DEFAULT_OUTPUT_ROOT = Path("runs")


@dataclass(frozen=True)
class RunResult:
    manifest: RunManifest
    output_dir: Path
    manifest_path: Path


def parse_config(document: str | dict[str, Any]) -> ScenarioConfig:
    """Validate a config document.

    Raises:
        ConfigValidationError: Malformed JSON, unknown keys or invalid values.
    """
    try:
        if isinstance(document, str):
            return ScenarioConfig.model_validate_json(document)
        return ScenarioConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigValidationError(
            f"Invalid scenario config ({e.error_count()} errors)",
            details={"errors": e.errors(include_url=False, include_context=False)},
        ) from e


def load_config(path: Path) -> ScenarioConfig:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigValidationError(f"Cannot read config {path}: {e}") from e
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"Config {path} is not valid JSON: {e}") from e
    return parse_config(text)


def resolve_output_dir(config: ScenarioConfig, override: Path | None = None) -> Path:
    """CLI option, then ``LINDBLAD_LAB_OUTPUT_DIR``, then ``config.output``, then ``runs/<scenario>``."""
    if override is not None:
        return override
    if settings.OUTPUT_DIR is not None:
        return settings.OUTPUT_DIR
    if config.output is not None:
        return Path(config.output)
    return DEFAULT_OUTPUT_ROOT / config.scenario


def run_scenario(config: ScenarioConfig, output_dir: Path | None = None, *, verbose: bool = False) -> RunResult:
    """Run one scenario and write its CSVs, ``run.log`` and ``manifest.json``.

    The manifest is written last, so a run aborted by an invariant
    violation leaves no manifest behind.
    """
    scenario = get_scenario(config.scenario)
    directory = resolve_output_dir(config, output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    setup_logging(log_file=directory / RUN_LOG_NAME, verbose=verbose)

    started_at = datetime.now(UTC)
    start = time.perf_counter()
    try:
        with run_context(config.scenario) as run_id:
            logger.info("Scenario started", extra={"output_dir": str(directory)})
            with logfire.span("scenario {scenario}", scenario=config.scenario, run_id=run_id):
                outcome = scenario.run(config)

            files = [write_csv(directory, table) for table in outcome.tables]
            manifest = RunManifest(
                scenario=config.scenario,
                run_id=run_id,
                library_version=__version__,
                config=config.serializable_dict(),
                seeds={"config": config.seed, **outcome.seeds},
                started_at=started_at,
                finished_at=datetime.now(UTC),
                wall_time_s=time.perf_counter() - start,
                metrics=outcome.metrics,
                files=files,
                output_dir=str(directory),
            )
            manifest_path = write_manifest(directory, manifest)
            logger.info(
                "Scenario finished",
                extra={"wall_time_s": manifest.wall_time_s, "files": [f.name for f in files]},
            )
    finally:
        close_file_logging()
    return RunResult(manifest=manifest, output_dir=directory, manifest_path=manifest_path)
