"""CSV and manifest writers.

CSV column sets are fixed per file name and versioned; the version is
recorded in the manifest. Floats are written with ``repr`` so a rerun of
the same config yields byte-identical files.
"""

import csv
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lindblad_lab.schemas.manifest import FileRecord, RunManifest

logger = logging.getLogger(__name__)

CSV_SCHEMAS: dict[str, tuple[int, tuple[str, ...]]] = {
    "evolution": (1, ("t", "distance", "fidelity", "energy", "trace_drift")),
    "mixing": (1, ("n", "tau_mix", "gap")),
    "shells": (1, ("r", "norm", "fit")),
    "order": (1, ("dt", "single_step_err", "accumulated_err")),
    "hitting": (1, ("probe", "hitting_time")),
    "nonnormal": (1, ("index", "lambda_re", "lambda_im", "s_min")),
}

MANIFEST_NAME = "manifest.json"

Cell = float | int | str | None


@dataclass
class CsvTable:
    """Rows for one of the registered CSV files."""

    name: str
    rows: list[Sequence[Cell]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.name not in CSV_SCHEMAS:
            raise KeyError(f"Unknown CSV schema {self.name!r}")

    @property
    def schema_version(self) -> int:
        return CSV_SCHEMAS[self.name][0]

    @property
    def columns(self) -> tuple[str, ...]:
        return CSV_SCHEMAS[self.name][1]

    @property
    def filename(self) -> str:
        return f"{self.name}.csv"

    def append(self, *cells: Cell) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"{self.name}.csv expects {len(self.columns)} columns, got {len(cells)}")
        self.rows.append(cells)


def format_cell(value: Cell) -> str:
    """``repr`` for floats (round-trip exact), empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def finite_or_none(value: float) -> float | None:
    """JSON has no infinity; non-finite metrics are stored as null."""
    return float(value) if math.isfinite(value) else None


def write_csv(directory: Path, table: CsvTable) -> FileRecord:
    path = directory / table.filename
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(cell) for cell in row])
    logger.debug("CSV written", extra={"path": str(path), "rows": len(table.rows)})
    return FileRecord(
        name=table.filename,
        schema_version=table.schema_version,
        columns=list(table.columns),
        rows=len(table.rows),
    )


def write_manifest(directory: Path, manifest: RunManifest) -> Path:
    path = directory / MANIFEST_NAME
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
