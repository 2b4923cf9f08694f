"""Run manifest written next to every scenario's CSV files."""

from typing import Any

from pydantic import Field

from lindblad_lab.schemas.base import BaseSchema, TimestampSchema

MANIFEST_VERSION = 1

MetricValue = float | int | str | bool | None


class FileRecord(BaseSchema):
    """One CSV artifact and the column schema it was written with."""

    name: str
    schema_version: int
    columns: list[str]
    rows: int


class RunManifest(TimestampSchema):
    """Resolved config, provenance and headline metrics of one run.

    Only ``run_id``, the timestamps and ``wall_time_s`` differ between two
    runs of the same resolved config.
    """

    manifest_version: int = MANIFEST_VERSION
    scenario: str
    run_id: str
    library_version: str
    config: dict[str, Any]
    seeds: dict[str, int] = Field(default_factory=dict)
    wall_time_s: float
    metrics: dict[str, MetricValue] = Field(default_factory=dict)
    files: list[FileRecord] = Field(default_factory=list)
    output_dir: str
