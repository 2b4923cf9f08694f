"""Base Pydantic schemas."""

from datetime import datetime
from typing import Any
from zoneinfo import ZoneInfo

from pydantic import BaseModel, ConfigDict, field_serializer


def serialize_datetime(dt: datetime) -> str:
    """Serialize datetime to ISO format with timezone.

    Ensures all datetimes have explicit timezone (defaults to UTC).
    """
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=ZoneInfo("UTC"))
    return dt.isoformat()


class BaseSchema(BaseModel):
    """Strict base: unknown keys are rejected everywhere."""

    model_config = ConfigDict(
        extra="forbid",
        populate_by_name=True,
        str_strip_whitespace=True,
        validate_default=True,
    )

    def serializable_dict(self, **kwargs: Any) -> dict[str, Any]:
        """Return a dict with only JSON-serializable fields."""
        return self.model_dump(mode="json", **kwargs)


class TimestampSchema(BaseSchema):
    """Schema with start and finish timestamps."""

    started_at: datetime
    finished_at: datetime

    @field_serializer("started_at", "finished_at")
    def _serialize_timestamps(self, dt: datetime) -> str:
        return serialize_datetime(dt)
