"""Logfire observability configuration."""

import logfire

from lindblad_lab.core.config import settings


def setup_logfire() -> None:
    """Configure Logfire instrumentation.

    Spans are only exported when LINDBLAD_LAB_LOGFIRE_TOKEN is set.
    """
    logfire.configure(
        token=settings.LOGFIRE_TOKEN,
        service_name=settings.LOGFIRE_SERVICE_NAME or settings.PROJECT_NAME,
        environment=settings.LOGFIRE_ENVIRONMENT,
        send_to_logfire="if-token-present",
        console=False,
    )
