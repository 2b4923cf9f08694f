"""Run-scoped logging context."""

from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from uuid import uuid4

run_id_ctx: ContextVar[str | None] = ContextVar("run_id", default=None)
scenario_ctx: ContextVar[str | None] = ContextVar("scenario", default=None)


def get_logging_context() -> dict[str, str | None]:
    """Get the current logging context.

    Returns a dict with run_id and scenario from context variables.
    """
    return {
        "run_id": run_id_ctx.get(),
        "scenario": scenario_ctx.get(),
    }


def new_run_id() -> str:
    """Generate a short run identifier."""
    return uuid4().hex[:12]


@contextmanager
def run_context(scenario: str, run_id: str | None = None) -> Iterator[str]:
    """Bind run_id and scenario to every log record emitted inside the block."""
    rid = run_id or new_run_id()
    run_token = run_id_ctx.set(rid)
    scenario_token = scenario_ctx.set(scenario)
    try:
        yield rid
    finally:
        scenario_ctx.reset(scenario_token)
        run_id_ctx.reset(run_token)
