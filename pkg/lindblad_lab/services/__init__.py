"""Run orchestration and artifact writers."""
