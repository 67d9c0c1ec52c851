"""Integration tests (pipelines and the CLI on synthetic data)."""
