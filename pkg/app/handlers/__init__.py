"""Handlers that run configured commands."""
