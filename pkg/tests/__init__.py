"""Tests for the WNTV graph interpolation toolkit."""
