"""Unit tests (fast, files only under tmp_path)."""
