"""Validated options, numeric containers and run records."""
