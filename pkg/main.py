#!/usr/bin/env python3
"""
Entry point for command-line runs.
This file delegates to the CLI in the app module.
"""
import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
